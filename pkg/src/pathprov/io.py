"""Text formats for graphs, weights and query files.

Graph files::

    # comment
    vertex <v>                          (optional, for isolated vertices)
    edge <src> <dst> <label> [<prob>]
    tedge <src> <label> <dst> [<prob>]  (arity-two database; parallel edges)
    distinguished <src>><dst>:<label> ...

A missing probability means 1.  ``tedge`` lines turn the file into an
arity-two database.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .automata import Dfa, parse_dfa
from .errors import ParseError
from .graph import ArityTwoDb, Edge, LabeledGraph, ProbGraph, format_fraction, parse_probability

_RESERVED = set(">:")


@dataclass
class GraphFile:
    graph: ProbGraph
    distinguished: list
    has_probabilities: bool

    @property
    def base(self) -> LabeledGraph:
        return self.graph.base


def _name(token: str, lineno: int) -> str:
    if _RESERVED & set(token):
        raise ParseError(f"vertex name {token!r} may not contain '>' or ':'", lineno)
    return token


def parse_graph(text: str, allow_probabilities: bool = True) -> GraphFile:
    vertices, edges, prob, distinguished = [], [], {}, []
    arity_two = False
    has_prob = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = line.split()
        if not toks or toks[0].startswith("#"):
            continue
        head = toks[0]
        if head == "vertex" and len(toks) == 2:
            vertices.append(_name(toks[1], lineno))
        elif head in ("edge", "tedge") and len(toks) in (4, 5):
            if head == "edge":
                src, dst, label = toks[1], toks[2], toks[3]
            else:
                src, label, dst = toks[1], toks[2], toks[3]
                arity_two = True
            e = Edge(_name(src, lineno), _name(dst, lineno), label)
            edges.append(e)
            if len(toks) == 5:
                if not allow_probabilities:
                    raise ParseError("query files may not carry probabilities", lineno)
                try:
                    prob[e] = parse_probability(toks[4])
                except Exception as exc:
                    raise ParseError(str(exc), lineno) from exc
                has_prob = True
        elif head == "distinguished":
            try:
                distinguished += [Edge.from_token(t) for t in toks[1:]]
            except ValueError as exc:
                raise ParseError("distinguished edges are written src>dst:label", lineno) from exc
        else:
            raise ParseError(f"cannot read line {line.strip()!r}", lineno)
    cls = ArityTwoDb if arity_two else LabeledGraph
    try:
        base = cls(vertices, edges)
    except Exception as exc:
        raise ParseError(str(exc)) from exc
    missing = [e for e in distinguished if e not in base]
    if missing:
        raise ParseError(f"distinguished edge {missing[0]} is not in the graph")
    return GraphFile(ProbGraph(base, prob), distinguished, has_prob)


def format_graph(G, distinguished=()) -> str:
    """Inverse of :func:`parse_graph`."""
    if isinstance(G, ProbGraph):
        base, prob = G.base, G.prob
    else:
        base, prob = G, {}
    lines = []
    touched = dict.fromkeys(v for e in base.edges for v in (e.src, e.dst))
    isolated = [v for v in base.vertices if v not in touched]
    # list every vertex when the edges alone would reorder them
    listed = base.vertices if tuple(isolated + list(touched)) != base.vertices else isolated
    lines += [f"vertex {v}" for v in listed]
    for e in base.edges:
        p = prob.get(e, Fraction(1))
        tail = "" if p == 1 else f" {format_fraction(p)}"
        if base.allow_parallel:
            lines.append(f"tedge {e.src} {e.label} {e.dst}{tail}")
        else:
            lines.append(f"edge {e.src} {e.dst} {e.label}{tail}")
    if distinguished:
        lines.append(" ".join(["distinguished", *map(str, distinguished)]))
    return "\n".join(lines) + "\n"


def parse_weights(text: str) -> dict:
    """``weight <var> <num>/<den>`` lines; variables stay strings."""
    weights = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = line.split()
        if not toks or toks[0].startswith("#"):
            continue
        if toks[0] != "weight" or len(toks) != 3:
            raise ParseError("expected 'weight <var> <num>/<den>'", lineno)
        try:
            weights[toks[1]] = parse_probability(toks[2])
        except Exception as exc:
            raise ParseError(str(exc), lineno) from exc
    return weights


def format_weights(weights: dict) -> str:
    return "".join(f"weight {v} {format_fraction(p)}\n" for v, p in weights.items())


@dataclass
class QueryFile:
    """A query file holds a graph, a ``regex <pattern>`` line or a DFA."""

    graph: LabeledGraph | None = None
    pattern: str | None = None
    dfa: Dfa | None = None

    @property
    def is_rpq(self) -> bool:
        return self.graph is None


def parse_query(text: str) -> QueryFile:
    body = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if body and body[0] == "dfa":
        return QueryFile(dfa=parse_dfa(text))
    if body and body[0].split()[0] == "regex":
        parts = body[0].split(None, 1)
        if len(parts) != 2 or len(body) != 1:
            raise ParseError("expected a single 'regex <pattern>' line")
        return QueryFile(pattern=parts[1])
    return QueryFile(graph=parse_graph(text, allow_probabilities=False).base)


def read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")
