"""Edge-labelled directed graphs, probabilistic graphs and graph classes."""

from __future__ import annotations

import enum
import heapq
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .errors import CycleError, DomainMismatch, GraphDisciplineError

#: label used for graphs of the unlabelled setting
UNLABELLED = "_"


class Edge(NamedTuple):
    src: str
    dst: str
    label: str

    def __str__(self):
        return f"{self.src}>{self.dst}:{self.label}"

    @classmethod
    def from_token(cls, token: str) -> "Edge":
        src, rest = token.split(">", 1)
        dst, label = rest.rsplit(":", 1)
        return cls(src, dst, label)


class LabeledGraph:
    """A directed graph whose edges carry one label each.

    Vertices and edges keep their insertion order; at most one edge may join
    an ordered pair of vertices (the :class:`ArityTwoDb` subclass lifts this).
    """

    allow_parallel = False

    __slots__ = ("_vertices", "_edges", "_alphabet", "_out", "_in", "_index")

    def __init__(self, vertices: Iterable[str] = (), edges: Iterable = (),
                 alphabet: Iterable[str] | None = None):
        verts = dict.fromkeys(str(v) for v in vertices)
        edge_list = []
        seen = set()
        pairs = set()
        for e in edges:
            e = Edge(*e)
            if e in seen:
                raise GraphDisciplineError(f"duplicate edge {e}")
            if not self.allow_parallel and (e.src, e.dst) in pairs:
                raise GraphDisciplineError(
                    f"two edges between {e.src!r} and {e.dst!r}")
            seen.add(e)
            pairs.add((e.src, e.dst))
            verts.setdefault(e.src)
            verts.setdefault(e.dst)
            edge_list.append(e)
        labels = {e.label for e in edge_list}
        if alphabet is not None:
            alphabet = frozenset(alphabet)
            stray = labels - alphabet
            if stray:
                raise DomainMismatch(f"labels {sorted(stray)} not in alphabet")
        else:
            alphabet = frozenset(labels)
        self._vertices = tuple(verts)
        self._edges = tuple(edge_list)
        self._alphabet = alphabet
        self._out = {v: [] for v in self._vertices}
        self._in = {v: [] for v in self._vertices}
        for e in self._edges:
            self._out[e.src].append(e)
            self._in[e.dst].append(e)
        self._index = {e: i for i, e in enumerate(self._edges)}

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def edges(self) -> tuple:
        return self._edges

    @property
    def alphabet(self) -> frozenset:
        return self._alphabet

    @property
    def size(self) -> int:
        return len(self._edges)

    def __len__(self):
        return len(self._edges)

    def out_edges(self, v: str) -> list:
        return self._out[v]

    def in_edges(self, v: str) -> list:
        return self._in[v]

    def edge_index(self, e: Edge) -> int:
        return self._index[e]

    def __contains__(self, e) -> bool:
        return e in self._index

    def subgraph(self, kept: Iterable[Edge]) -> "LabeledGraph":
        """Same vertex set, only the given edges (the graph `H_nu`)."""
        kept = set(kept)
        return type(self)(self._vertices, [e for e in self._edges if e in kept],
                          self._alphabet)

    def relabel(self, label_of) -> "LabeledGraph":
        return type(self)(self._vertices,
                          [Edge(e.src, e.dst, label_of(e)) for e in self._edges])

    def __eq__(self, other):
        return (type(self) is type(other) and self._vertices == other._vertices
                and self._edges == other._edges
                and self._alphabet == other._alphabet)

    def __hash__(self):
        return hash((self._vertices, self._edges))

    def __repr__(self):
        return (f"{type(self).__name__}({len(self._vertices)} vertices, "
                f"{len(self._edges)} edges)")


class ArityTwoDb(LabeledGraph):
    """Arity-two database: parallel edges with distinct labels are allowed."""

    allow_parallel = True
    __slots__ = ()


class ProbGraph:
    """A graph (or arity-two database) with an exact probability per edge."""

    __slots__ = ("base", "prob")

    def __init__(self, base: LabeledGraph, prob: Mapping | None = None):
        prob = {} if prob is None else dict(prob)
        probs = {}
        for e in base.edges:
            p = Fraction(prob.get(e, 1))
            if not 0 <= p <= 1:
                raise DomainMismatch(f"probability {p} of {e} outside [0, 1]")
            probs[e] = p
        extra = set(prob) - set(probs)
        if extra:
            raise DomainMismatch(f"probabilities given for unknown edges {sorted(map(str, extra))}")
        self.base = base
        self.prob = probs

    @property
    def vertices(self):
        return self.base.vertices

    @property
    def edges(self):
        return self.base.edges

    @property
    def alphabet(self):
        return self.base.alphabet

    @property
    def size(self):
        return self.base.size

    def uncertain_edges(self) -> list:
        """Edges whose probability is strictly between 0 and 1."""
        return [e for e in self.base.edges if 0 < self.prob[e] < 1]

    def __eq__(self, other):
        return isinstance(other, ProbGraph) and self.base == other.base and self.prob == other.prob

    def __repr__(self):
        return f"ProbGraph({self.base!r})"


def base_graph(H) -> LabeledGraph:
    return H.base if isinstance(H, ProbGraph) else H


def probabilities(H) -> dict:
    if isinstance(H, ProbGraph):
        return H.prob
    return {e: Fraction(1) for e in H.edges}


def path_graph(labels: Iterable, prefix: str = "v", directions=None) -> LabeledGraph:
    """Build ``->l1 ->l2 ...``; ``directions`` holds +1 (forward) or -1 (backward)."""
    labels = list(labels)
    directions = [1] * len(labels) if directions is None else list(directions)
    verts = [f"{prefix}{i}" for i in range(len(labels) + 1)]
    edges = []
    for i, (lab, d) in enumerate(zip(labels, directions)):
        if d > 0:
            edges.append(Edge(verts[i], verts[i + 1], lab))
        else:
            edges.append(Edge(verts[i + 1], verts[i], lab))
    return LabeledGraph(verts, edges)


class GraphClass(enum.Enum):
    OneWayPath = "1WP"
    TwoWayPath = "2WP"
    DownwardTree = "DWT"
    Polytree = "PT"
    Dag = "DAG"
    All = "All"

    def __str__(self):
        return self.value


def _weakly_connected(G: LabeledGraph) -> bool:
    if not G.vertices:
        return False
    adj = {v: set() for v in G.vertices}
    for e in G.edges:
        adj[e.src].add(e.dst)
        adj[e.dst].add(e.src)
    start = G.vertices[0]
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(G.vertices)


def is_tree_shaped(G: LabeledGraph) -> bool:
    """Underlying undirected (multi)graph is a tree."""
    if len(G.edges) != len(G.vertices) - 1:
        return False
    if any(e.src == e.dst for e in G.edges):
        return False
    return _weakly_connected(G)


def is_one_way_path(G: LabeledGraph) -> bool:
    if not is_tree_shaped(G):
        return False
    return all(len(G.out_edges(v)) <= 1 and len(G.in_edges(v)) <= 1 for v in G.vertices)


def is_two_way_path(G: LabeledGraph) -> bool:
    if not is_tree_shaped(G):
        return False
    return all(len(G.out_edges(v)) + len(G.in_edges(v)) <= 2 for v in G.vertices)


def is_downward_tree(G: LabeledGraph) -> bool:
    return is_tree_shaped(G) and all(len(G.in_edges(v)) <= 1 for v in G.vertices)


def is_polytree(G: LabeledGraph) -> bool:
    return is_tree_shaped(G)


def is_dag(G: LabeledGraph) -> bool:
    try:
        topological_vertex_order(G)
    except CycleError:
        return False
    return True


def classify(G: LabeledGraph) -> set:
    """Return every :class:`GraphClass` the graph belongs to."""
    G = base_graph(G)
    classes = {GraphClass.All}
    if is_dag(G):
        classes.add(GraphClass.Dag)
    if is_polytree(G):
        classes.add(GraphClass.Polytree)
        if is_two_way_path(G):
            classes.add(GraphClass.TwoWayPath)
        if is_downward_tree(G):
            classes.add(GraphClass.DownwardTree)
        if is_one_way_path(G):
            classes.add(GraphClass.OneWayPath)
    return classes


def one_way_path_labels(G: LabeledGraph) -> list | None:
    """Edge labels of a one-way path in order, or None if G is not one."""
    if not is_one_way_path(G):
        return None
    starts = [v for v in G.vertices if not G.in_edges(v)]
    v = starts[0]
    labels = []
    while G.out_edges(v):
        e = G.out_edges(v)[0]
        labels.append(e.label)
        v = e.dst
    return labels


def downward_root(G: LabeledGraph) -> str:
    return next(v for v in G.vertices if not G.in_edges(v))


def height(G: LabeledGraph) -> int:
    """Length of the longest directed path of a DAG."""
    order = topological_vertex_order(G)
    depth = {v: 0 for v in order}
    for v in reversed(order):
        for e in G.out_edges(v):
            depth[v] = max(depth[v], depth[e.dst] + 1)
    return max(depth.values(), default=0)


def topological_vertex_order(G: LabeledGraph) -> list:
    """Kahn's algorithm, smallest vertex id first among ready vertices."""
    G = base_graph(G)
    indeg = {v: 0 for v in G.vertices}
    for e in G.edges:
        indeg[e.dst] += 1
    heap = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for e in G.out_edges(v):
            indeg[e.dst] -= 1
            if indeg[e.dst] == 0:
                heapq.heappush(heap, e.dst)
    if len(order) != len(G.vertices):
        raise CycleError("graph has a directed cycle")
    return order


def topological_edge_order(H) -> list:
    """Order edges so that (a, b) precedes (b, c) for every consecutive pair.

    Edges are sorted by the topological rank of their source, then of their
    target, then by label; parallel edges of an arity-two database therefore
    sit next to each other.
    """
    H = base_graph(H)
    rank = {v: i for i, v in enumerate(topological_vertex_order(H))}
    return sorted(H.edges, key=lambda e: (rank[e.src], rank[e.dst], e.label))


def world_probability(P: ProbGraph, valuation: Mapping) -> Fraction:
    """Probability of the possible world selected by ``valuation``."""
    if set(valuation) != set(P.edges):
        raise DomainMismatch("valuation domain differs from the edge set")
    result = Fraction(1)
    for e, keep in valuation.items():
        p = P.prob[e]
        result *= p if keep else 1 - p
    return result


def parse_probability(text: str) -> Fraction:
    """Parse ``num/den`` or a decimal literal exactly."""
    try:
        p = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainMismatch(f"bad probability {text!r}") from exc
    if not 0 <= p <= 1:
        raise DomainMismatch(f"probability {text} outside [0, 1]")
    return p


def format_fraction(p: Fraction) -> str:
    p = Fraction(p)
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"
