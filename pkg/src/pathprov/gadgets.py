"""Encoders from monotone 2-CNF formulas to (query, instance) pairs, and
the query translations used alongside them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cnf import MonotoneCnf
from .errors import DegreeExceeded, EmptyFormula, LabelOutOfRange, NotDownwardTree
from .graph import (UNLABELLED, Edge, LabeledGraph, ProbGraph, downward_root, height,
                    is_downward_tree, path_graph)
from .rpq import Rpq


@dataclass(frozen=True)
class GadgetOutput:
    query: LabeledGraph | None
    instance: LabeledGraph
    distinguished: tuple
    fixed_prob: Fraction = field(default=Fraction(1, 2))

    def probabilized(self, p: Fraction | None = None) -> ProbGraph:
        """Distinguished edges get ``p`` (default ``fixed_prob``), all others 1."""
        p = self.fixed_prob if p is None else Fraction(p)
        return ProbGraph(self.instance, {e: p for e in self.distinguished})


class _GraphBuilder:
    def __init__(self):
        self.vertices: dict = {}
        self.edges: list = []

    def vertex(self, v):
        self.vertices.setdefault(v, None)
        return v

    def edge(self, u, v, label) -> Edge:
        e = Edge(self.vertex(u), self.vertex(v), label)
        self.edges.append(e)
        return e

    def path(self, u, v, label, length: int, stem: str):
        nodes = [u] + [f"{stem}.{k}" for k in range(1, length)] + [v]
        for a, b in zip(nodes, nodes[1:]):
            self.edge(a, b, label)

    def labelled_path(self, u, labels: Sequence, stem: str) -> str:
        cur = u
        for k, a in enumerate(labels, start=1):
            nxt = f"{stem}.{k}"
            self.edge(cur, nxt, a)
            cur = nxt
        return cur

    def graph(self) -> LabeledGraph:
        return LabeledGraph(list(self.vertices), self.edges)


def _check_degree(phi: MonotoneCnf, d: int):
    if d < 2:
        raise DegreeExceeded("degree bound d must be at least 2")
    if phi.max_degree() > d:
        raise DegreeExceeded(f"a variable occurs in {phi.max_degree()} clauses, bound is {d}")


def gen_1wp_all(phi: MonotoneCnf, d: int, labels: tuple = ("U", "R")) -> GadgetOutput:
    """1WP query and general instance whose provenance on the ``a_i -> b_i``
    edges is ``phi``; every variable may occur in at most ``d`` clauses."""
    _check_degree(phi, d)
    U, R = labels
    query = path_graph([U, U] + ([R] * (d + 2) + [U]) * phi.m + [U], prefix="g")
    b = _GraphBuilder()
    distinguished = tuple(b.edge(f"a{i}", f"b{i}", R) for i in range(1, phi.n + 1))
    b.edge("c0'", "c0", U)
    for j in range(phi.m + 1):
        b.edge(f"c{j}", f"d{j}", U)
    b.edge(f"d{phi.m}", f"d{phi.m}'", U)
    seen = {}
    for j in range(1, phi.m + 1):
        for i in phi.clause_vars(j - 1):
            seen[i] = p = seen.get(i, 0) + 1
            b.path(f"d{j - 1}", f"a{i}", R, p, f"in{i}_{p}")
            b.path(f"b{i}", f"c{j}", R, d + 1 - p, f"out{i}_{p}")
    return GadgetOutput(query, b.graph(), distinguished)


def clause_bits(j: int, L: int) -> list:
    return list(format(j, f"0{L}b"))


def gen_dwt_dwt(phi: MonotoneCnf) -> GadgetOutput:
    """Downward-tree query and instance over labels '0' and '1'.

    Clauses are numbered from 0 and written on ``max(1, ceil(log2 m))`` bits.
    """
    if phi.m == 0:
        raise EmptyFormula("formula has no clauses")
    L = max(1, (phi.m - 1).bit_length())
    q = _GraphBuilder()
    q.vertex("z")
    for j in range(phi.m):
        q.edge("z", f"c{j}", "0")
        q.labelled_path(f"c{j}", clause_bits(j, L), f"d{j}")
    h = _GraphBuilder()
    h.vertex("z'")
    distinguished = tuple(h.edge("z'", f"x{i}", "0") for i in range(1, phi.n + 1))
    for j in range(phi.m):
        for i in phi.clause_vars(j):
            h.labelled_path(f"x{i}", clause_bits(j, L), f"y{i}_{j}")
    return GadgetOutput(q.graph(), h.graph(), distinguished)


def dwt_to_2wp(G: LabeledGraph) -> LabeledGraph:
    """Two-way path equivalent to the downward tree G on downward-tree instances.

    Every child edge ``-R->`` with subtree T becomes ``->R  T'  <-R``.
    """
    if not is_downward_tree(G):
        raise NotDownwardTree("query is not a downward tree")
    labels, directions = [], []
    # iterative pre/post walk emitting forward on entry, backward on exit
    root = downward_root(G)
    stack = [(root, iter(G.out_edges(root)), None)]
    while stack:
        v, it, entering = stack[-1]
        e = next(it, None)
        if e is None:
            stack.pop()
            if entering is not None:
                labels.append(entering.label)
                directions.append(-1)
            continue
        labels.append(e.label)
        directions.append(1)
        stack.append((e.dst, iter(G.out_edges(e.dst)), e))
    return path_graph(labels, prefix="w", directions=directions)


def _code_graph(G: LabeledGraph, index: dict, k: int) -> tuple[LabeledGraph, dict]:
    b = _GraphBuilder()
    for v in G.vertices:
        b.vertex(v)
    first = {}
    for n, e in enumerate(G.edges):
        if e.label not in index:
            raise LabelOutOfRange(f"label {e.label!r} is not among the coded labels")
        i = index[e.label]
        steps = [1] * (k + 3) + [-1] + [1] * (i + 1) + [-1] * (k + 2)
        nodes = [e.src] + [f"{e.src}~{e.dst}~{n}.{j}" for j in range(1, len(steps))] + [e.dst]
        for j, s in enumerate(steps):
            u, v = (nodes[j], nodes[j + 1]) if s > 0 else (nodes[j + 1], nodes[j])
            coded = b.edge(u, v, UNLABELLED)
            if j == 0:
                first[e] = coded
    return b.graph(), first


def label_coding(G: LabeledGraph, H: LabeledGraph, labels: Sequence | None = None,
                 with_map: bool = False):
    """Replace each label-i edge (i = 1..k, the position in ``labels``) by the
    unlabelled path ``->^(k+3) <- ->^(i+1) <-^(k+2)``.

    With ``with_map`` also return, for H, the first coded edge of each edge.
    """
    if labels is None:
        labels = sorted(set(G.alphabet) | set(H.alphabet))
    labels = list(labels)
    k = len(labels)
    if k < 2:
        raise LabelOutOfRange("coding needs at least two labels")
    index = {a: i for i, a in enumerate(labels, start=1)}
    Gc, _ = _code_graph(G, index, k)
    Hc, first = _code_graph(H, index, k)
    return (Gc, Hc, first) if with_map else (Gc, Hc)


def gen_2wp_pt_unlabelled(phi: MonotoneCnf) -> GadgetOutput:
    """Unlabelled two-way path query and polytree instance for ``phi``."""
    base = gen_dwt_dwt(phi)
    G, H, first = label_coding(dwt_to_2wp(base.query), base.instance, ["0", "1"], with_map=True)
    return GadgetOutput(G, H, tuple(first[e] for e in base.distinguished))


def pp2dnf_gadget(pairs: Iterable[tuple]) -> tuple[LabeledGraph, ProbGraph]:
    """Query ``->->->`` and a three-layer instance for a positive partitioned 2-DNF."""
    pairs = sorted(set(pairs))
    if not pairs:
        raise EmptyFormula("no conjunctions")
    xs = sorted({i for i, _ in pairs})
    ys = sorted({j for _, j in pairs})
    b = _GraphBuilder()
    prob = {}
    for i in xs:
        prob[b.edge("s", f"X{i}", UNLABELLED)] = Fraction(1, 2)
    for i, j in pairs:
        prob[b.edge(f"X{i}", f"Y{j}", UNLABELLED)] = Fraction(1)
    for j in ys:
        prob[b.edge(f"Y{j}", "t", UNLABELLED)] = Fraction(1, 2)
    return path_graph([UNLABELLED] * 3, prefix="g"), ProbGraph(b.graph(), prob)


def unlabelled_dwt_to_1wp(G: LabeledGraph) -> LabeledGraph:
    """One-way path as long as the height of an unlabelled downward tree."""
    if not is_downward_tree(G):
        raise NotDownwardTree("query is not a downward tree")
    if len(G.alphabet) > 1:
        raise LabelOutOfRange("query must be unlabelled")
    label = next(iter(G.alphabet), UNLABELLED)
    return path_graph([label] * height(G), prefix="p")


def rpq_gadget_pattern(d: int) -> str:
    return "aa(" + "b" * (d + 2) + "a)*a"


def gen_rpq_gadget(phi: MonotoneCnf, d: int) -> tuple[Rpq, GadgetOutput]:
    """RPQ ``a a (b^(d+2) a)* a`` with the 1WP gadget instance (U=a, R=b)."""
    g = gen_1wp_all(phi, d, labels=("a", "b"))
    return Rpq(rpq_gadget_pattern(d)), GadgetOutput(None, g.instance, g.distinguished, g.fixed_prob)
