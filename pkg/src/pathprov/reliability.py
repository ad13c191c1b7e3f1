"""Two-terminal reliability on probabilistic DAGs through 1WP compilation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .compile import compile_1wp_dag
from .errors import DomainMismatch
from .counting import Estimate, EstimatorConfig, estimate_nobdd, exact_count
from .graph import Edge, LabeledGraph, ProbGraph, base_graph, path_graph, probabilities, \
    topological_edge_order, topological_vertex_order
from .nobdd import Nobdd, disjoin
from .worlds import brute_force_reachability

R, R_S, R_T, R_ST = "R", "R_s", "R_t", "R'"


@dataclass(frozen=True)
class StconInstance:
    graph: ProbGraph
    source: str
    target: str

    def __post_init__(self):
        if not isinstance(self.graph, ProbGraph):
            object.__setattr__(self, "graph", ProbGraph(self.graph))
        if self.source == self.target:
            raise DomainMismatch("source and target must differ")
        verts = set(self.graph.vertices)
        for v in (self.source, self.target):
            if v not in verts:
                raise DomainMismatch(f"unknown vertex {v}")


def _label_for(e: Edge, s: str, t: str) -> str:
    if e.src == s and e.dst == t:
        return R_ST
    if e.src == s:
        return R_S
    if e.dst == t:
        return R_T
    return R


def relabel_for_stcon(I: StconInstance) -> tuple[ProbGraph, dict]:
    """Relabelled copy plus the map from relabelled edges back to originals."""
    H = base_graph(I.graph)
    topological_vertex_order(H)  # CycleError on cyclic input
    probs = probabilities(I.graph)
    back = {}
    for e in H.edges:
        back[Edge(e.src, e.dst, _label_for(e, I.source, I.target))] = e
    relabelled = LabeledGraph(H.vertices, list(back))
    return ProbGraph(relabelled, {f: probs[e] for f, e in back.items()}), back


def longest_path_length(H: LabeledGraph, s: str, t: str) -> int | None:
    """Edges on a longest s-t path of a DAG, or None if t is unreachable."""
    order = topological_vertex_order(H)
    best = {s: 0}
    for v in order:
        if v not in best:
            continue
        for e in H.out_edges(v):
            best[e.dst] = max(best.get(e.dst, -1), best[v] + 1)
    return best.get(t)


def stcon_query_family(I: StconInstance, capped: bool = True) -> list[LabeledGraph]:
    """``->R'`` (when s->t is an edge) and ``->R_s (->R)^k ->R_t`` for every
    length up to the longest s-t path, or up to |E| when ``capped`` is off."""
    H = base_graph(I.graph)
    s, t = I.source, I.target
    longest = longest_path_length(H, s, t)
    if longest is None:
        return []
    family = []
    if any(e.src == s and e.dst == t for e in H.edges):
        family.append(path_graph([R_ST]))
    top = min(H.size, longest) if capped else H.size
    for length in range(2, top + 1):
        family.append(path_graph([R_S] + [R] * (length - 2) + [R_T]))
    return family


def stcon_compile(I: StconInstance) -> Nobdd:
    """nOBDD over the original edges accepting exactly the s-t-connected worlds."""
    P, back = relabel_for_stcon(I)
    order = topological_edge_order(P)
    parts = [compile_1wp_dag(G, P, order) for G in stcon_query_family(I)]
    D = disjoin(parts, order) if parts else Nobdd.constant(False, order)
    return D.map_vars(back).pruned()


def stcon_estimate(I: StconInstance, cfg: EstimatorConfig = EstimatorConfig(),
                   exact: bool = False, compiled: Nobdd | None = None) -> Estimate:
    D = stcon_compile(I) if compiled is None else compiled
    weights = probabilities(I.graph)
    if exact:
        value = exact_count(D, weights)
        return Estimate(float(value), value, 0, True)
    return estimate_nobdd(D, weights, cfg)


def stcon_brute(I: StconInstance, cap: int | None = None) -> Fraction:
    return brute_force_reachability(I.graph, I.source, I.target, cap)
