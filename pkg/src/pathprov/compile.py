"""Compile one-way path queries on acyclic instances into nOBDDs."""

from __future__ import annotations

from typing import Sequence

from .errors import NotOneWayPath
from .graph import LabeledGraph, base_graph, one_way_path_labels, topological_edge_order
from .nobdd import SINK0, SINK1, Nobdd, NobddBuilder


def compile_1wp_dag(G: LabeledGraph, H, order: Sequence | None = None,
                    prune: bool = True) -> Nobdd:
    """nOBDD for the provenance of the one-way path ``G`` on the DAG ``H``.

    Variables are the edges of ``H``, ordered topologically.  The diagram is
    the grid of or-nodes ``n[u, i]`` ("a match of the suffix starting at
    query edge i can start at u") and decision nodes ``d[e, i]`` ("query
    edge i is mapped to e"), topped by an or-node over all start vertices.
    With ``prune=False`` the full grid is kept, unreachable nodes included:
    ``|V| * m`` or-nodes and ``|E| * m`` decision nodes plus sinks and root.
    """
    G = base_graph(G)
    Hb = base_graph(H)
    labels = one_way_path_labels(G)
    if labels is None:
        raise NotOneWayPath("query is not a one-way path")
    topo = topological_edge_order(Hb)
    order = tuple(topo if order is None else order)
    m = len(labels)
    b = NobddBuilder()
    if m == 0:
        return b.build(SINK1 if Hb.vertices else SINK0, order)

    following = None  # n[., i + 1]
    for i in range(m, 0, -1):
        label = labels[i - 1]
        d = {}
        for e in Hb.edges:
            d[e] = b.decision(e, SINK0, SINK1 if i == m else following[e.dst])
        following = {u: b.disjunction(d[e] for e in Hb.out_edges(u) if e.label == label)
                     for u in Hb.vertices}
    root = b.disjunction(following[v] for v in Hb.vertices)
    D = b.build(root, order, keep_all=not prune)
    return D.pruned() if prune else D
