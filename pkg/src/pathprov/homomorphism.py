"""Label-preserving graph homomorphisms.

Forest-shaped queries (which covers 1WP, 2WP, DWT and PT) are decided by a
bottom-up candidate-set pass; anything else falls back to backtracking over
arc-consistent domains.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterator

from .graph import LabeledGraph, base_graph


def _adjacency(G: LabeledGraph):
    """Undirected adjacency as (neighbour, edge, forward?) triples."""
    adj = {v: [] for v in G.vertices}
    for e in G.edges:
        adj[e.src].append((e.dst, e, True))
        adj[e.dst].append((e.src, e, False))
    return adj


def is_forest(G: LabeledGraph) -> bool:
    """True if the underlying undirected multigraph has no cycle."""
    parent = {v: v for v in G.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in G.edges:
        a, b = find(e.src), find(e.dst)
        if a == b:
            return False
        parent[a] = b
    return True


def forest_schedule(G: LabeledGraph):
    """Root every component and list (child, parent, edge, forward) in post-order.

    ``forward`` is True when the query edge points from parent to child.
    Returns ``(roots, steps)``.
    """
    adj = _adjacency(G)
    seen = set()
    roots, steps = [], []
    for r in G.vertices:
        if r in seen:
            continue
        roots.append(r)
        seen.add(r)
        order = []
        stack = [(r, None, None, None)]
        while stack:
            v, par, e, fwd = stack.pop()
            order.append((v, par, e, fwd))
            for w, f, forward in adj[v]:
                if w not in seen:
                    seen.add(w)
                    # forward query edge par->child means f.src == v
                    stack.append((w, v, f, forward))
        for v, par, e, fwd in reversed(order):
            if par is not None:
                steps.append((v, par, e, fwd))
    return roots, steps


def _label_index(H: LabeledGraph):
    by_label = defaultdict(list)
    for e in H.edges:
        by_label[e.label].append(e)
    return by_label


def _forest_hom(G: LabeledGraph, H: LabeledGraph) -> bool:
    by_label = _label_index(H)
    everything = set(H.vertices)
    cand = {v: everything for v in G.vertices}
    roots, steps = forest_schedule(G)
    for child, par, e, forward in steps:
        ok = cand[child]
        if forward:
            support = {f.src for f in by_label.get(e.label, ()) if f.dst in ok}
        else:
            support = {f.dst for f in by_label.get(e.label, ()) if f.src in ok}
        cand[par] = cand[par] & support
        if not cand[par]:
            return False
    return all(cand[r] for r in roots)


def _initial_domains(G: LabeledGraph, H: LabeledGraph):
    by_label = _label_index(H)
    loops = {(e.src, e.label) for e in H.edges if e.src == e.dst}
    dom = {v: set(H.vertices) for v in G.vertices}
    for e in G.edges:
        hosts = by_label.get(e.label, ())
        if e.src == e.dst:
            dom[e.src] &= {v for v, lab in loops if lab == e.label}
        else:
            dom[e.src] &= {f.src for f in hosts}
            dom[e.dst] &= {f.dst for f in hosts}
    return dom, by_label


def _arc_consistency(G, H, dom, by_label) -> bool:
    pairs = defaultdict(set)
    for f in H.edges:
        pairs[f.label].add((f.src, f.dst))
    succ = defaultdict(lambda: defaultdict(set))
    pred = defaultdict(lambda: defaultdict(set))
    for f in H.edges:
        succ[f.label][f.src].add(f.dst)
        pred[f.label][f.dst].add(f.src)
    changed = True
    while changed:
        changed = False
        for e in G.edges:
            if e.src == e.dst:
                continue
            s = succ[e.label]
            new_src = {u for u in dom[e.src] if s[u] & dom[e.dst]}
            p = pred[e.label]
            new_dst = {v for v in dom[e.dst] if p[v] & new_src}
            if new_src != dom[e.src] or new_dst != dom[e.dst]:
                dom[e.src], dom[e.dst] = new_src, new_dst
                changed = True
            if not new_src or not new_dst:
                return False
    return all(dom.values())


def iter_homomorphisms(G: LabeledGraph, H) -> Iterator[dict]:
    """Yield every homomorphism from G to H as a vertex map."""
    G, H = base_graph(G), base_graph(H)
    if not G.vertices:
        yield {}
        return
    if not H.vertices:
        return
    dom, by_label = _initial_domains(G, H)
    if not _arc_consistency(G, H, dom, by_label):
        return
    edge_set = {(f.src, f.dst, f.label) for f in H.edges}
    adj = _adjacency(G)
    # fixed variable order: most constrained first, then stay connected
    order = []
    placed = set()
    remaining = set(G.vertices)
    while remaining:
        frontier = [v for v in remaining if any(w in placed for w, _, _ in adj[v])]
        pool = frontier or list(remaining)
        v = min(pool, key=lambda x: (len(dom[x]), x))
        order.append(v)
        placed.add(v)
        remaining.discard(v)
    position = {v: i for i, v in enumerate(order)}
    checks = [[(w, e, fwd) for w, e, fwd in adj[v] if position[w] < position[v]]
              for v in order]
    loops = [[e for w, e, fwd in adj[v] if w == v and fwd] for v in order]
    assignment = {}

    def extend(i):
        if i == len(order):
            yield dict(assignment)
            return
        v = order[i]
        for h in sorted(dom[v]):
            ok = True
            for w, e, fwd in checks[i]:
                hw = assignment[w]
                key = (h, hw, e.label) if fwd else (hw, h, e.label)
                if key not in edge_set:
                    ok = False
                    break
            if ok and all((h, h, e.label) in edge_set for e in loops[i]):
                assignment[v] = h
                yield from extend(i + 1)
                del assignment[v]

    yield from extend(0)


def homomorphism_exists(G: LabeledGraph, H) -> bool:
    """Decide whether a label-preserving homomorphism G -> H exists."""
    G, H = base_graph(G), base_graph(H)
    if not G.vertices:
        return True
    if not H.vertices:
        return False
    if is_forest(G):
        return _forest_hom(G, H)
    return next(iter_homomorphisms(G, H), None) is not None


def homomorphism_exists_backtracking(G: LabeledGraph, H) -> bool:
    """Backtracking only; kept separate so tests can compare both routes."""
    return next(iter_homomorphisms(G, H), None) is not None
