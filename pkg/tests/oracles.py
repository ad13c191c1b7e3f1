"""Definition-level reference implementations and random generators.

Nothing here uses the package's algorithms beyond its data types, so
agreement with the package is evidence rather than tautology.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from pathprov.graph import UNLABELLED, Edge, LabeledGraph, ProbGraph
from pathprov.nobdd import NobddBuilder, SINK0, SINK1, evaluate


# ------------------------------------------------------------ semantics

def hom_by_enumeration(G: LabeledGraph, H: LabeledGraph) -> bool:
    """Try all |V_H|^|V_G| vertex maps."""
    edges = {(e.src, e.dst, e.label) for e in H.edges}
    gv = list(G.vertices)
    if not gv:
        return True
    for image in itertools.product(H.vertices, repeat=len(gv)):
        h = dict(zip(gv, image))
        if all((h[e.src], h[e.dst], e.label) in edges for e in G.edges):
            return True
    return False


def hom_by_search(G: LabeledGraph, H: LabeledGraph) -> bool:
    """Plain backtracking over vertex images, checking edges as soon as
    both endpoints are placed.  Used where |V_H|^|V_G| is out of reach."""
    edges = {(e.src, e.dst, e.label) for e in H.edges}
    order = []
    for start in G.vertices:  # BFS so each vertex meets a placed neighbour
        if start in order:
            continue
        order.append(start)
        i = len(order) - 1
        while i < len(order):
            v = order[i]
            for e in G.out_edges(v) + G.in_edges(v):
                for w in (e.src, e.dst):
                    if w not in order:
                        order.append(w)
            i += 1
    checks = {v: [] for v in order}
    rank = {v: i for i, v in enumerate(order)}
    for e in G.edges:
        checks[max(e.src, e.dst, key=rank.__getitem__)].append(e)
    h = {}

    def place(i):
        if i == len(order):
            return True
        v = order[i]
        for img in H.vertices:
            h[v] = img
            if all((h[e.src], h[e.dst], e.label) in edges for e in checks[v]) and place(i + 1):
                return True
        del h[v]
        return False

    return place(0)


def worlds(edges):
    for bits in itertools.product((False, True), repeat=len(edges)):
        yield [e for e, b in zip(edges, bits) if b], dict(zip(edges, bits))


def world_weight(prob, valuation) -> Fraction:
    w = Fraction(1)
    for e, keep in valuation.items():
        w *= prob[e] if keep else 1 - prob[e]
    return w


def probability_by_worlds(P: ProbGraph, holds) -> Fraction:
    """Σ over all 2^|E| worlds of the world weight where ``holds(subgraph)``."""
    H = P.base
    total = Fraction(0)
    for kept, val in worlds(list(H.edges)):
        w = world_weight(P.prob, val)
        if w and holds(H.subgraph(kept)):
            total += w
    return total


def phom_by_worlds(G, P: ProbGraph) -> Fraction:
    return probability_by_worlds(P, lambda sub: hom_by_enumeration(G, sub))


def reaches(H: LabeledGraph, s, t) -> bool:
    seen, stack = {s}, [s]
    while stack:
        v = stack.pop()
        for e in H.out_edges(v):
            if e.dst not in seen:
                seen.add(e.dst)
                stack.append(e.dst)
    return t in seen


def walk_language_holds(dfa, H: LabeledGraph) -> bool:
    """Iterate the set of (vertex, state) pairs reachable by walks to a fixpoint."""
    current = {(v, dfa.initial) for v in H.vertices}
    while True:
        if any(q in dfa.accepting for _, q in current):
            return True
        nxt = set(current)
        for v, q in current:
            for e in H.out_edges(v):
                if e.label in dfa.alphabet:
                    nxt.add((e.dst, dfa.step(q, e.label)))
        if nxt == current:
            return False
        current = nxt


def nobdd_models(D) -> list:
    """All satisfying valuations of D over its order."""
    out = []
    for bits in itertools.product((0, 1), repeat=len(D.order)):
        nu = dict(zip(D.order, bits))
        if evaluate(D, nu):
            out.append(bits)
    return out


def wmc_by_enumeration(D, weights) -> Fraction:
    total = Fraction(0)
    for bits in itertools.product((0, 1), repeat=len(D.order)):
        nu = dict(zip(D.order, bits))
        if evaluate(D, nu):
            w = Fraction(1)
            for v, b in nu.items():
                q = Fraction(weights[v]) if v in weights else Fraction(1, 2)
                w *= q if b else 1 - q
            total += w
    return total


def dnf_by_enumeration(clauses, weights) -> Fraction:
    variables = sorted({e for c in clauses for e in c}, key=str)
    total = Fraction(0)
    for bits in itertools.product((0, 1), repeat=len(variables)):
        nu = dict(zip(variables, bits))
        if any(all(nu[e] for e in c) for c in clauses):
            w = Fraction(1)
            for v, b in nu.items():
                w *= weights[v] if b else 1 - weights[v]
            total += w
    return total


def sat_count(phi) -> int:
    return sum(all(a[i - 1] or a[j - 1] for i, j in phi.clauses)
               for a in itertools.product((False, True), repeat=phi.n))


# ------------------------------------------------------------ fixtures

def diamond(p=Fraction(1, 2), label=UNLABELLED) -> ProbGraph:
    edges = [Edge("s", "a", label), Edge("s", "b", label), Edge("a", "t", label),
             Edge("b", "t", label)]
    return ProbGraph(LabeledGraph(edges=edges), {e: Fraction(p) for e in edges})


# ------------------------------------------------------------ generators

def random_1wp(rng: random.Random, max_len=5, labels="RS") -> LabeledGraph:
    n = rng.randint(1, max_len)
    verts = [f"q{i}" for i in range(n + 1)]
    return LabeledGraph(verts, [Edge(verts[i], verts[i + 1], rng.choice(labels)) for i in range(n)])


def random_dag(rng: random.Random, max_edges=8, max_vertices=6, labels="RS") -> LabeledGraph:
    nv = rng.randint(2, max_vertices)
    verts = [f"h{i}" for i in range(nv)]
    pairs = [(i, j) for i in range(nv) for j in range(i + 1, nv)]
    rng.shuffle(pairs)
    m = rng.randint(1, min(max_edges, len(pairs)))
    perm = verts[:]
    rng.shuffle(perm)  # topological order differs from name order
    edges = [Edge(perm[i], perm[j], rng.choice(labels)) for i, j in pairs[:m]]
    return LabeledGraph(verts, edges)


def random_graph(rng: random.Random, max_edges=6, max_vertices=4, labels="RS",
                 loops=True) -> LabeledGraph:
    nv = rng.randint(1, max_vertices)
    verts = [f"h{i}" for i in range(nv)]
    pairs = [(a, b) for a in verts for b in verts if loops or a != b]
    rng.shuffle(pairs)
    m = rng.randint(0, min(max_edges, len(pairs)))
    return LabeledGraph(verts, [Edge(a, b, rng.choice(labels)) for a, b in pairs[:m]])


def random_tree(rng: random.Random, max_edges=6, labels="RS", downward=False,
                path=False) -> LabeledGraph:
    """Random polytree; ``downward`` orients edges away from the root,
    ``path`` makes the underlying tree a path."""
    m = rng.randint(0, max_edges)
    verts = ["t0"]
    edges = []
    for i in range(1, m + 1):
        parent = verts[-1] if path else rng.choice(verts)
        child = f"t{i}"
        verts.append(child)
        lab = rng.choice(labels)
        if downward or rng.random() < 0.5:
            edges.append(Edge(parent, child, lab))
        else:
            edges.append(Edge(child, parent, lab))
    return LabeledGraph(verts, edges)


def probabilize(rng: random.Random, H: LabeledGraph,
                choices=(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))) -> ProbGraph:
    return ProbGraph(H, {e: rng.choice(choices) for e in H.edges})


def random_nobdd(rng: random.Random, nvars=6, nodes=10, or_bias=0.3):
    """Random ordered nOBDD over variables v0..v{n-1}."""
    order = [f"v{i}" for i in range(nvars)]
    b = NobddBuilder()
    first = {SINK0: nvars, SINK1: nvars}  # smallest level tested below the node
    pool = [SINK0, SINK1]
    for _ in range(nodes):
        if rng.random() < or_bias:
            kids = rng.sample(pool, rng.randint(1, min(3, len(pool))))
            x = b.disjunction(kids)
            first[x] = min(first[k] for k in kids)
        else:
            top = min(first[k] for k in pool)
            level = rng.randint(0, max(0, top - 1)) if top > 0 else None
            if level is None:
                continue
            ok = [k for k in pool if first[k] > level]
            lo, hi = rng.choice(ok), rng.choice(ok)
            x = b.decision(order[level], lo, hi)
            first[x] = level
        pool.append(x)
    return b.build(pool[-1], order)


def random_weights(rng: random.Random, variables, max_den=7) -> dict:
    out = {}
    for v in variables:
        q = rng.randint(2, max_den)
        out[v] = Fraction(rng.randint(1, q - 1), q)
    return out


# ------------------------------------------------------------ languages

REGEX_CORPUS = [
    "a", "ab", "ab|ba", "a*b", "ab*c", "aa*", "a+b+", "(ab)*c", "a(bc)*d", "a|bb",
    "aa(bbba)*a", "(a|b)*c", "ab?c", "a(b|c)*a", "abc", "(ab|cd)+", "b*ab*", "a(ba)*",
    "c(a|b)(a|b)", "d|ab*c",
]


def all_words(sigma, max_length):
    for n in range(max_length + 1):
        for t in itertools.product(sorted(sigma), repeat=n):
            yield "".join(t)


def minimal_words(member, sigma, max_length):
    """Words of L (given by ``member``) with no strict infix in L."""
    out = set()
    for w in all_words(sigma, max_length):
        if member(w) and not any(member(w[i:j]) for i in range(len(w) + 1)
                                 for j in range(i, len(w) + 1) if (i, j) != (0, len(w))):
            out.add(w)
    return out
