"""Regular path queries: evaluation, probabilistic evaluation and the
reductions to and from two-terminal reliability."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property

from .automata import Dfa, is_local, minify, regex_to_dfa, to_local_dfa_unchecked
from .counting import Estimate, EstimatorConfig, dnf_exact, karp_luby_dnf
from .errors import (AlphabetMismatch, BoundedLanguage, NotLocal, TooLarge, Unanswerable,
                     Unbounded)
from .graph import (UNLABELLED, Edge, LabeledGraph, ProbGraph, base_graph, is_dag,
                    path_graph, probabilities)
from .provenance import DnfProvenance, enumerate_matches
from .worlds import brute_force_reachability, brute_force_rpq_probability


class Rpq:
    """RPQ(L) for a regular language given as a DFA or a regex."""

    def __init__(self, language: Dfa | str):
        self.language = regex_to_dfa(language) if isinstance(language, str) else language.minimized()

    @cached_property
    def minified(self) -> Dfa:
        return minify(self.language)

    @property
    def alphabet(self) -> tuple:
        return self.language.alphabet

    def is_bounded(self) -> bool:
        return self.minified.is_finite()

    def is_local(self) -> bool:
        return is_local(self.minified)

    def __repr__(self):
        return f"Rpq({self.language!r})"


def as_rpq(Q) -> Rpq:
    return Q if isinstance(Q, Rpq) else Rpq(Q)


@dataclass(frozen=True)
class PumpTriple:
    x: str
    y: str
    z: str


def to_local_dfa(dfa: Dfa) -> Dfa:
    """Local automaton (init, one state per letter, sink) recognising L."""
    local = to_local_dfa_unchecked(dfa)
    if not local.equivalent(dfa):
        raise NotLocal("language is not local")
    return local


def _shortlex_paths(dfa: Dfa, start: int, live: set, first_step: bool = False) -> dict:
    """Shortlex-least word from ``start`` to each live state (BFS)."""
    best = {} if first_step else {start: ""}
    queue = deque()
    if first_step:
        for a in dfa.alphabet:
            r = dfa.step(start, a)
            if r in live and r not in best:
                best[r] = a
                queue.append(r)
    else:
        queue.append(start)
    while queue:
        q = queue.popleft()
        for a in dfa.alphabet:
            r = dfa.step(q, a)
            if r in live and r not in best:
                best[r] = best[q] + a
                queue.append(r)
    return best


def _shortlex_key(w: str):
    return (len(w), w)


def pump_decompose(L: Dfa | Rpq) -> PumpTriple:
    """Words x, y, z with every ``x y^n z`` in the (minified) language."""
    dfa = as_rpq(L).minified
    if dfa.is_finite():
        raise BoundedLanguage("language is finite")
    live = dfa.live_states()
    to = _shortlex_paths(dfa, dfa.initial, live)
    cycles = {}
    for q in live:
        back = _shortlex_paths(dfa, q, live, first_step=True)
        if q in back:
            cycles[q] = back[q]
    q = min(cycles, key=lambda s: (_shortlex_key(to[s]), s))
    y = cycles[q]
    ends = _shortlex_paths(dfa, q, live)
    z = min((w for r, w in ends.items() if r in dfa.accepting), key=_shortlex_key)
    return PumpTriple(to[q], y, z)


def _check_alphabet(dfa: Dfa, H):
    extra = set(base_graph(H).alphabet) - set(dfa.alphabet)
    if extra:
        raise AlphabetMismatch(f"labels {sorted(extra)} are not in the query alphabet")


def rpq_eval(Q, H) -> bool:
    """Does some walk of H spell a word of L?  Product-graph reachability."""
    dfa = as_rpq(Q).language
    Hb = base_graph(H)
    _check_alphabet(dfa, Hb)
    live = dfa.live_states()
    if dfa.initial not in live:
        return False
    seen = {(v, dfa.initial) for v in Hb.vertices}
    queue = deque(seen)
    while queue:
        v, q = queue.popleft()
        if q in dfa.accepting:
            return True
        for e in Hb.out_edges(v):
            r = dfa.step(q, e.label)
            if r in live and (e.dst, r) not in seen:
                seen.add((e.dst, r))
                queue.append((e.dst, r))
    return False


def bounded_provenance(Q, P) -> DnfProvenance:
    """DNF over P's edges: one clause per walk spelling a word of Min(L)."""
    dfa = as_rpq(Q).minified
    if not dfa.is_finite():
        raise Unbounded("minified language is infinite")
    H = base_graph(P)
    clauses = set()
    for word in dfa.words():
        if word == "":
            if H.vertices:
                clauses.add(frozenset())
            continue
        clauses |= enumerate_matches(path_graph(word), H, cap=max(len(word), 12)).clauses
    return DnfProvenance(frozenset(clauses), H.edges)


def pqe_bounded(Q, P, cfg: EstimatorConfig = EstimatorConfig(), exact: bool = False) -> Estimate:
    """Probability that a bounded RPQ holds: Karp-Luby on its DNF provenance."""
    F = bounded_provenance(Q, P)
    weights = probabilities(P)
    if exact:
        value = dnf_exact(F, weights)
        return Estimate(float(value), value, 0, True)
    return karp_luby_dnf(F, weights, cfg)


def brute_force_rpq_pqe(Q, P, cap: int | None = None) -> Fraction:
    return brute_force_rpq_probability(as_rpq(Q).language, P, cap)


class _Names:
    """Fresh vertex names avoiding an existing set."""

    def __init__(self, taken):
        self.taken = set(taken)

    def __call__(self, hint: str) -> str:
        name, k = hint, 0
        while name in self.taken:
            k += 1
            name = f"{hint}.{k}"
        self.taken.add(name)
        return name


def stcon_to_rpq(P, s: str, t: str, Q) -> ProbGraph:
    """Labelled instance whose RPQ probability equals Pr(s reaches t) in P.

    An x-path leads into s, a z-path leaves t, and each edge becomes a
    y-path whose first edge keeps the original probability.
    """
    pump = pump_decompose(as_rpq(Q))
    x, y, z = pump.x, pump.y, pump.z
    H = base_graph(P)
    probs = probabilities(P)
    fresh = _Names(H.vertices)
    edges, prob = [], {}

    def chain(src, dst, word, first_prob):
        nodes = [src] + [fresh(f"{src}~{dst}~{i}") for i in range(1, len(word))] + [dst]
        for i, a in enumerate(word):
            e = Edge(nodes[i], nodes[i + 1], a)
            edges.append(e)
            prob[e] = first_prob if i == 0 else Fraction(1)

    chain(fresh("x_i"), s, x, Fraction(1))
    for e in H.edges:
        chain(e.src, e.dst, y, probs[e])
    chain(t, fresh("x_e"), z, Fraction(1))
    vertices = list(H.vertices) + sorted({v for e in edges for v in (e.src, e.dst)} - set(H.vertices))
    return ProbGraph(LabeledGraph(vertices, edges), prob)


SOURCE, TARGET = "@s", "@t"


def rpq_to_stcon(Q, P) -> tuple[ProbGraph, str, str]:
    """Unlabelled instance and terminals with Pr(s reaches t) = Pr(Q holds on P).

    Requires a local minified language.  Vertices pair an instance vertex
    with a state of the local automaton; each instance edge becomes one
    probabilistic edge between a private entry and exit vertex.
    """
    dfa = as_rpq(Q).minified
    local = to_local_dfa(dfa)
    H = base_graph(P)
    probs = probabilities(P)
    sink = local.n - 1
    states = [q for q in range(local.n) if q != sink]

    def pair(u, q):
        return f"{u}@{local.names[q]}"

    vertices = [SOURCE, TARGET] + [pair(u, q) for u in H.vertices for q in states]
    edges, prob = [], {}

    def add(src, dst, p=Fraction(1)):
        e = Edge(src, dst, UNLABELLED)
        edges.append(e)
        prob[e] = p

    for u in H.vertices:
        add(SOURCE, pair(u, local.initial))
        for q in states:
            if q in local.accepting:
                add(pair(u, q), TARGET)
    for j, e in enumerate(H.edges):
        if e.label not in local.alphabet:
            continue
        # every non-sink transition on a letter a leads to q_a
        qa = 1 + local.alphabet.index(e.label)
        mid_in, mid_out = f"@in{j}", f"@out{j}"
        vertices += [mid_in, mid_out]
        add(mid_in, mid_out, probs[e])
        for q in states:
            if local.step(q, e.label) != sink:
                add(pair(e.src, q), mid_in)
        add(mid_out, pair(e.dst, qa))
    return ProbGraph(LabeledGraph(vertices, edges), prob), SOURCE, TARGET


def _component(Q: Rpq, P, cfg: EstimatorConfig, exact: bool) -> Estimate:
    if Q.is_bounded():
        return pqe_bounded(Q, P, cfg, exact)
    if Q.is_local():
        from .reliability import StconInstance, stcon_estimate

        Pst, s, t = rpq_to_stcon(Q, P)
        if is_dag(base_graph(Pst)):
            return stcon_estimate(StconInstance(Pst, s, t), cfg, exact=exact)
        try:
            value = brute_force_reachability(Pst, s, t)
        except TooLarge as exc:
            raise Unanswerable("cyclic instance beyond the exhaustive cap") from exc
        return Estimate(float(value), value, 0, True)
    raise Unanswerable("component is neither bounded nor local")


def pqe_disjoint_union(Q1, Q2, P, cfg: EstimatorConfig = EstimatorConfig(),
                       exact: bool = False) -> Estimate:
    """Pr(L1 | L2) for disjoint alphabets via ``p1 + p2 - p1 p2``."""
    Q1, Q2 = as_rpq(Q1), as_rpq(Q2)
    if set(Q1.alphabet) & set(Q2.alphabet):
        raise AlphabetMismatch("component alphabets overlap")
    parts = []
    for k, Q in enumerate((Q1, Q2)):
        sub = replace(cfg, epsilon=cfg.epsilon / 4, delta=cfg.delta / 2,
                      seed=(cfg.seed * 2 + k) & ((1 << 63) - 1))
        parts.append(_component(Q, P, sub, exact))
    a, b = parts
    value = a.value + b.value - a.value * b.value
    ex = a.exact + b.exact - a.exact * b.exact if a.exact is not None and b.exact is not None else None
    return Estimate(float(ex) if ex is not None else value, ex, a.samples + b.samples,
                    a.converged and b.converged)
