import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pathprov.automata import regex_to_dfa
from pathprov.counting import EstimatorConfig
from pathprov.errors import AlphabetMismatch, BoundedLanguage, NotLocal, Unbounded
from pathprov.gadgets import pp2dnf_gadget
from pathprov.graph import Edge, GraphClass, LabeledGraph, ProbGraph, classify
from pathprov.rpq import (Rpq, bounded_provenance, brute_force_rpq_pqe, pqe_bounded,
                          pqe_disjoint_union, pump_decompose, rpq_eval, rpq_to_stcon,
                          stcon_to_rpq, to_local_dfa)
from pathprov.worlds import brute_force_reachability

from oracles import REGEX_CORPUS, diamond, probabilize, probability_by_worlds, random_graph, \
    walk_language_holds

seeds = st.integers(0, 2**32 - 1)
SIGMA = "abcd"
HALF = Fraction(1, 2)


def chain(*labels, probs=None):
    edges = [Edge(f"v{i}", f"v{i + 1}", a) for i, a in enumerate(labels)]
    probs = probs or [Fraction(1)] * len(edges)
    return ProbGraph(LabeledGraph(edges=edges), dict(zip(edges, map(Fraction, probs))))


# ------------------------------------------------------------ pump triples

@pytest.mark.parametrize("pattern, triple", [
    ("ab*c", ("a", "b", "c")),
    ("aa(bbba)*a", ("a", "abbb", "aa")),
    ("a(bc)*d", ("a", "bc", "d")),
])
def test_pump_pinned(pattern, triple):
    p = pump_decompose(Rpq(pattern))
    assert (p.x, p.y, p.z) == triple
    L = Rpq(pattern).minified
    assert p.y
    for n in range(7):
        assert L.accepts(p.x + p.y * n + p.z)


@pytest.mark.parametrize("pattern", [p for p in REGEX_CORPUS if not Rpq(p).is_bounded()])
def test_pump_valid_on_corpus(pattern):
    p = pump_decompose(Rpq(pattern))
    L = Rpq(pattern).minified
    assert p.y and all(L.accepts(p.x + p.y * n + p.z) for n in range(7))


def test_pump_rejects_bounded():
    with pytest.raises(BoundedLanguage):
        pump_decompose(Rpq("aa*"))


# ------------------------------------------------------------ evaluation

def test_rpq_eval_examples():
    assert rpq_eval(Rpq("a"), chain("a"))
    looped = LabeledGraph(edges=[Edge("u", "v", "a"), Edge("v", "v", "b"), Edge("v", "w", "c")])
    assert rpq_eval(Rpq("ab*c"), looped)
    assert rpq_eval(Rpq("abbbc"), looped)  # walks repeat the loop
    assert not rpq_eval(Rpq("ab*c"), chain("a", "b"))
    with pytest.raises(AlphabetMismatch):
        rpq_eval(Rpq("a"), chain("b"))


@given(seeds)
@settings(max_examples=100, deadline=None)
def test_rpq_eval_matches_walk_fixpoint_and_min(seed):
    rng = random.Random(seed)
    pattern = rng.choice(REGEX_CORPUS)
    L = regex_to_dfa(pattern, SIGMA)
    H = random_graph(rng, max_edges=6, labels=SIGMA)
    Q = Rpq(L)
    want = walk_language_holds(L, H)
    assert rpq_eval(Q, H) == want
    assert rpq_eval(Rpq(Q.minified), H) == want


# ------------------------------------------------------------ bounded PQE

def test_pqe_bounded_examples():
    P = chain("a", probs=[Fraction(2, 5)])
    assert pqe_bounded(Rpq("a"), P, exact=True).exact == Fraction(2, 5)
    H = LabeledGraph(edges=[Edge("u", "v", "a"), Edge("v", "w", "b"), Edge("w", "u", "a")])
    P2 = ProbGraph(H, {e: HALF for e in H.edges})
    want = brute_force_rpq_pqe(Rpq("ab|ba"), P2)
    assert pqe_bounded(Rpq("ab|ba"), P2, exact=True).exact == want == Fraction(3, 8)
    G, P3 = pp2dnf_gadget([(1, 1), (1, 2)])
    relab = {e: Edge(e.src, e.dst, "a" if e.src == "s" else "c" if e.dst == "t" else "b")
             for e in P3.edges}
    P4 = ProbGraph(LabeledGraph(edges=relab.values()), {relab[e]: p for e, p in P3.prob.items()})
    assert pqe_bounded(Rpq("abc"), P4, exact=True).exact == brute_force_rpq_pqe(Rpq("abc"), P4)
    assert pqe_bounded(Rpq(regex_to_dfa("ab", "ab")), chain("b"), exact=True).exact == 0
    with pytest.raises(Unbounded):
        bounded_provenance(Rpq("ab*c"), P)


def test_pqe_bounded_empty_language():
    empty = regex_to_dfa("a").intersect(regex_to_dfa("b"))
    assert pqe_bounded(Rpq(empty), chain("a"), exact=True).exact == 0


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_pqe_bounded_matches_worlds(seed):
    rng = random.Random(seed)
    pattern = rng.choice([p for p in REGEX_CORPUS if Rpq(p).is_bounded()])
    L = regex_to_dfa(pattern, SIGMA)
    P = probabilize(rng, random_graph(rng, max_edges=5, labels=SIGMA))
    want = probability_by_worlds(P, lambda sub: walk_language_holds(L, sub))
    assert pqe_bounded(Rpq(L), P, exact=True).exact == want


# ------------------------------------------------------------ ST-CON <-> RPQ

def test_stcon_to_rpq_single_edge():
    e = Edge("s", "t", "_")
    P = ProbGraph(LabeledGraph(edges=[e]), {e: Fraction(2, 3)})
    out = stcon_to_rpq(P, "s", "t", Rpq("ab*c"))
    assert sorted(e.label for e in out.edges) == ["a", "b", "c"]
    assert sorted(out.prob.values()) == [Fraction(2, 3), 1, 1]
    assert brute_force_rpq_pqe(Rpq("ab*c"), out) == Fraction(2, 3)


def test_stcon_to_rpq_diamond():
    out = stcon_to_rpq(diamond(), "s", "t", Rpq("ab*c"))
    assert brute_force_rpq_pqe(Rpq("ab*c"), out) == Fraction(7, 16)
    out2 = stcon_to_rpq(diamond(), "s", "t", Rpq("aa(bbba)*a"))
    assert brute_force_rpq_pqe(Rpq("aa(bbba)*a"), out2) == Fraction(7, 16)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_stcon_to_rpq_preserves_probability(seed):
    rng = random.Random(seed)
    H = random_graph(rng, max_edges=6, max_vertices=4, labels="_", loops=False)
    if len(H.vertices) < 2:
        return
    s, t = H.vertices[0], H.vertices[-1]
    P = probabilize(rng, H)
    pattern = rng.choice(["ab*c", "a(bc)*d", "aa(bbba)*a"])
    assert brute_force_rpq_pqe(Rpq(pattern), stcon_to_rpq(P, s, t, Rpq(pattern))) == \
        brute_force_reachability(P, s, t)


def test_rpq_to_stcon_examples():
    P = chain("a", "b", "c", probs=[1, HALF, 1])
    Pst, s, t = rpq_to_stcon(Rpq("ab*c"), P)
    assert Pst.alphabet == {"_"}
    assert brute_force_reachability(Pst, s, t) == HALF
    none = chain("b", "c", probs=[HALF, HALF])
    Pst, s, t = rpq_to_stcon(Rpq("ab*c"), none)
    assert brute_force_reachability(Pst, s, t) == 0
    with pytest.raises(NotLocal):
        rpq_to_stcon(Rpq("aa(bbba)*a"), P)
    with pytest.raises(NotLocal):
        to_local_dfa(Rpq("aa(bbbbbbbba)*a").minified)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_rpq_to_stcon_preserves_probability(seed):
    rng = random.Random(seed)
    P = probabilize(rng, random_graph(rng, max_edges=6, labels="abc"))
    pattern = rng.choice(["ab*c", "a", "ab", "(a|b)*c"])
    Q = Rpq(regex_to_dfa(pattern, "abc"))
    Pst, s, t = rpq_to_stcon(Q, P)
    assert brute_force_reachability(Pst, s, t) == brute_force_rpq_pqe(Q, P)


# ------------------------------------------------------------ disjoint union

def _union_truth(p1, p2, P):
    L = regex_to_dfa(p1, SIGMA).union(regex_to_dfa(p2, SIGMA))
    return brute_force_rpq_pqe(Rpq(L), P)


def test_union_examples():
    P = ProbGraph(LabeledGraph(edges=[Edge("u", "v", "d"), Edge("x", "y", "a")]),
                  {Edge("u", "v", "d"): HALF, Edge("x", "y", "a"): HALF})
    est = pqe_disjoint_union(Rpq("d"), Rpq("a"), P, exact=True)
    assert est.exact == Fraction(3, 4)
    zero = ProbGraph(P.base, {Edge("u", "v", "d"): Fraction(0), Edge("x", "y", "a"): HALF})
    assert pqe_disjoint_union(Rpq("d"), Rpq("a"), zero, exact=True).exact == HALF
    with pytest.raises(AlphabetMismatch):
        pqe_disjoint_union(Rpq("ab"), Rpq("b"), P)


def test_union_bounded_and_local():
    H = LabeledGraph(edges=[Edge("u", "v", "a"), Edge("v", "v", "b"), Edge("v", "w", "c"),
                            Edge("w", "u", "d"), Edge("u", "w", "d")])
    P = ProbGraph(H, {e: Fraction(i + 1, 6) for i, e in enumerate(H.edges)})
    want = _union_truth("d", "ab*c", P)
    assert pqe_disjoint_union(Rpq("d"), Rpq("ab*c"), P, exact=True).exact == want
    hits = sum(abs(pqe_disjoint_union(Rpq("d"), Rpq("ab*c"), P, EstimatorConfig(seed=s)).value
                   - float(want)) <= 0.1 * float(want) for s in range(20))
    assert hits >= 14


def test_classify_gadget_outputs_are_dags():
    Pst, _, _ = rpq_to_stcon(Rpq("ab*c"), chain("a", "b", "c"))
    assert GraphClass.Dag in classify(Pst.base)
