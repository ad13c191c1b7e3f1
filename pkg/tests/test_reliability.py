import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pathprov.counting import EstimatorConfig, exact_count
from pathprov.errors import CycleError, DomainMismatch
from pathprov.graph import Edge, LabeledGraph, ProbGraph, one_way_path_labels
from pathprov.nobdd import evaluate
from pathprov.reliability import (R, R_S, R_ST, R_T, StconInstance, longest_path_length,
                                  relabel_for_stcon, stcon_brute, stcon_compile, stcon_estimate,
                                  stcon_query_family)

from oracles import diamond, probabilize, random_dag, reaches, worlds

seeds = st.integers(0, 2**32 - 1)
HALF = Fraction(1, 2)


def graph(*pairs, p=HALF):
    edges = [Edge(a, b, "_") for a, b in pairs]
    return ProbGraph(LabeledGraph(edges=edges), {e: Fraction(p) for e in edges})


def test_instance_validation():
    with pytest.raises(DomainMismatch):
        StconInstance(diamond(), "s", "s")
    with pytest.raises(DomainMismatch):
        StconInstance(diamond(), "s", "nowhere")


def test_relabel_examples():
    P, back = relabel_for_stcon(StconInstance(graph(("s", "t")), "s", "t"))
    assert [e.label for e in P.edges] == [R_ST]
    P, back = relabel_for_stcon(StconInstance(diamond(), "s", "t"))
    assert Counter(e.label for e in P.edges) == {R_S: 2, R_T: 2}
    assert set(back.values()) == set(diamond().edges)
    with pytest.raises(CycleError):
        relabel_for_stcon(StconInstance(graph(("s", "t"), ("t", "s")), "s", "t"))


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_relabel_depends_only_on_terminals(seed):
    rng = random.Random(seed)
    H = random_dag(rng, labels="_")
    s, t = rng.sample(H.vertices, 2)
    P, back = relabel_for_stcon(StconInstance(ProbGraph(H), s, t))
    for f, e in back.items():
        want = {(True, True): R_ST, (True, False): R_S, (False, True): R_T,
                (False, False): R}[(e.src == s, e.dst == t)]
        assert f.label == want and (f.src, f.dst) == (e.src, e.dst)


def test_query_family_examples():
    fam = stcon_query_family(StconInstance(graph(("s", "t")), "s", "t"))
    assert [one_way_path_labels(G) for G in fam] == [[R_ST]]
    I = StconInstance(diamond(), "s", "t")
    assert [one_way_path_labels(G) for G in stcon_query_family(I)] == [[R_S, R_T]]
    uncapped = stcon_query_family(I, capped=False)
    assert [G.size for G in uncapped] == [2, 3, 4]
    assert stcon_query_family(StconInstance(graph(("t", "s")), "s", "t")) == []


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_query_family_size_bound(seed):
    rng = random.Random(seed)
    H = random_dag(rng, labels="_")
    s, t = rng.sample(H.vertices, 2)
    I = StconInstance(ProbGraph(H), s, t)
    fam = stcon_query_family(I, capped=False)
    assert len(fam) <= H.size
    assert len(stcon_query_family(I)) <= len(fam)
    longest = longest_path_length(H, s, t)
    assert (longest is None) == (fam == [])


def test_compile_examples():
    P = graph(("s", "t"), p=Fraction(2, 7))
    assert exact_count(stcon_compile(StconInstance(P, "s", "t")), P.prob) == Fraction(2, 7)
    I = StconInstance(diamond(), "s", "t")
    assert exact_count(stcon_compile(I), diamond().prob) == Fraction(7, 16)
    chain = graph(("s", "a"), ("a", "b"), ("b", "t"))
    assert exact_count(stcon_compile(StconInstance(chain, "s", "t")), chain.prob) == Fraction(1, 8)


@given(seeds)
@settings(max_examples=80, deadline=None)
def test_compile_accepts_exactly_connected_worlds(seed):
    rng = random.Random(seed)
    H = random_dag(rng, max_edges=7, labels="_")
    s, t = rng.sample(H.vertices, 2)
    D = stcon_compile(StconInstance(ProbGraph(H), s, t))
    assert D.check_order()
    for kept, val in worlds(list(H.edges)):
        nu = {e: val[e] for e in D.order}
        assert evaluate(D, nu) == reaches(H.subgraph(kept), s, t)


def test_estimate_examples():
    I = StconInstance(diamond(), "s", "t")
    assert stcon_estimate(I, exact=True).exact == Fraction(7, 16)
    hits = sum(0.9 * 7 / 16 <= stcon_estimate(I, EstimatorConfig(seed=s)).value <= 1.1 * 7 / 16
               for s in range(100))
    assert hits >= 75
    sure = StconInstance(graph(("s", "a"), ("a", "t"), ("s", "t"), p=1), "s", "t")
    assert stcon_estimate(sure).value == 1
    cut = StconInstance(graph(("s", "a"), ("t", "a")), "s", "t")
    est = stcon_estimate(cut)
    assert est.value == 0 and est.exact == 0


def test_brute_general_digraph():
    P = graph(("s", "t"), ("t", "s"), ("s", "u"), ("u", "t"))
    assert stcon_brute(StconInstance(P, "s", "t")) == Fraction(5, 8)
    assert stcon_brute(StconInstance(graph(("s", "t"), p=Fraction(1, 3)), "s", "t")) == Fraction(1, 3)
    assert stcon_brute(StconInstance(diamond(), "s", "t")) == Fraction(7, 16)


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_exact_matches_brute(seed):
    rng = random.Random(seed)
    P = probabilize(rng, random_dag(rng, max_edges=8, labels="_"))
    s, t = rng.sample(P.vertices, 2)
    I = StconInstance(P, s, t)
    assert stcon_estimate(I, exact=True).exact == stcon_brute(I)
