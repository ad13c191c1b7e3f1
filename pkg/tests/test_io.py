import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pathprov.errors import ParseError
from pathprov.graph import ArityTwoDb, Edge
from pathprov.io import format_graph, format_weights, parse_graph, parse_query, parse_weights

from oracles import probabilize, random_graph

seeds = st.integers(0, 2**32 - 1)


def test_parse_graph_basics():
    gf = parse_graph("# demo\nvertex lonely\nedge s a R 1/2\nedge a t S 0.25\nedge t u R\n"
                     "distinguished s>a:R\n")
    assert gf.base.vertices == ("lonely", "s", "a", "t", "u")
    assert gf.graph.prob[Edge("a", "t", "S")] == Fraction(1, 4)
    assert gf.graph.prob[Edge("t", "u", "R")] == 1
    assert gf.distinguished == [Edge("s", "a", "R")]
    assert gf.has_probabilities


def test_parse_arity_two():
    gf = parse_graph("tedge a R b\ntedge a S b 1/3\n")
    assert isinstance(gf.base, ArityTwoDb) and gf.base.size == 2


@pytest.mark.parametrize("text", [
    "edge a b\n",
    "edge a b R 3/2\n",
    "edge a>x b R\n",
    "edge a b R\nedge a b S\n",
    "edge a b R\ndistinguished a>c:R\n",
    "distinguished oops\n",
    "node a\n",
])
def test_parse_graph_errors(text):
    with pytest.raises(ParseError):
        parse_graph(text)


def test_query_files():
    assert parse_query("edge x y R\n").graph.size == 1
    q = parse_query("# comment\nregex a b*c\n")
    assert q.is_rpq and q.pattern == "a b*c"
    d = parse_query("dfa\nstates 2\nalphabet a\nstart 0\naccept 1\ntrans 0 a 1\n")
    assert d.is_rpq and d.dfa.accepts("a")
    with pytest.raises(ParseError):
        parse_query("edge x y R 1/2\n")
    with pytest.raises(ParseError):
        parse_query("regex a\nregex b\n")


def test_weights_round_trip():
    w = {"x": Fraction(1, 3), "y": Fraction(1)}
    assert parse_weights(format_weights(w)) == w
    with pytest.raises(ParseError):
        parse_weights("weight x\n")
    with pytest.raises(ParseError):
        parse_weights("weight x 2\n")


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_graph_round_trip(seed):
    rng = random.Random(seed)
    P = probabilize(rng, random_graph(rng, max_edges=6, max_vertices=5))
    dist = rng.sample(list(P.edges), min(2, P.size))
    gf = parse_graph(format_graph(P, dist))
    assert gf.graph == P and gf.distinguished == dist
