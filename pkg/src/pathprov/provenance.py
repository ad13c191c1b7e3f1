"""DNF provenance of small queries and the brute-force "represents" check."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainMismatch, TooLarge
from .graph import Edge, LabeledGraph, base_graph
from .homomorphism import iter_homomorphisms
from .worlds import brute_force_cap, phom_truth_table, rpq_truth_table

DEFAULT_QUERY_CAP = 12


@dataclass(frozen=True)
class DnfProvenance:
    """Disjunction of conjunctions of edge variables."""

    clauses: frozenset
    universe: tuple

    def __post_init__(self):
        object.__setattr__(self, "clauses", frozenset(frozenset(c) for c in self.clauses))
        object.__setattr__(self, "universe", tuple(self.universe))
        known = set(self.universe)
        for c in self.clauses:
            if not c <= known:
                raise DomainMismatch("clause mentions an edge outside the universe")

    def holds(self, kept: Iterable) -> bool:
        kept = set(kept)
        return any(c <= kept for c in self.clauses)

    def ordered_clauses(self) -> list:
        """Clauses as sorted tuples, in a deterministic order."""
        rank = {e: i for i, e in enumerate(self.universe)}
        keyed = sorted(tuple(sorted(rank[e] for e in c)) for c in self.clauses)
        return [tuple(self.universe[i] for i in c) for c in keyed]

    def __len__(self):
        return len(self.clauses)


def enumerate_matches(G: LabeledGraph, H, cap: int = DEFAULT_QUERY_CAP) -> DnfProvenance:
    """One clause per distinct edge image of a homomorphism G -> H."""
    G = base_graph(G)
    Hb = base_graph(H)
    if G.size > cap:
        raise TooLarge(f"query has {G.size} edges, cap is {cap}")
    clauses = set()
    for h in iter_homomorphisms(G, Hb):
        clauses.add(frozenset(Edge(h[e.src], h[e.dst], e.label) for e in G.edges))
    return DnfProvenance(frozenset(clauses), Hb.edges)


def represents_check(query, H, distinguished: Sequence, phi, cap: int | None = None) -> bool:
    """Does the query's provenance on H, restricted to the distinguished
    edges (all other edges kept), coincide with the monotone CNF ``phi``?

    ``query`` is a LabeledGraph (homomorphism semantics) or anything
    carrying a DFA (an Rpq or a Dfa; walk semantics).
    """
    Hb = base_graph(H)
    distinguished = list(distinguished)
    if len(distinguished) != phi.n:
        raise DomainMismatch(f"{len(distinguished)} distinguished edges for {phi.n} variables")
    if len(set(distinguished)) != len(distinguished) or any(e not in Hb for e in distinguished):
        raise DomainMismatch("distinguished edges must be distinct edges of the instance")
    cap = brute_force_cap() if cap is None else cap
    if phi.n > cap:
        raise TooLarge(f"{phi.n} distinguished edges exceed the cap of {cap}")
    if isinstance(query, LabeledGraph):
        table = phom_truth_table(query, Hb, distinguished)
    else:
        dfa = getattr(query, "language", query)
        table = rpq_truth_table(dfa, Hb, distinguished)
    return bool(np.array_equal(table, phi.truth_table()))
