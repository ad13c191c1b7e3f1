"""Exhaustive possible-world oracles.

A block of up to 2**12 worlds is evaluated at once: each world is one bit of
a packed ``uint64`` vector, and an edge's presence across the block is such a
vector.  Query evaluation then becomes bitwise and/or over edge masks, which
keeps the exhaustive oracles usable on gadget instances with hundreds of
deterministic edges.
"""

from __future__ import annotations

import os
from collections import defaultdict
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import TooLarge
from .graph import Edge, LabeledGraph, base_graph, probabilities
from .homomorphism import forest_schedule, homomorphism_exists, is_forest

BLOCK_BITS = 12
DEFAULT_CAP = 24


def brute_force_cap() -> int:
    return int(os.environ.get("PATHPROV_BRUTE_CAP", DEFAULT_CAP))


def _pack(bits: np.ndarray) -> np.ndarray:
    packed = np.packbits(bits.astype(np.uint8), bitorder="little")
    pad = (-len(packed)) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros(pad, np.uint8)])
    return packed.view(np.uint64)


def _unpack(words: np.ndarray, n: int) -> np.ndarray:
    return np.unpackbits(words.view(np.uint8), bitorder="little")[:n].astype(bool)


class WorldBlock:
    """Edge masks for one block of worlds.

    ``variables`` are the uncertain edges (world bit j <-> variable j);
    edges in ``absent`` are missing in every world, all others present.
    """

    def __init__(self, variables: Sequence, absent, low: int, high_bits: int):
        self.n = 1 << low
        self.ones = _pack(np.ones(self.n, bool))
        self.zeros = np.zeros_like(self.ones)
        self.words = len(self.ones)
        idx = np.arange(self.n)
        self._mask = {}
        for j, v in enumerate(variables):
            if j < low:
                self._mask[v] = _pack((idx >> j) & 1)
            else:
                self._mask[v] = self.ones if (high_bits >> (j - low)) & 1 else self.zeros
        self._absent = absent

    def mask(self, e) -> np.ndarray:
        m = self._mask.get(e)
        if m is not None:
            return m
        return self.zeros if e in self._absent else self.ones


def truth_table(variables: Sequence, evaluate: Callable[[WorldBlock], np.ndarray],
                absent=frozenset()) -> np.ndarray:
    """Boolean array indexed by world number (bit j = variable j kept)."""
    k = len(variables)
    low = min(k, BLOCK_BITS)
    chunks = []
    for high in range(1 << (k - low)):
        block = WorldBlock(variables, absent, low, high)
        chunks.append(_unpack(evaluate(block), block.n))
    return np.concatenate(chunks)


def table_probability(table: np.ndarray, probs: Sequence) -> Fraction:
    """Exact total probability of the worlds marked in ``table``."""
    probs = [Fraction(p) for p in probs]
    k = len(probs)
    if k == 0:
        return Fraction(int(table[0]))
    arr = table.astype(object).reshape((2,) * k)
    denominator = 1
    # last axis is bit 0
    for p in probs:
        a, b = p.numerator, p.denominator
        arr = arr[..., 0] * (b - a) + arr[..., 1] * a
        denominator *= b
    return Fraction(int(arr), denominator)


class _HostIndex:
    """Host edges grouped by label and sorted for segmented reductions."""

    def __init__(self, H: LabeledGraph):
        self.vid = {v: i for i, v in enumerate(H.vertices)}
        self.nv = len(H.vertices)
        groups = defaultdict(list)
        for e in H.edges:
            groups[e.label].append(e)
        self.groups = {}
        for label, edges in groups.items():
            src = np.array([self.vid[e.src] for e in edges], dtype=np.int64)
            dst = np.array([self.vid[e.dst] for e in edges], dtype=np.int64)
            self.groups[label] = (edges, src, dst)
        self._sorted = {}

    def segments(self, label, key_by_src: bool):
        cache_key = (label, key_by_src)
        if cache_key not in self._sorted:
            edges, src, dst = self.groups[label]
            keys = src if key_by_src else dst
            order = np.argsort(keys, kind="stable")
            sk = keys[order]
            starts = np.flatnonzero(np.r_[True, sk[1:] != sk[:-1]])
            self._sorted[cache_key] = (order, sk[starts], starts)
        return self._sorted[cache_key]

    def pull(self, label, W, masks, toward_src: bool):
        """``out[u] = OR over edges (u -> v) of W[v] & mask`` (or reversed)."""
        out = np.zeros((self.nv, W.shape[1]), np.uint64)
        if label not in self.groups:
            return out
        edges, src, dst = self.groups[label]
        order, keys, starts = self.segments(label, toward_src)
        other = dst if toward_src else src
        contrib = W[other[order]] & masks[order]
        out[keys] = np.bitwise_or.reduceat(contrib, starts, axis=0)
        return out


def _edge_masks(edges, block: WorldBlock) -> np.ndarray:
    return np.stack([block.mask(e) for e in edges]) if edges else np.zeros((0, block.words), np.uint64)


def forest_query_evaluator(G: LabeledGraph, H: LabeledGraph):
    """World-parallel homomorphism test for a forest-shaped query."""
    host = _HostIndex(H)
    roots, steps = forest_schedule(G)

    def evaluate(block: WorldBlock) -> np.ndarray:
        if not H.vertices:
            return block.zeros.copy()
        masks = {lab: _edge_masks(grp[0], block) for lab, grp in host.groups.items()}
        ones = np.tile(block.ones, (host.nv, 1))
        W = {}
        for child, par, e, forward in steps:
            Wc = W.pop(child, ones)
            m = masks.get(e.label)
            support = host.pull(e.label, Wc, m, toward_src=forward) if m is not None \
                else np.zeros_like(ones)
            W[par] = W.get(par, ones) & support
        result = block.ones.copy()
        for r in roots:
            Wr = W.get(r, ones)
            result &= np.bitwise_or.reduce(Wr, axis=0)
        return result

    return evaluate


def per_world_evaluator(variables: Sequence, absent, test: Callable[[set], bool],
                        all_edges: Sequence):
    """Fallback: run ``test(kept_edges)`` world by world."""
    fixed = [e for e in all_edges if e not in set(variables) and e not in absent]

    def evaluate(block: WorldBlock) -> np.ndarray:
        bits = np.zeros(block.n, bool)
        present = {v: _unpack(block.mask(v), block.n) for v in variables}
        for w in range(block.n):
            kept = set(fixed)
            kept.update(v for v in variables if present[v][w])
            bits[w] = test(kept)
        return _pack(bits)

    return evaluate


def dfa_walk_evaluator(dfa, H: LabeledGraph):
    """World-parallel RPQ evaluation: least fixpoint on the product with the DFA."""
    host = _HostIndex(H)
    live = dfa.live_states()

    def evaluate(block: WorldBlock) -> np.ndarray:
        if not H.vertices or dfa.initial not in live:
            return block.zeros.copy()
        masks = {lab: _edge_masks(grp[0], block) for lab, grp in host.groups.items()}
        zeros = np.zeros((host.nv, block.words), np.uint64)
        ones = np.tile(block.ones, (host.nv, 1))
        W = {q: (ones if q in dfa.accepting else zeros) for q in live}
        changed = True
        while changed:
            changed = False
            for q in live:
                if q in dfa.accepting:
                    continue
                acc = W[q].copy()
                for label in host.groups:
                    if label not in dfa.alphabet:
                        continue
                    r = dfa.step(q, label)
                    if r not in live:
                        continue
                    acc |= host.pull(label, W[r], masks[label], toward_src=True)
                if not np.array_equal(acc, W[q]):
                    W[q] = acc
                    changed = True
        return np.bitwise_or.reduce(W[dfa.initial], axis=0)

    return evaluate


def reachability_evaluator(H: LabeledGraph, s: str, t: str):
    """World-parallel s-t reachability on a directed graph (cycles allowed)."""
    host = _HostIndex(H)

    def evaluate(block: WorldBlock) -> np.ndarray:
        R = np.zeros((host.nv, block.words), np.uint64)
        R[host.vid[s]] = block.ones
        masks = {lab: _edge_masks(grp[0], block) for lab, grp in host.groups.items()}
        while True:
            new = R.copy()
            for label in host.groups:
                new |= host.pull(label, R, masks[label], toward_src=False)
            if np.array_equal(new, R):
                return R[host.vid[t]]
            R = new

    return evaluate


def _split(P) -> tuple:
    probs = probabilities(P)
    variables = [e for e in base_graph(P).edges if 0 < probs[e] < 1]
    absent = frozenset(e for e in base_graph(P).edges if probs[e] == 0)
    return variables, absent, probs


def _check_cap(variables, cap):
    cap = brute_force_cap() if cap is None else cap
    if len(variables) > cap:
        raise TooLarge(f"{len(variables)} uncertain edges exceed the cap of {cap}")


def phom_truth_table(G: LabeledGraph, P, variables=None, absent=frozenset()) -> np.ndarray:
    """Worlds over ``variables`` (other edges fixed present) where G maps into H."""
    H = base_graph(P)
    G = base_graph(G)
    if variables is None:
        variables = list(H.edges)
    if is_forest(G):
        evaluate = forest_query_evaluator(G, H)
    else:
        evaluate = per_world_evaluator(
            variables, absent, lambda kept: homomorphism_exists(G, H.subgraph(kept)), H.edges)
    return truth_table(variables, evaluate, absent)


def brute_force_phom(G: LabeledGraph, P, cap: int | None = None) -> Fraction:
    """Exact Pr(G maps into a random subgraph of P) by world enumeration.

    Edges with probability 0 or 1 are not branched on (their other value has
    probability zero), so ``cap`` bounds the number of uncertain edges.
    """
    variables, absent, probs = _split(P)
    _check_cap(variables, cap)
    table = phom_truth_table(G, P, variables, absent)
    return table_probability(table, [probs[e] for e in variables])


def rpq_truth_table(dfa, P, variables=None, absent=frozenset()) -> np.ndarray:
    H = base_graph(P)
    if variables is None:
        variables = list(H.edges)
    return truth_table(variables, dfa_walk_evaluator(dfa, H), absent)


def brute_force_rpq_probability(dfa, P, cap: int | None = None) -> Fraction:
    variables, absent, probs = _split(P)
    _check_cap(variables, cap)
    table = rpq_truth_table(dfa, P, variables, absent)
    return table_probability(table, [probs[e] for e in variables])


def brute_force_reachability(P, s: str, t: str, cap: int | None = None) -> Fraction:
    variables, absent, probs = _split(P)
    _check_cap(variables, cap)
    H = base_graph(P)
    table = truth_table(variables, reachability_evaluator(H, s, t), absent)
    return table_probability(table, [probs[e] for e in variables])


def edge_of(token) -> Edge:
    return token if isinstance(token, Edge) else Edge.from_token(token)
