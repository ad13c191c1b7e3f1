"""Exact and approximate (weighted) model counting."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import BudgetExceeded, MissingVariable, TooFewBits, WeightOutOfRange
from .graph import base_graph, probabilities
from .homomorphism import homomorphism_exists
from .nobdd import DEC, OR, S1, SINK0, SINK1, Nobdd, NobddBuilder, complete, condition
from .provenance import DnfProvenance

DEFAULT_BUDGET = 1 << 22
HALF = Fraction(1, 2)


def _weight(weights, v) -> Fraction:
    if weights is None:
        return HALF
    try:
        return Fraction(weights[v])
    except KeyError:
        raise MissingVariable(f"no weight for variable {v}") from None


# ---------------------------------------------------------------- exact

def _closure(D: Nobdd, nodes) -> frozenset | None:
    """Decision nodes reachable through or-nodes; None if the 1-sink is."""
    out, seen, stack = set(), set(), list(nodes)
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        kind = D.kind[x]
        if kind == DEC:
            out.add(x)
        elif kind == OR:
            stack.extend(D.kids[x])
        elif kind == S1:
            return None
    return frozenset(out)


def exact_count(D: Nobdd, weights: Mapping | None = None,
                budget: int = DEFAULT_BUDGET) -> Fraction:
    """Weighted model count of D; with ``weights=None``, the plain model
    count over ``D.order``.

    Determinizes on the fly: a state is the set of decision nodes the run
    may currently be at, all testing variables not yet decided.  The next
    variable is the smallest one tested in the state; skipped variables sum
    out to 1.
    """
    if weights is None:
        return exact_count(D, {v: HALF for v in D.variables()}, budget) * (1 << len(D.order))
    w = {v: _weight(weights, v) for v in D.variables()}
    pos = D.position
    memo: dict = {None: Fraction(1), frozenset(): Fraction(0)}
    start = _closure(D, [D.root])
    stack = [start]
    while stack:
        S = stack[-1]
        if S in memo:
            stack.pop()
            continue
        p = min(pos[D.var[x]] for x in S)
        here = [x for x in S if pos[D.var[x]] == p]
        rest = [x for x in S if pos[D.var[x]] != p]
        S0 = _closure(D, rest + [D.lo[x] for x in here])
        S1_ = _closure(D, rest + [D.hi[x] for x in here])
        todo = [T for T in (S0, S1_) if T not in memo]
        if todo:
            stack.extend(todo)
            continue
        q = w[D.order[p]]
        memo[S] = q * memo[S1_] + (1 - q) * memo[S0]
        stack.pop()
        if len(memo) > budget:
            raise BudgetExceeded(f"determinization exceeded {budget} states")
    return memo[start]


def model_count(D: Nobdd, budget: int = DEFAULT_BUDGET) -> int:
    return int(exact_count(D, None, budget))


def weights_from(P) -> dict:
    """Edge probabilities of a probabilistic graph, as a weight map."""
    return dict(probabilities(P))


def condition_pinned(D: Nobdd, weights: Mapping) -> tuple[Nobdd, dict]:
    """Drop variables whose weight is exactly 0 or 1 by conditioning."""
    pinned = {v: weights[v] == 1 for v in D.order if v in weights and weights[v] in (0, 1)}
    rest = {v: Fraction(weights[v]) for v in D.order if v in weights and v not in pinned}
    return condition(D, pinned), rest


# ---------------------------------------------------- unweighted transform

class FreshBit(NamedTuple):
    """Comparator bit ``index`` attached to the weighted variable ``var``."""

    var: object
    index: int

    def __str__(self):
        return f"{self.var}#{self.index}"


def _comparator_into(b: NobddBuilder, n: int, bits: Sequence, accept: int,
                     reject: int = SINK0) -> int:
    """Comparator nodes in ``b``: accepts ``x < n`` (MSB first) into ``accept``."""
    k = len(bits)
    if n > (1 << k):
        raise TooFewBits(f"{k} bits cannot express {n} models")
    true_chain = [0] * (k + 1)
    true_chain[k] = accept
    for j in range(k - 1, -1, -1):
        true_chain[j] = b.decision(bits[j], true_chain[j + 1], true_chain[j + 1])
    if n == (1 << k):
        return true_chain[0]
    tight = reject  # prefix equal to n's so far, at level k: not strictly less
    for j in range(k - 1, -1, -1):
        bit = (n >> (k - 1 - j)) & 1
        if bit:
            tight = b.decision(bits[j], true_chain[j + 1], tight)
        else:
            tight = b.decision(bits[j], tight, reject)
    return tight


def build_comparator(n: int, variables: Sequence) -> Nobdd:
    """OBDD on ``variables`` accepting the assignments whose binary value,
    most significant bit first, is strictly below ``n``."""
    if n < 1:
        raise ValueError("comparator needs n >= 1")
    b = NobddBuilder()
    root = _comparator_into(b, n, list(variables), SINK1)
    return complete(b.build(root, variables))


def bits_needed(p: int, q: int) -> int:
    """``ceil(log2(d + 1))`` with ``d = max(p, q - p)``."""
    return max(p, q - p).bit_length()


@dataclass(frozen=True)
class Unweighted:
    nobdd: Nobdd
    normalizer: int

    @property
    def log2_normalizer(self) -> float:
        return math.log2(self.normalizer) if self.normalizer else float("-inf")


def weighted_to_unweighted(D: Nobdd, weights: Mapping) -> Unweighted:
    """Unweighted nOBDD D' and integer N with MC(D') / N = WMC(D, weights).

    Every weight must lie strictly between 0 and 1; condition pinned
    variables away first (see ``condition_pinned``).
    """
    w = {}
    for v in D.order:
        q = _weight(weights, v)
        if not 0 < q < 1:
            raise WeightOutOfRange(f"weight of {v} is {q}; condition it away first")
        w[v] = q
    D = complete(D)
    bits = {v: [FreshBit(v, j) for j in range(bits_needed(q.numerator, q.denominator))]
            for v, q in w.items()}
    order = [x for v in D.order for x in (v, *bits[v])]
    b = NobddBuilder()
    ids = {SINK0: SINK0, SINK1: SINK1}
    spliced = {}

    def splice(v, n, target):
        key = (v, n, target)
        if key not in spliced:
            spliced[key] = _comparator_into(b, n, bits[v], target)
        return spliced[key]

    for i in range(2, len(D)):
        if D.kind[i] == DEC:
            v = D.var[i]
            p, q = w[v].numerator, w[v].denominator
            ids[i] = b.decision(v, splice(v, q - p, ids[D.lo[i]]), splice(v, p, ids[D.hi[i]]))
        else:
            ids[i] = b.disjunction(ids[c] for c in D.kids[i])
    normalizer = math.prod(q.denominator for q in w.values())
    return Unweighted(complete(b.build(ids[D.root], order)), normalizer)


# ------------------------------------------------------------ estimation

@dataclass(frozen=True)
class EstimatorConfig:
    epsilon: float = 0.1
    delta: float = 0.25
    seed: int = 0
    max_samples: int = 10_000_000
    workers: int = 1

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    @property
    def batch_size(self) -> int:
        return math.ceil(3 / self.epsilon ** 2)

    @property
    def batches(self) -> int:
        return 6 * math.ceil(math.log(1 / self.delta))


@dataclass(frozen=True)
class Estimate:
    value: float
    exact: Fraction | None = None
    samples: int = 0
    converged: bool = True
    batch_means: tuple = ()

    def __float__(self):
        return self.value


def _batch_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed & ((1 << 64) - 1), index])


def _run_batches(fn, count: int, workers: int) -> list:
    if workers <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))  # map keeps index order


class _Compiled:
    """Array view of an nOBDD with suffix weights, for the path sampler."""

    def __init__(self, D: Nobdd, weights: Mapping):
        self.D = D
        self.n = len(D)
        self.nvars = len(D.order)
        self.w = np.array([float(_weight(weights, v)) if v in D.variables() else 0.5
                           for v in D.order])
        self.var = np.array([D.position[D.var[i]] if D.kind[i] == DEC else -1
                             for i in range(self.n)])
        W = np.zeros(self.n)
        W[SINK1] = 1.0
        for i in range(2, self.n):
            if D.kind[i] == DEC:
                q = self.w[self.var[i]]
                W[i] = q * W[D.hi[i]] + (1 - q) * W[D.lo[i]]
            else:
                W[i] = sum(W[c] for c in D.kids[i])
        self.W = W
        self.total = W[D.root]
        # or-node child distributions
        self.kid_arr = {}
        for i in range(2, self.n):
            if D.kind[i] == OR and W[i] > 0:
                kids = np.array(D.kids[i], dtype=np.int64)
                self.kid_arr[i] = (kids, np.cumsum(W[kids]) / W[i])

    def sample_paths(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Valuations (size x nvars) drawn with the path-weight distribution."""
        D = self.D
        nu = rng.random((size, self.nvars)) < self.w
        cur = np.full(size, D.root, dtype=np.int64)
        active = cur > SINK1
        while active.any():
            x = int(cur[active].max())
            idx = np.flatnonzero(cur == x)
            u = rng.random(len(idx))
            if D.kind[x] == DEC:
                hi, lo = D.hi[x], D.lo[x]
                p_hi = self.w[self.var[x]] * self.W[hi] / self.W[x]
                take = u < p_hi
                nu[idx, self.var[x]] = take
                cur[idx] = np.where(take, hi, lo)
            else:
                kids, cdf = self.kid_arr[x]
                pick = np.minimum(np.searchsorted(cdf, u, side="right"), len(kids) - 1)
                cur[idx] = kids[pick]
            active = cur > SINK1
        return nu

    def multiplicity(self, nu: np.ndarray) -> np.ndarray:
        """Accepting paths compatible with each valuation row."""
        D = self.D
        M = np.zeros((self.n, nu.shape[0]))
        M[SINK1] = 1.0
        for i in range(2, self.n):
            if D.kind[i] == DEC:
                M[i] = np.where(nu[:, self.var[i]], M[D.hi[i]], M[D.lo[i]])
            elif D.kids[i]:
                M[i] = M[list(D.kids[i])].sum(axis=0)
        return M[D.root]


def estimate_nobdd(D: Nobdd, weights: Mapping | None, cfg: EstimatorConfig = EstimatorConfig()
                   ) -> Estimate:
    """Median-of-means of the multiplicity-corrected path sampler.

    A single trial draws an accepting path with probability proportional to
    its weight, fills the remaining variables from their weights, and
    returns ``total_path_weight / multiplicity``; its mean is WMC(D).
    """
    if weights is None:
        weights = {v: HALF for v in D.variables()}
    C = _Compiled(D, weights)
    if C.total == 0:
        return Estimate(0.0, Fraction(0), 0, True)
    size, wanted = cfg.batch_size, cfg.batches
    count = min(wanted, cfg.max_samples // size)
    converged = count == wanted
    count = max(count, 1)

    def batch(i):
        nu = C.sample_paths(_batch_rng(cfg.seed, i), size)
        return float(np.mean(C.total / C.multiplicity(nu)))

    means = _run_batches(batch, count, cfg.workers)
    return Estimate(float(np.median(means)), None, count * size, converged, tuple(means))


def karp_luby_samples(m: int, cfg: EstimatorConfig) -> int:
    return math.ceil(3 * m * math.log(2 / cfg.delta) / cfg.epsilon ** 2)


def karp_luby_dnf(F: DnfProvenance, weights: Mapping, cfg: EstimatorConfig = EstimatorConfig(),
                  chunk: int = 4096) -> Estimate:
    """Karp-Luby union-of-events estimator for Pr(F)."""
    clauses = [c for c in F.ordered_clauses()]
    if not clauses:
        return Estimate(0.0, Fraction(0), 0, True)
    if any(len(c) == 0 for c in clauses):
        return Estimate(1.0, Fraction(1), 0, True)
    variables = sorted({e for c in clauses for e in c}, key=F.universe.index)
    col = {e: j for j, e in enumerate(variables)}
    w = np.array([float(_weight(weights, e)) for e in variables])
    cw = np.array([math.prod(w[col[e]] for e in c) for c in clauses])
    keep = cw > 0
    if not keep.any():
        return Estimate(0.0, Fraction(0), 0, True)
    clauses = [c for c, k in zip(clauses, keep) if k]
    cw = cw[keep]
    if len(clauses) == 1:
        return Estimate(float(cw[0]), math.prod((Fraction(_weight(weights, e)) for e in clauses[0]),
                                                start=Fraction(1)), 0, True)
    m = len(clauses)
    mat = np.zeros((m, len(variables)), dtype=np.int32)
    for i, c in enumerate(clauses):
        mat[i, [col[e] for e in c]] = 1
    U = float(cw.sum())
    cdf = np.cumsum(cw) / U
    wanted = karp_luby_samples(m, cfg)
    total = min(wanted, cfg.max_samples)
    chunk = max(1, min(chunk, (1 << 22) // m))
    nchunks = math.ceil(total / chunk)

    def run(k):
        size = min(chunk, total - k * chunk)
        rng = _batch_rng(cfg.seed, k)
        pick = np.minimum(np.searchsorted(cdf, rng.random(size), side="right"), m - 1)
        nu = rng.random((size, len(variables))) < w
        nu |= mat[pick].astype(bool)
        missing = (~nu).astype(np.int32) @ mat.T
        first = np.argmax(missing == 0, axis=1)
        return size, int(np.count_nonzero(first == pick))

    runs = _run_batches(run, nchunks, cfg.workers)
    hits = sum(h for _, h in runs)
    return Estimate(U * hits / total, None, total, total == wanted,
                    tuple(U * h / size for size, h in runs))


def dnf_exact(F: DnfProvenance, weights: Mapping) -> Fraction:
    """Exact Pr(F) by Shannon expansion on the most frequent variable."""
    memo = {}

    def go(cs: frozenset) -> Fraction:
        if not cs:
            return Fraction(0)
        if frozenset() in cs:
            return Fraction(1)
        if cs in memo:
            return memo[cs]
        counts = {}
        for c in cs:
            for e in c:
                counts[e] = counts.get(e, 0) + 1
        v = max(counts, key=lambda e: (counts[e], -F.universe.index(e)))
        q = _weight(weights, v)
        pos = frozenset(c - {v} for c in cs)
        neg = frozenset(c for c in cs if v not in c)
        memo[cs] = q * go(pos) + (1 - q) * go(neg)
        return memo[cs]

    return go(F.clauses)


def naive_monte_carlo(G, P, samples: int, seed: int = 0) -> float:
    """Fraction of sampled worlds in which G maps into the kept edges."""
    H = base_graph(P)
    probs = probabilities(P)
    edges = list(H.edges)
    if samples <= 0:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    p = np.array([float(probs[e]) for e in edges])
    worlds = rng.random((samples, len(edges))) < p
    packed = np.packbits(worlds, axis=1)
    uniq, inverse, counts = np.unique(packed, axis=0, return_inverse=True, return_counts=True)
    hits = 0
    for row, cnt in zip(range(len(uniq)), counts):
        kept = [e for e, bit in zip(edges, np.unpackbits(uniq[row])[:len(edges)]) if bit]
        if homomorphism_exists(G, H.subgraph(kept)):
            hits += int(cnt)
    return hits / samples
