"""Monotone 2-CNF formulas: ``AND_j (X_f1(j) OR X_f2(j))``."""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParseError


@dataclass(frozen=True)
class MonotoneCnf:
    n: int
    clauses: tuple  # 1-based (i, j) pairs

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for i, j in self.clauses:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"clause ({i}, {j}) outside 1..{self.n}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def clause_vars(self, c: int) -> list:
        """Distinct variables of clause ``c`` (0-based), in written order."""
        return list(dict.fromkeys(self.clauses[c]))

    def degree(self) -> Counter:
        deg = Counter()
        for c in range(self.m):
            deg.update(self.clause_vars(c))
        return deg

    def max_degree(self) -> int:
        return max(self.degree().values(), default=0)

    def satisfied(self, assignment: Sequence[bool]) -> bool:
        """``assignment[i - 1]`` is the value of X_i."""
        return all(assignment[i - 1] or assignment[j - 1] for i, j in self.clauses)

    def truth_table(self) -> np.ndarray:
        """Satisfaction per world; bit ``i - 1`` of the world index is X_i."""
        w = np.arange(1 << self.n)
        ok = np.ones(1 << self.n, bool)
        for i, j in self.clauses:
            ok &= ((w >> (i - 1)) & 1).astype(bool) | ((w >> (j - 1)) & 1).astype(bool)
        return ok

    def count_models(self) -> int:
        """#SAT by plain enumeration of assignments."""
        return sum(self.satisfied(a) for a in itertools.product((False, True), repeat=self.n))


def random_cnf(rng: random.Random, max_n=10, max_m=12, max_degree=6) -> MonotoneCnf:
    """Random monotone 2-CNF respecting a degree bound (rejection sampling)."""
    while True:
        n = rng.randint(1, max_n)
        m = rng.randint(1, max_m)
        clauses = [(rng.randint(1, n), rng.randint(1, n)) for _ in range(m)]
        phi = MonotoneCnf(n, clauses)
        if phi.max_degree() <= max_degree:
            return phi


def parse_cnf(text: str) -> MonotoneCnf:
    """Read ``p mcnf <n> <m>`` followed by one ``<i> <j>`` line per clause."""
    header, clauses = None, []
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = line.split()
        if not toks or toks[0] in ("c", "#"):
            continue
        if toks[0] == "p":
            if len(toks) != 4 or toks[1] != "mcnf":
                raise ParseError("expected 'p mcnf <n> <m>'", lineno)
            header = (int(toks[2]), int(toks[3]))
            continue
        if header is None:
            raise ParseError("clause before header", lineno)
        nums = [int(t) for t in toks if t != "0"] if toks[-1] == "0" else [int(t) for t in toks]
        if len(nums) != 2 or min(nums) < 1:
            raise ParseError("a clause is two positive variable indices", lineno)
        clauses.append(tuple(nums))
    if header is None:
        raise ParseError("missing header")
    n, m = header
    if m != len(clauses):
        raise ParseError(f"header announces {m} clauses, found {len(clauses)}")
    try:
        return MonotoneCnf(n, clauses)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def format_cnf(phi: MonotoneCnf) -> str:
    return "".join([f"p mcnf {phi.n} {phi.m}\n", *(f"{i} {j}\n" for i, j in phi.clauses)])
