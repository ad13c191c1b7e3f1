"""Finite automata over single-character alphabets.

Regexes go through Thompson construction, subset construction and Hopcroft
minimization.  ``Dfa`` objects are complete (every state has a transition
on every letter) and immutable.
"""

from __future__ import annotations

from collections import deque
from itertools import product
from typing import Iterable, Iterator, Sequence

from .errors import ParseError

EPSILON = "ε"
SPECIAL = set("|*+?()")


class Dfa:
    """Complete DFA with states ``0..n-1``.

    ``names`` optionally gives each state a display name; it has no effect
    on the language.
    """

    __slots__ = ("n", "alphabet", "initial", "accepting", "delta", "names", "_index")

    def __init__(self, n: int, alphabet: Iterable[str], initial: int, accepting: Iterable[int],
                 delta: dict, names: Sequence[str] | None = None):
        self.n = n
        self.alphabet = tuple(sorted(set(alphabet)))
        self.initial = initial
        self.accepting = frozenset(accepting)
        self._index = {a: i for i, a in enumerate(self.alphabet)}
        table = []
        for q in range(n):
            row = []
            for a in self.alphabet:
                r = delta[(q, a)]
                if not 0 <= r < n:
                    raise ValueError(f"transition to unknown state {r}")
                row.append(r)
            table.append(tuple(row))
        self.delta = tuple(table)
        self.names = tuple(names) if names is not None else tuple(str(q) for q in range(n))
        if not (0 <= initial < n):
            raise ValueError("initial state out of range")

    # ------------------------------------------------------------ basics
    def step(self, q: int, a: str) -> int:
        return self.delta[q][self._index[a]]

    def run(self, word: str) -> int | None:
        q = self.initial
        for a in word:
            if a not in self._index:
                return None
            q = self.delta[q][self._index[a]]
        return q

    def accepts(self, word: str) -> bool:
        q = self.run(word)
        return q is not None and q in self.accepting

    def transitions(self) -> dict:
        return {(q, a): self.delta[q][i] for q in range(self.n) for i, a in enumerate(self.alphabet)}

    def reachable(self) -> set:
        seen, stack = {self.initial}, [self.initial]
        while stack:
            q = stack.pop()
            for r in self.delta[q]:
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        return seen

    def coreachable(self) -> set:
        back = [set() for _ in range(self.n)]
        for q in range(self.n):
            for r in self.delta[q]:
                back[r].add(q)
        seen = set(self.accepting)
        stack = list(seen)
        while stack:
            r = stack.pop()
            for q in back[r]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return seen

    def live_states(self) -> set:
        """Reachable states from which an accepting state is reachable."""
        return self.reachable() & self.coreachable()

    def is_empty(self) -> bool:
        return not (self.reachable() & self.accepting)

    def is_finite(self) -> bool:
        """True iff the trim automaton has no cycle."""
        live = self.live_states()
        color = {}
        for start in live:
            if start in color:
                continue
            color[start] = 1
            stack = [(start, iter(self.delta[start]))]
            while stack:
                q, it = stack[-1]
                r = next((r for r in it if r in live), None)
                if r is None:
                    color[q] = 2
                    stack.pop()
                elif color.get(r) == 1:
                    return False
                elif r not in color:
                    color[r] = 1
                    stack.append((r, iter(self.delta[r])))
        return True

    def words(self, max_length: int | None = None) -> Iterator[str]:
        """Accepted words in shortlex order (all of them if finite)."""
        if max_length is None and not self.is_finite():
            raise ValueError("infinite language needs max_length")
        live = self.live_states()
        if self.initial not in live:
            return
        level = [("", self.initial)]
        length = 0
        while level and (max_length is None or length <= max_length):
            for w, q in level:
                if q in self.accepting:
                    yield w
            level = [(w + a, self.delta[q][i]) for w, q in level
                     for i, a in enumerate(self.alphabet) if self.delta[q][i] in live]
            length += 1

    # ------------------------------------------------------- constructions
    def with_alphabet(self, alphabet: Iterable[str]) -> "Dfa":
        """Same language over a larger alphabet (new letters go to a sink)."""
        sigma = sorted(set(alphabet) | set(self.alphabet))
        if sigma == list(self.alphabet):
            return self
        sink = self.n
        delta = {}
        for q in range(self.n + 1):
            for a in sigma:
                delta[(q, a)] = self.step(q, a) if q < self.n and a in self._index else sink
        return Dfa(self.n + 1, sigma, self.initial, self.accepting, delta,
                   list(self.names) + ["sink"])

    def complement(self) -> "Dfa":
        return Dfa(self.n, self.alphabet, self.initial,
                   set(range(self.n)) - self.accepting, self.transitions(), self.names)

    def product(self, other: "Dfa", accept) -> "Dfa":
        sigma = sorted(set(self.alphabet) | set(other.alphabet))
        A, B = self.with_alphabet(sigma), other.with_alphabet(sigma)
        start = (A.initial, B.initial)
        ids = {start: 0}
        queue = deque([start])
        delta = {}
        while queue:
            p, q = queue.popleft()
            for a in sigma:
                nxt = (A.step(p, a), B.step(q, a))
                if nxt not in ids:
                    ids[nxt] = len(ids)
                    queue.append(nxt)
                delta[(ids[(p, q)], a)] = ids[nxt]
        acc = {i for (p, q), i in ids.items() if accept(p in A.accepting, q in B.accepting)}
        return Dfa(len(ids), sigma, 0, acc, delta)

    def intersect(self, other: "Dfa") -> "Dfa":
        return self.product(other, lambda x, y: x and y)

    def union(self, other: "Dfa") -> "Dfa":
        return self.product(other, lambda x, y: x or y)

    def minimized(self) -> "Dfa":
        return minimize(self)

    def equivalent(self, other: "Dfa") -> bool:
        return self.product(other, lambda x, y: x != y).is_empty()

    def distinguishing_word(self, other: "Dfa") -> str | None:
        diff = self.product(other, lambda x, y: x != y)
        return next(diff.words(max_length=diff.n), None)

    def __eq__(self, other):
        return isinstance(other, Dfa) and (self.n, self.alphabet, self.initial, self.accepting,
                                           self.delta) == (other.n, other.alphabet, other.initial,
                                                           other.accepting, other.delta)

    def __hash__(self):
        return hash((self.n, self.alphabet, self.initial, self.accepting, self.delta))

    def __repr__(self):
        return f"Dfa({self.n} states, alphabet={''.join(self.alphabet)!r})"


def single_word_dfa(word: str, alphabet: Iterable[str] = ()) -> Dfa:
    sigma = sorted(set(word) | set(alphabet))
    n = len(word) + 2
    sink = n - 1
    delta = {(q, a): sink for q in range(n) for a in sigma}
    for i, a in enumerate(word):
        delta[(i, a)] = i + 1
    return Dfa(n, sigma, 0, {len(word)}, delta)


def empty_dfa(alphabet: Iterable[str] = ()) -> Dfa:
    return Dfa(1, alphabet, 0, (), {(0, a): 0 for a in alphabet})


# ------------------------------------------------------------------ NFA

class Nfa:
    """epsilon-NFA; ``edges[q]`` lists ``(symbol or None, target)``."""

    def __init__(self):
        self.edges: list[list] = []
        self.start = 0
        self.final: set = set()

    def state(self) -> int:
        self.edges.append([])
        return len(self.edges) - 1

    def add(self, p: int, symbol, q: int):
        self.edges[p].append((symbol, q))

    def alphabet(self) -> set:
        return {s for out in self.edges for s, _ in out if s is not None}

    def closure(self, states) -> frozenset:
        seen = set(states)
        stack = list(states)
        while stack:
            p = stack.pop()
            for s, q in self.edges[p]:
                if s is None and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return frozenset(seen)

    def embed(self, dfa: Dfa) -> tuple[int, list]:
        """Copy a DFA in; returns (entry state, accepting copies)."""
        base = len(self.edges)
        for _ in range(dfa.n):
            self.state()
        for (q, a), r in dfa.transitions().items():
            self.add(base + q, a, base + r)
        return base + dfa.initial, [base + q for q in dfa.accepting]

    def determinize(self, alphabet: Iterable[str] = ()) -> Dfa:
        sigma = sorted(self.alphabet() | set(alphabet))
        start = self.closure([self.start])
        ids = {start: 0}
        queue = deque([start])
        delta = {}
        while queue:
            S = queue.popleft()
            for a in sigma:
                T = self.closure({q for p in S for s, q in self.edges[p] if s == a})
                if T not in ids:
                    ids[T] = len(ids)
                    queue.append(T)
                delta[(ids[S], a)] = ids[T]
        acc = {i for S, i in ids.items() if S & self.final}
        return Dfa(len(ids), sigma, 0, acc, delta)


# ------------------------------------------------------------ regex parser

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.nfa = Nfa()

    def peek(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1
        return self.text[self.i] if self.i < len(self.text) else None

    def parse(self) -> Nfa:
        start, end = self.alternation()
        if self.peek() is not None:
            raise ParseError(f"unexpected {self.peek()!r}", self.i)
        self.nfa.start = start
        self.nfa.final = {end}
        return self.nfa

    def fragment(self, symbol):
        s, e = self.nfa.state(), self.nfa.state()
        self.nfa.add(s, symbol, e)
        return s, e

    def alternation(self):
        branches = [self.concatenation()]
        while self.peek() == "|":
            self.i += 1
            branches.append(self.concatenation())
        if len(branches) == 1:
            return branches[0]
        s, e = self.nfa.state(), self.nfa.state()
        for bs, be in branches:
            self.nfa.add(s, None, bs)
            self.nfa.add(be, None, e)
        return s, e

    def concatenation(self):
        parts = []
        while self.peek() is not None and self.peek() not in "|)":
            parts.append(self.repetition())
        if not parts:
            return self.fragment(None)
        for (_, e1), (s2, _) in zip(parts, parts[1:]):
            self.nfa.add(e1, None, s2)
        return parts[0][0], parts[-1][1]

    def repetition(self):
        s, e = self.atom()
        while self.peek() in ("*", "+", "?"):
            op = self.text[self.i]
            self.i += 1
            ns, ne = self.nfa.state(), self.nfa.state()
            self.nfa.add(ns, None, s)
            self.nfa.add(e, None, ne)
            if op in "*?":
                self.nfa.add(ns, None, ne)
            if op in "*+":
                self.nfa.add(e, None, s)
            s, e = ns, ne
        return s, e

    def atom(self):
        c = self.peek()
        pos = self.i
        if c == "(":
            self.i += 1
            frag = self.alternation()
            if self.peek() != ")":
                raise ParseError("missing ')'", self.i)
            self.i += 1
            return frag
        if c is None or c in SPECIAL:
            raise ParseError(f"expected a symbol, found {c or 'end of input'!r}", pos)
        self.i += 1
        return self.fragment(None if c == EPSILON else c)


def regex_to_nfa(pattern: str) -> Nfa:
    return _Parser(pattern).parse()


def regex_to_dfa(pattern: str, alphabet: Iterable[str] = ()) -> Dfa:
    """Minimal complete DFA for the pattern."""
    return minimize(regex_to_nfa(pattern).determinize(alphabet))


# ------------------------------------------------------------ minimization

def minimize(dfa: Dfa) -> Dfa:
    """Hopcroft partition refinement on the reachable part, then a BFS
    renumbering (letters in sorted order) so equal languages give equal
    objects."""
    reach = sorted(dfa.reachable())
    sigma = dfa.alphabet
    inverse = {(a, r): [] for a in sigma for r in reach}
    for q in reach:
        for a in sigma:
            inverse[(a, dfa.step(q, a))].append(q)
    acc = frozenset(q for q in reach if q in dfa.accepting)
    rej = frozenset(reach) - acc
    partition = [blk for blk in (acc, rej) if blk]
    work = [min(partition, key=len)] if len(partition) == 2 else []
    while work:
        splitter = work.pop()
        for a in sigma:
            pre = {p for r in splitter for p in inverse[(a, r)]}
            if not pre:
                continue
            refined = []
            for blk in partition:
                inside = blk & pre
                outside = blk - pre
                if inside and outside:
                    refined += [inside, outside]
                    if blk in work:
                        work.remove(blk)
                        work += [inside, outside]
                    else:
                        work.append(min(inside, outside, key=len))
                else:
                    refined.append(blk)
            partition = refined
    block_of = {q: i for i, blk in enumerate(partition) for q in blk}
    # canonical renumbering
    start = block_of[dfa.initial]
    order = {start: 0}
    queue = deque([start])
    rep = {i: min(blk) for i, blk in enumerate(partition)}
    while queue:
        b = queue.popleft()
        for a in sigma:
            nb = block_of[dfa.step(rep[b], a)]
            if nb not in order:
                order[nb] = len(order)
                queue.append(nb)
    delta = {(order[b], a): order[block_of[dfa.step(rep[b], a)]] for b in order for a in sigma}
    accepting = {order[b] for b in order if rep[b] in dfa.accepting}
    return Dfa(len(order), sigma, 0, accepting, delta)


# ------------------------------------------------------------ language ops

def _sigma_star_nfa(nfa: Nfa, sigma, at_least_one: bool) -> tuple[int, int]:
    s, e = nfa.state(), nfa.state()
    for a in sigma:
        nfa.add(s, a, e)
        nfa.add(e, a, e)
    if not at_least_one:
        nfa.add(s, None, e)
    return s, e


def padded(dfa: Dfa, left_plus: bool, right_plus: bool) -> Dfa:
    """DFA for ``S1 L S2`` with S1, S2 in {Sigma*, Sigma+}."""
    sigma = dfa.alphabet
    nfa = Nfa()
    ls, le = _sigma_star_nfa(nfa, sigma, left_plus)
    entry, finals = nfa.embed(dfa)
    rs, re_ = _sigma_star_nfa(nfa, sigma, right_plus)
    nfa.add(le, None, entry)
    for f in finals:
        nfa.add(f, None, rs)
    nfa.start = ls
    nfa.final = {re_}
    return minimize(nfa.determinize(sigma))


def minify(dfa: Dfa) -> Dfa:
    """Words of L with no strict infix in L."""
    infixed = padded(dfa, True, False).union(padded(dfa, False, True))
    return minimize(dfa.intersect(infixed.complement()))


def is_bounded(dfa: Dfa) -> bool:
    return dfa.is_finite()


def local_parts(dfa: Dfa) -> tuple[set, set, set, bool]:
    """First letters, last letters, two-letter factors, and whether eps in L."""
    live = dfa.live_states()
    first, last, factors = set(), set(), set()
    if dfa.initial not in live:
        return first, last, factors, False
    for a in dfa.alphabet:
        if dfa.step(dfa.initial, a) in live:
            first.add(a)
    for q in live:
        for a in dfa.alphabet:
            r = dfa.step(q, a)
            if r not in live:
                continue
            if r in dfa.accepting:
                last.add(a)
            for b in dfa.alphabet:
                if dfa.step(r, b) in live:
                    factors.add(a + b)
    return first, last, factors, dfa.initial in dfa.accepting


def to_local_dfa_unchecked(dfa: Dfa) -> Dfa:
    """Local automaton for the smallest local language containing L."""
    first, last, factors, eps = local_parts(dfa)
    sigma = dfa.alphabet
    # 0 = init, 1..k = q_a, k+1 = sink
    letter_state = {a: i + 1 for i, a in enumerate(sigma)}
    sink = len(sigma) + 1
    delta = {}
    for a in sigma:
        delta[(0, a)] = letter_state[a] if a in first else sink
        delta[(sink, a)] = sink
        for b in sigma:
            delta[(letter_state[a], b)] = letter_state[b] if a + b in factors else sink
    accepting = {letter_state[a] for a in last} | ({0} if eps else set())
    names = ["init", *(f"q_{a}" for a in sigma), "sink"]
    return Dfa(len(sigma) + 2, sigma, 0, accepting, delta, names)


def is_local(dfa: Dfa) -> bool:
    return to_local_dfa_unchecked(dfa).equivalent(dfa)


# ------------------------------------------------------------ text format

def format_dfa(dfa: Dfa) -> str:
    lines = ["dfa", f"states {dfa.n}", "alphabet " + "".join(dfa.alphabet), f"start {dfa.initial}"]
    lines.append(" ".join(["accept", *map(str, sorted(dfa.accepting))]))
    for (q, a), r in sorted(dfa.transitions().items()):
        lines.append(f"trans {q} {a} {r}")
    return "\n".join(lines) + "\n"


def parse_dfa(text: str) -> Dfa:
    """Read the ``dfa`` text format; missing transitions go to a fresh sink."""
    rows = [(i, ln.split()) for i, ln in enumerate(text.splitlines(), start=1)
            if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or rows[0][1] != ["dfa"]:
        raise ParseError("missing 'dfa' header", rows[0][0] if rows else None)
    n, sigma, start, accept, trans = None, None, None, set(), {}
    for lineno, toks in rows[1:]:
        try:
            head = toks[0]
            if head == "states":
                n = int(toks[1])
            elif head == "alphabet":
                sigma = sorted(set("".join(toks[1:])))
            elif head == "start":
                start = int(toks[1])
            elif head == "accept":
                accept |= {int(t) for t in toks[1:]}
            elif head == "trans":
                if len(toks) != 4 or len(toks[2]) != 1:
                    raise ParseError("expected 'trans <q> <char> <q>'", lineno)
                trans[(int(toks[1]), toks[2])] = int(toks[3])
            else:
                raise ParseError(f"unknown directive {head!r}", lineno)
        except (IndexError, ValueError) as exc:
            raise ParseError(f"malformed line {' '.join(toks)!r}", lineno) from exc
    if n is None or sigma is None or start is None:
        raise ParseError("dfa needs states, alphabet and start")
    for (q, a), r in trans.items():
        if not (0 <= q < n and 0 <= r < n) or a not in sigma:
            raise ParseError(f"bad transition {q} {a} {r}")
    if not 0 <= start < n or any(not 0 <= q < n for q in accept):
        raise ParseError("state out of range")
    total = all((q, a) in trans for q, a in product(range(n), sigma))
    size = n if total else n + 1
    delta = {(q, a): trans.get((q, a), n) if q < n else n for q in range(size) for a in sigma}
    return Dfa(size, sigma, start, accept, delta)
