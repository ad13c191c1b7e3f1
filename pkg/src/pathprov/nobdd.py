"""Non-deterministic ordered binary decision diagrams.

Node ids follow a reverse topological numbering: node 0 is the 0-sink,
node 1 the 1-sink, and every child id is smaller than its parent's id.  The
text format below writes nodes in that order, so ``parse(serialize(D))``
reproduces ``D`` exactly.

    nobdd
    order <var> ...
    sink0 0
    sink1 1
    node <id> dec <var> <zero-child> <one-child>
    node <id> or <child> ...
    root <id>
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import MissingVariable, OrderMismatch, ParseError

SINK0, SINK1 = 0, 1
DEC, OR, S0, S1 = "dec", "or", "sink0", "sink1"


class NobddBuilder:
    """Append-only node table; children must exist before their parents."""

    def __init__(self):
        self.kind = [S0, S1]
        self.var = [None, None]
        self.lo = [-1, -1]
        self.hi = [-1, -1]
        self.kids: list = [(), ()]

    def __len__(self):
        return len(self.kind)

    def decision(self, var, lo: int, hi: int) -> int:
        self.kind.append(DEC)
        self.var.append(var)
        self.lo.append(lo)
        self.hi.append(hi)
        self.kids.append(())
        return len(self.kind) - 1

    def disjunction(self, children: Iterable[int]) -> int:
        self.kind.append(OR)
        self.var.append(None)
        self.lo.append(-1)
        self.hi.append(-1)
        self.kids.append(tuple(children))
        return len(self.kind) - 1

    def copy_from(self, D: "Nobdd") -> dict:
        """Import all of D's inner nodes; returns the id translation."""
        ids = {SINK0: SINK0, SINK1: SINK1}
        for i in range(2, len(D)):
            if D.kind[i] == DEC:
                ids[i] = self.decision(D.var[i], ids[D.lo[i]], ids[D.hi[i]])
            else:
                ids[i] = self.disjunction(ids[c] for c in D.kids[i])
        return ids

    def build(self, root: int, order: Sequence, keep_all: bool = False) -> "Nobdd":
        """Freeze, keeping only nodes reachable from ``root`` (sinks always kept)."""
        reach = [keep_all] * len(self.kind)
        reach[SINK0] = reach[SINK1] = reach[root] = True
        for i in range(len(self.kind) - 1, 1, -1):
            if not reach[i]:
                continue
            if self.kind[i] == DEC:
                reach[self.lo[i]] = reach[self.hi[i]] = True
            else:
                for c in self.kids[i]:
                    reach[c] = True
        new_id = {}
        kind, var, lo, hi, kids = [], [], [], [], []
        for i, ok in enumerate(reach):
            if not ok:
                continue
            new_id[i] = len(kind)
            kind.append(self.kind[i])
            var.append(self.var[i])
            if self.kind[i] == DEC:
                lo.append(new_id[self.lo[i]])
                hi.append(new_id[self.hi[i]])
                kids.append(())
            else:
                lo.append(-1)
                hi.append(-1)
                kids.append(tuple(new_id[c] for c in self.kids[i]))
        return Nobdd(kind, var, lo, hi, kids, new_id[root], order)


class Nobdd:
    """Immutable nOBDD over variables listed in ``order``."""

    __slots__ = ("kind", "var", "lo", "hi", "kids", "root", "order", "position")

    def __init__(self, kind, var, lo, hi, kids, root, order):
        self.kind = tuple(kind)
        self.var = tuple(var)
        self.lo = tuple(lo)
        self.hi = tuple(hi)
        self.kids = tuple(tuple(k) for k in kids)
        self.root = root
        self.order = tuple(order)
        self.position = {v: i for i, v in enumerate(self.order)}
        if len(self.position) != len(self.order):
            raise OrderMismatch("repeated variable in order")
        for i in range(2, len(self.kind)):
            if self.kind[i] == DEC and self.var[i] not in self.position:
                raise OrderMismatch(f"variable {self.var[i]} missing from the order")

    @classmethod
    def constant(cls, value: bool, order: Sequence = ()) -> "Nobdd":
        return NobddBuilder().build(SINK1 if value else SINK0, order)

    def __len__(self):
        return len(self.kind)

    @property
    def size(self) -> int:
        """Number of wires."""
        return sum(2 if k == DEC else len(c) for k, c in zip(self.kind, self.kids))

    def children(self, i: int) -> tuple:
        if self.kind[i] == DEC:
            return (self.lo[i], self.hi[i])
        return self.kids[i]

    def variables(self) -> set:
        return {v for k, v in zip(self.kind, self.var) if k == DEC}

    def stats(self) -> dict:
        return {
            "nodes": len(self),
            "decision_nodes": sum(k == DEC for k in self.kind),
            "or_nodes": sum(k == OR for k in self.kind),
            "wires": self.size,
            "variables": len(self.order),
        }

    def check_order(self) -> bool:
        """Decision variables strictly increase along every path."""
        inf = len(self.order)
        first = [inf] * len(self)
        for i in range(2, len(self)):
            if self.kind[i] == DEC:
                p = self.position[self.var[i]]
                if first[self.lo[i]] <= p or first[self.hi[i]] <= p:
                    return False
                first[i] = p
            else:
                first[i] = min((first[c] for c in self.kids[i]), default=inf)
        return True

    def map_vars(self, rename) -> "Nobdd":
        """Rename variables with a callable or a mapping."""
        f = rename.__getitem__ if isinstance(rename, Mapping) else rename
        var = [None if v is None else f(v) for v in self.var]
        return Nobdd(self.kind, var, self.lo, self.hi, self.kids, self.root,
                     [f(v) for v in self.order])

    def pruned(self) -> "Nobdd":
        """Collapse nodes that cannot reach the 1-sink onto the 0-sink."""
        b = NobddBuilder()
        ids = {SINK0: SINK0, SINK1: SINK1}
        for i in range(2, len(self)):
            if self.kind[i] == DEC:
                lo, hi = ids[self.lo[i]], ids[self.hi[i]]
                ids[i] = SINK0 if lo == SINK0 and hi == SINK0 else b.decision(self.var[i], lo, hi)
            else:
                live = [ids[c] for c in self.kids[i] if ids[c] != SINK0]
                ids[i] = b.disjunction(live) if live else SINK0
        return b.build(ids[self.root], self.order)

    def __eq__(self, other):
        return isinstance(other, Nobdd) and all(
            getattr(self, a) == getattr(other, a)
            for a in ("kind", "var", "lo", "hi", "kids", "root", "order"))

    def __repr__(self):
        return f"Nobdd({len(self)} nodes, {len(self.order)} variables)"


def evaluate(D: Nobdd, valuation: Mapping) -> bool:
    """True iff some root-to-1-sink path is compatible with the valuation."""
    val = [False] * len(D)
    val[SINK1] = True
    for i in range(2, len(D)):
        if D.kind[i] == DEC:
            v = D.var[i]
            if v not in valuation:
                raise MissingVariable(f"no value for variable {v}")
            val[i] = val[D.hi[i]] if valuation[v] else val[D.lo[i]]
        else:
            val[i] = any(val[c] for c in D.kids[i])
    return val[D.root]


def disjoin(diagrams: Sequence[Nobdd], order: Sequence | None = None) -> Nobdd:
    """Fresh or-node over the roots of diagrams sharing one variable order."""
    if not diagrams:
        return Nobdd.constant(False, order or ())
    order = tuple(diagrams[0].order if order is None else order)
    if any(D.order != order for D in diagrams):
        raise OrderMismatch("disjoined diagrams use different variable orders")
    b = NobddBuilder()
    roots = []
    for D in diagrams:
        ids = b.copy_from(D)
        roots.append(ids[D.root])
    return b.build(b.disjunction(roots), order)


def _check_universe(D: Nobdd, universe: Sequence) -> dict:
    pos = {v: i for i, v in enumerate(universe)}
    if len(pos) != len(universe):
        raise OrderMismatch("repeated variable in universe")
    used = sorted(D.variables(), key=D.position.__getitem__)
    if any(v not in pos for v in used):
        raise OrderMismatch("universe misses a variable of the diagram")
    ranks = [pos[v] for v in used]
    if ranks != sorted(ranks):
        raise OrderMismatch("universe order disagrees with the diagram order")
    return pos


def complete(D: Nobdd, universe: Sequence | None = None) -> Nobdd:
    """Insert don't-care tests so every root-to-sink path tests every variable."""
    universe = tuple(D.order if universe is None else universe)
    pos = _check_universe(D, universe)
    n = len(universe)
    wanted = [set() for _ in range(len(D))]
    wanted[D.root].add(0)
    for i in range(len(D) - 1, 1, -1):
        if not wanted[i]:
            continue
        if D.kind[i] == DEC:
            p = pos[D.var[i]]
            if max(wanted[i]) > p:
                raise OrderMismatch("diagram is not ordered")
            wanted[D.lo[i]].add(p + 1)
            wanted[D.hi[i]].add(p + 1)
        else:
            for c in D.kids[i]:
                wanted[c] |= wanted[i]

    b = NobddBuilder()
    at = {}  # (node, level) -> new id

    def sink_chain(sink, levels):
        at[(sink, n)] = sink
        lowest = min(levels)
        for j in range(n - 1, lowest - 1, -1):
            if (sink, j) not in at:
                nxt = at[(sink, j + 1)]
                at[(sink, j)] = b.decision(universe[j], nxt, nxt)

    for i in range(len(D)):
        if not wanted[i]:
            continue
        if D.kind[i] in (S0, S1):
            sink_chain(i, wanted[i])
        elif D.kind[i] == DEC:
            p = pos[D.var[i]]
            core = b.decision(D.var[i], at[(D.lo[i], p + 1)], at[(D.hi[i], p + 1)])
            at[(i, p)] = core
            for j in range(p - 1, min(wanted[i]) - 1, -1):
                at[(i, j)] = b.decision(universe[j], at[(i, j + 1)], at[(i, j + 1)])
        else:
            for lvl in sorted(wanted[i]):
                kids = []
                for c in D.kids[i]:
                    if (c, lvl) not in at:
                        raise OrderMismatch("diagram is not ordered")
                    kids.append(at[(c, lvl)])
                at[(i, lvl)] = b.disjunction(kids)
    return b.build(at[(D.root, 0)], universe)


def is_complete(D: Nobdd) -> bool:
    n = len(D.order)
    level = [n, n] + [None] * (len(D) - 2)
    for i in range(2, len(D)):
        if D.kind[i] == DEC:
            p = D.position[D.var[i]]
            if level[D.lo[i]] != p + 1 or level[D.hi[i]] != p + 1:
                return False
            level[i] = p
        else:
            lv = {level[c] for c in D.kids[i]}
            if len(lv) != 1:
                return False
            level[i] = lv.pop()
    return level[D.root] == 0


def condition(D: Nobdd, assignment: Mapping) -> Nobdd:
    """Fix some variables to constants and drop them from the order."""
    b = NobddBuilder()
    ids = {SINK0: SINK0, SINK1: SINK1}
    for i in range(2, len(D)):
        if D.kind[i] == DEC:
            v = D.var[i]
            if v in assignment:
                ids[i] = ids[D.hi[i]] if assignment[v] else ids[D.lo[i]]
            else:
                ids[i] = b.decision(v, ids[D.lo[i]], ids[D.hi[i]])
        else:
            ids[i] = b.disjunction(ids[c] for c in D.kids[i])
    return b.build(ids[D.root], [v for v in D.order if v not in assignment])


def serialize(D: Nobdd) -> str:
    lines = ["nobdd", " ".join(["order", *map(str, D.order)]).rstrip(),
             f"sink0 {SINK0}", f"sink1 {SINK1}"]
    for i in range(2, len(D)):
        if D.kind[i] == DEC:
            lines.append(f"node {i} dec {D.var[i]} {D.lo[i]} {D.hi[i]}")
        else:
            lines.append(" ".join(["node", str(i), "or", *map(str, D.kids[i])]))
    lines.append(f"root {D.root}")
    return "\n".join(lines) + "\n"


def parse(text: str) -> Nobdd:
    """Read the text format; variables come back as strings."""
    lines = [ln.split() for ln in text.splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0] != ["nobdd"]:
        raise ParseError("missing 'nobdd' header")
    order, root, sinks, nodes = None, None, {}, {}
    for lineno, toks in enumerate(lines[1:], start=2):
        head = toks[0]
        try:
            if head == "order":
                order = toks[1:]
            elif head in ("sink0", "sink1"):
                sinks[head] = int(toks[1])
            elif head == "node":
                nid, kind = int(toks[1]), toks[2]
                if kind == "dec":
                    nodes[nid] = (DEC, toks[3], int(toks[4]), int(toks[5]))
                elif kind == "or":
                    nodes[nid] = (OR, [int(t) for t in toks[3:]])
                else:
                    raise ParseError(f"unknown node kind {kind!r}", lineno)
            elif head == "root":
                root = int(toks[1])
            else:
                raise ParseError(f"unknown directive {head!r}", lineno)
        except (IndexError, ValueError) as exc:
            raise ParseError(f"malformed line {' '.join(toks)!r}", lineno) from exc
    if order is None or root is None or set(sinks) != {"sink0", "sink1"}:
        raise ParseError("incomplete nobdd description")
    # renumber children-first, visiting nodes in ascending id
    ids = {sinks["sink0"]: SINK0, sinks["sink1"]: SINK1}
    b = NobddBuilder()
    pending = sorted(nodes)
    while pending:
        progress = []
        for nid in pending:
            node = nodes[nid]
            deps = node[2:] if node[0] == DEC else node[1]
            if all(d in ids for d in deps):
                if node[0] == DEC:
                    ids[nid] = b.decision(node[1], ids[node[2]], ids[node[3]])
                else:
                    ids[nid] = b.disjunction(ids[c] for c in node[1])
                progress.append(nid)
        if not progress:
            raise ParseError("dangling or cyclic node references")
        pending = [nid for nid in pending if nid not in set(progress)]
    if root not in ids:
        raise ParseError(f"unknown root {root}")
    return b.build(ids[root], order)
