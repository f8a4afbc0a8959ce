"""Black-box group oracles with exact query accounting, plus small test groups."""

from __future__ import annotations

import itertools
import math
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable, Sequence

import numpy as np

DEFAULT_CAP = 10_080


def enumeration_cap(default: int = DEFAULT_CAP) -> int:
    """Enumeration cap, overridable through ``BBWALK_CAP``."""
    value = os.environ.get("BBWALK_CAP")
    return int(value) if value else default


class GroupError(Exception):
    pass


class InvalidEncodingError(GroupError):
    pass


class NotAGroupError(GroupError):
    pass


class CapExceededError(GroupError):
    pass


class QueryCounter:
    """Thread-safe monotone counter of oracle invocations."""

    def __init__(self) -> None:
        self._calls = 0
        self._lock = threading.Lock()

    def tick(self) -> None:
        with self._lock:
            self._calls += 1

    @property
    def oracle_calls(self) -> int:
        return self._calls

    def __repr__(self) -> str:
        return f"QueryCounter({self._calls})"


@dataclass(frozen=True, slots=True)
class GroupElement:
    """Fixed-length bit word; ``word[0]`` is the least significant bit."""

    word: str

    def __str__(self) -> str:
        return self.word


def encode_index(index: int, n: int) -> GroupElement:
    return GroupElement(format(index, f"0{n}b")[::-1])


class BlackBoxGroup:
    """Oracle pair ``mul(g, h) = gh`` and ``inv_mul(g, h) = g^-1 h``.

    Subclasses implement ``_mul`` and ``_inv_mul``; every public call costs
    one query on ``counter``. Elements are compared by equality only.
    """

    identity: Hashable
    order: int | None = None

    def __init__(self) -> None:
        self.counter = QueryCounter()

    @property
    def queries(self) -> int:
        return self.counter.oracle_calls

    def mul(self, g, h):
        self.counter.tick()
        return self._mul(g, h)

    def inv_mul(self, g, h):
        self.counter.tick()
        return self._inv_mul(g, h)

    def _mul(self, g, h):
        raise NotImplementedError

    def _inv_mul(self, g, h):
        raise NotImplementedError


class TableGroup(BlackBoxGroup):
    """Finite group whose oracle is a lookup in a validated Cayley table.

    Element ``i`` is encoded by the little-endian binary form of ``i``
    padded to ``n = max(1, ceil(log2 m))`` bits. Index 0 is the identity.
    """

    def __init__(self, table: np.ndarray, labels: Sequence[Hashable] | None = None,
                 name: str = "G") -> None:
        super().__init__()
        self.table = table
        self.name = name
        self.order = m = table.shape[0]
        self.n = max(1, math.ceil(math.log2(m)))
        self.labels = list(labels) if labels is not None else list(range(m))
        self._words = [encode_index(i, self.n) for i in range(m)]
        self._index = {w: i for i, w in enumerate(self._words)}
        # inverse[g] such that table[g, inverse[g]] == 0
        self._inverse = np.argmin(table, axis=1) if m > 1 else np.zeros(1, dtype=np.int64)
        self.identity = self._words[0]

    def __repr__(self) -> str:
        return f"TableGroup({self.name}, order={self.order})"

    def index_of(self, g: GroupElement) -> int:
        try:
            return self._index[g]
        except (KeyError, TypeError):
            raise InvalidEncodingError(f"{g!r} does not encode an element of {self.name}") from None

    def element(self, index: int) -> GroupElement:
        return self._words[index]

    def elements(self) -> list[GroupElement]:
        return list(self._words)

    def label(self, g: GroupElement) -> Hashable:
        return self.labels[self.index_of(g)]

    def _mul(self, g, h):
        return self._words[self.table[self.index_of(g), self.index_of(h)]]

    def _inv_mul(self, g, h):
        return self._words[self.table[self._inverse[self.index_of(g)], self.index_of(h)]]

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))


class GeneratorList(tuple):
    """Ordered generators ``g_0 .. g_{k-1}`` with ``g_0`` the identity."""

    def __new__(cls, group: BlackBoxGroup, elements: Iterable):
        self = super().__new__(cls, elements)
        if not self or self[0] != group.identity:
            raise GroupError("generator list must start with the group identity")
        return self

    @property
    def k(self) -> int:
        return len(self)


def _generating_set(table: np.ndarray) -> list[int]:
    m = table.shape[0]
    gens: list[int] = []
    closed = np.zeros(m, dtype=bool)
    while not closed.all():
        gens.append(int(np.flatnonzero(~closed)[0]))
        members = np.flatnonzero(closed).tolist() + [gens[-1]]
        closed[members] = True
        frontier = members
        while frontier:
            current = np.flatnonzero(closed)
            prods = np.concatenate([table[np.ix_(frontier, current)].ravel(),
                                    table[np.ix_(current, frontier)].ravel()])
            fresh = np.unique(prods[~closed[prods]])
            closed[fresh] = True
            frontier = fresh.tolist()
    return gens


def validate_table(table: np.ndarray) -> int:
    """Check the group axioms; return the identity index.

    Associativity uses Light's test over a generating set, which is
    exhaustive: the elements ``g`` with ``(xg)y = x(gy)`` form a sub-magma.
    """
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise NotAGroupError("closure: table must be a non-empty square array")
    m = table.shape[0]
    if table.min() < 0 or table.max() >= m:
        raise NotAGroupError("closure: entries outside the element range")
    rng = np.arange(m)
    ids = [e for e in range(m) if np.array_equal(table[e], rng) and np.array_equal(table[:, e], rng)]
    if not ids:
        raise NotAGroupError("identity: no two-sided identity element")
    e = ids[0]
    for g in range(m):
        if not ((table[g] == e).any() and (table[:, g] == e).any()):
            raise NotAGroupError(f"inverses: element {g} has no inverse")
    for g in _generating_set(table):
        lhs = table[table[:, g], :]
        rhs = table[:, table[g, :]]
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            x, y = bad[0]
            raise NotAGroupError(f"associativity: ({x}*{g})*{y} != {x}*({g}*{y})")
    return e


def make_table_group(table, labels=None, name: str = "G") -> TableGroup:
    """Build a table-lookup oracle from a 0-indexed ``m x m`` Cayley table.

    The table is relabelled so that the identity is element 0.
    """
    table = np.asarray(table, dtype=np.int64)
    e = validate_table(table)
    m = table.shape[0]
    if e != 0:
        order = [e] + [i for i in range(m) if i != e]
        where = np.empty(m, dtype=np.int64)
        where[order] = np.arange(m)
        table = where[table[np.ix_(order, order)]]
        if labels is not None:
            labels = [labels[i] for i in order]
    return TableGroup(table, labels, name)


def load_table(path: str | Path, name: str | None = None) -> TableGroup:
    """Read the text format: ``m`` then ``m`` rows of 1-based indices."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    m = int(lines[0])
    rows = [[int(x) - 1 for x in ln.split()] for ln in lines[1:m + 1]]
    if len(rows) != m or any(len(r) != m for r in rows):
        raise NotAGroupError(f"closure: expected {m} rows of {m} entries")
    return make_table_group(rows, name=name or Path(path).stem)


def dump_table(group: TableGroup, path: str | Path) -> None:
    rows = [" ".join(str(int(x) + 1) for x in row) for row in group.table]
    Path(path).write_text(f"{group.order}\n" + "\n".join(rows) + "\n")


def perm_from_cycles(degree: int, cycles: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Image tuple (0-based) of a permutation given by 1-based cycles."""
    image = list(range(degree))
    for cyc in cycles:
        for pos, a in enumerate(cyc):
            image[a - 1] = cyc[(pos + 1) % len(cyc)] - 1
    return tuple(image)


def make_permutation_group(degree: int, generator_perms: Sequence[Sequence[int]],
                           cap: int | None = None, name: str = "G"):
    """Enumerate the group generated by 0-based image tuples.

    Products compose right to left: ``(gh)(x) = g(h(x))``. Returns the table
    group and the generator list ``(e, g_1, ..., g_r)``.
    """
    cap = enumeration_cap() if cap is None else cap
    ident = tuple(range(degree))
    gens = [tuple(p) for p in generator_perms]
    for p in gens:
        if sorted(p) != list(ident):
            raise GroupError(f"{p} is not a permutation of degree {degree}")
    elements = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        fresh = []
        for x in frontier:
            for g in gens:
                y = tuple(g[x[i]] for i in range(degree))
                if y not in index:
                    if len(elements) >= cap:
                        raise CapExceededError(f"group order exceeds cap {cap}")
                    index[y] = len(elements)
                    elements.append(y)
                    fresh.append(y)
        frontier = fresh
    perms = np.array(elements, dtype=np.int64)
    m = len(elements)
    # composed[a, b, :] = perms[a][perms[b]]
    table = np.empty((m, m), dtype=np.int64)
    for a in range(m):
        composed = perms[a][perms]
        table[a] = [index[tuple(row)] for row in composed.tolist()]
    group = TableGroup(table, elements, name)
    generators = GeneratorList(group, [group.identity] + [group.element(index[g]) for g in gens])
    return group, generators


def list_proper_subgroups(group: TableGroup, cap: int | None = None) -> list[frozenset[int]]:
    """Every proper subgroup, as sets of element indices, by exhaustive search.

    Each subgroup is reached by adjoining one element at a time to a
    smaller subgroup, so breadth-first extension from ``{e}`` is complete.
    """
    cap = enumeration_cap() if cap is None else cap
    m = group.order
    if m > cap:
        raise CapExceededError(f"group order {m} exceeds cap {cap}")
    table = group.table

    def closure(gens: set[int]) -> frozenset[int]:
        members = {0} | gens
        frontier = list(members)
        while frontier:
            fresh = []
            for a in frontier:
                for b in list(members):
                    for c in (table[a, b], table[b, a]):
                        c = int(c)
                        if c not in members:
                            members.add(c)
                            fresh.append(c)
            frontier = fresh
        return frozenset(members)

    seen = {frozenset([0])}
    layer = [frozenset([0])]
    while layer:
        nxt = []
        for h in layer:
            for g in range(m):
                if g in h:
                    continue
                bigger = closure(set(h) | {g})
                if bigger not in seen:
                    seen.add(bigger)
                    nxt.append(bigger)
        layer = nxt
    full = frozenset(range(m))
    return sorted((h for h in seen if h != full), key=lambda h: (len(h), sorted(h)))


# --- concrete test groups -------------------------------------------------

def cyclic(m: int):
    table = (np.arange(m)[:, None] + np.arange(m)[None, :]) % m
    g = make_table_group(table, name=f"Z{m}")
    return g, GeneratorList(g, [g.element(0), g.element(1 % m)])


def elementary_abelian_2(r: int):
    m = 2 ** r
    table = np.bitwise_xor.outer(np.arange(m), np.arange(m))
    g = make_table_group(table, name=f"Z2^{r}")
    return g, GeneratorList(g, [g.element(0)] + [g.element(1 << i) for i in range(r)])


def symmetric3():
    return make_permutation_group(
        3, [perm_from_cycles(3, [(1, 2)]), perm_from_cycles(3, [(1, 2, 3)])], name="S3")


def dihedral4():
    # symmetries of the square on vertices 1..4: rotation r and reflection s
    return make_permutation_group(
        4, [perm_from_cycles(4, [(1, 2, 3, 4)]), perm_from_cycles(4, [(1, 3)])], name="D4")


def quaternion8():
    """Q8 from unit quaternion multiplication; generators (1, i, j)."""
    # basis quaternion products: unit[a]*unit[b] = sign * unit[c]
    mult = {
        ("1", x): (1, x) for x in "1ijk"
    }
    mult.update({(x, "1"): (1, x) for x in "1ijk"})
    mult.update({(x, x): (-1, "1") for x in "ijk"})
    mult.update({("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
                 ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})
    labels = [(s, x) for s in (1, -1) for x in "1ijk"]
    idx = {lab: n for n, lab in enumerate(labels)}
    table = np.empty((8, 8), dtype=np.int64)
    for (s1, x1), (s2, x2) in itertools.product(labels, repeat=2):
        s, x = mult[(x1, x2)]
        table[idx[(s1, x1)], idx[(s2, x2)]] = idx[(s1 * s2 * s, x)]
    g = make_table_group(table, labels, name="Q8")
    return g, GeneratorList(g, [g.element(0), g.element(idx[(1, "i")]), g.element(idx[(1, "j")])])
