"""Block-diagonal Pauli group built from a function oracle.

A function ``F`` on ``{0..k-1}`` (0-based throughout) defines generators
``g_i`` that are ``4k x 4k`` block-diagonal matrices with ``2k`` blocks of
size 2x2. Block ``i`` of ``g_i`` is ``Y``; block ``F(i) + k`` is ``Z`` when
``i < k/2`` and ``X`` otherwise; every other block is ``I``. The generated
group is abelian iff ``F`` has no collision ``F(x) = F(y)`` with ``x < k/2 <= y``.

Group elements are encoded either by a generator index (``int``) or
explicitly by a :class:`PauliWord`. Each group operation makes at most four
queries to ``F``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .groups import BlackBoxGroup, GeneratorList, GroupError, QueryCounter

LETTERS = "IXYZ"

# Y = XZ = [[0, -1], [1, 0]]; the sign table follows from the real matrices.
_PRODUCT = {
    ("X", "Z"): (1, "Y"), ("Z", "X"): (-1, "Y"),
    ("X", "Y"): (1, "Z"), ("Y", "X"): (-1, "Z"),
    ("Y", "Z"): (1, "X"), ("Z", "Y"): (-1, "X"),
    ("X", "X"): (1, "I"), ("Z", "Z"): (1, "I"), ("Y", "Y"): (-1, "I"),
}

MATRICES = {
    "I": np.array([[1, 0], [0, 1]]),
    "X": np.array([[0, 1], [1, 0]]),
    "Z": np.array([[1, 0], [0, -1]]),
    "Y": np.array([[0, -1], [1, 0]]),
}


class MalformedEncodingError(GroupError):
    pass


def pauli_block_mul(a: tuple[int, str], b: tuple[int, str]) -> tuple[int, str]:
    """Product of two signed letters, e.g. ``(1, "X"), (1, "Z") -> (1, "Y")``."""
    (sa, la), (sb, lb) = a, b
    if la == "I":
        return sa * sb, lb
    if lb == "I":
        return sa * sb, la
    s, letter = _PRODUCT[(la, lb)]
    return sa * sb * s, letter


@dataclass(frozen=True, slots=True)
class PauliWord:
    """Explicit encoding: ``diag(s_0 sigma_0, ..., s_{2k-1} sigma_{2k-1})``."""

    signs: tuple[int, ...]
    letters: str

    @classmethod
    def identity(cls, k: int) -> PauliWord:
        return cls((1,) * (2 * k), "I" * (2 * k))

    def __mul__(self, other: PauliWord) -> PauliWord:
        blocks = [pauli_block_mul(a, b) for a, b in
                  zip(zip(self.signs, self.letters), zip(other.signs, other.letters))]
        return PauliWord(tuple(s for s, _ in blocks), "".join(c for _, c in blocks))

    def inverse(self) -> PauliWord:
        # I, X, Z are involutions; Y^-1 = -Y
        return PauliWord(tuple(-s if c == "Y" else s for s, c in zip(self.signs, self.letters)),
                         self.letters)

    def dense(self) -> np.ndarray:
        n = len(self.letters)
        out = np.zeros((2 * n, 2 * n), dtype=np.int64)
        for b, (s, c) in enumerate(zip(self.signs, self.letters)):
            out[2 * b:2 * b + 2, 2 * b:2 * b + 2] = s * MATRICES[c]
        return out

    def __str__(self) -> str:
        return " ".join(("+" if s > 0 else "-") + c for s, c in zip(self.signs, self.letters))


ReducedEncoding = Union[int, PauliWord]


class FunctionOracle:
    """Counted oracle for ``F: {0..k-1} -> {0..k-1}``."""

    def __init__(self, values, name: str = "F") -> None:
        self.values = tuple(int(v) for v in values)
        self.k = len(self.values)
        if self.k < 2 or self.k % 2:
            raise ValueError(f"k must be even and >= 2, got {self.k}")
        if any(not 0 <= v < self.k for v in self.values):
            raise ValueError("values must lie in 0..k-1")
        self.name = name
        self.counter = QueryCounter()

    @property
    def f_queries(self) -> int:
        return self.counter.oracle_calls

    def __call__(self, x: int) -> int:
        self.counter.tick()
        return self.values[x]

    def __repr__(self) -> str:
        return f"FunctionOracle({list(self.values)})"

    def split_collisions(self) -> list[tuple[int, int]]:
        """Ground-truth colliding pairs ``(x, y)``, ``x < k/2 <= y`` (uncounted)."""
        h = self.k // 2
        return [(x, y) for x in range(h) for y in range(h, self.k)
                if self.values[x] == self.values[y]]

    def to_json(self) -> str:
        return json.dumps({"k": self.k, "values": list(self.values)})

    @classmethod
    def from_json(cls, text: str) -> FunctionOracle:
        data = json.loads(text)
        if len(data["values"]) != data["k"]:
            raise ValueError("length of values does not match k")
        return cls(data["values"])


class ComposedOracle(FunctionOracle):
    """``x -> F(perm[x])``; every evaluation also queries ``F``."""

    def __init__(self, inner: FunctionOracle, perm) -> None:
        self.inner = inner
        self.perm = tuple(int(p) for p in perm)
        super().__init__([inner.values[p] for p in self.perm], name=f"{inner.name}∘π")

    def __call__(self, x: int) -> int:
        self.counter.tick()
        return self.inner(self.perm[x])


def _generator_word(i: int, fi: int, k: int) -> PauliWord:
    letters = ["I"] * (2 * k)
    letters[i] = "Y"
    letters[fi + k] = "Z" if i < k // 2 else "X"
    return PauliWord((1,) * (2 * k), "".join(letters))


def make_generator(i: int, F: FunctionOracle) -> PauliWord:
    """Explicit word of ``g_i``; costs one query to ``F``."""
    if not 0 <= i < F.k:
        raise IndexError(f"generator index {i} outside 0..{F.k - 1}")
    return _generator_word(i, F(i), F.k)


def _generator_pattern(w: PauliWord, k: int) -> tuple[int, int] | None:
    """``(i, j)`` if ``w`` is exactly ``a_ij`` (i < k/2) or ``b_ij`` (i >= k/2)."""
    if any(s != 1 for s in w.signs):
        return None
    head = [b for b in range(k) if w.letters[b] != "I"]
    tail = [b - k for b in range(k, 2 * k) if w.letters[b] != "I"]
    if len(head) != 1 or len(tail) != 1:
        return None
    i, j = head[0], tail[0]
    expected = "Z" if i < k // 2 else "X"
    if w.letters[i] != "Y" or w.letters[j + k] != expected:
        return None
    return i, j


def _check_word(w: PauliWord, k: int) -> None:
    if (len(w.letters) != 2 * k or len(w.signs) != 2 * k
            or any(c not in LETTERS for c in w.letters)
            or any(s not in (1, -1) for s in w.signs)):
        raise MalformedEncodingError(f"not an explicit encoding for k={k}: {w!r}")


def _expand(x: ReducedEncoding, F: FunctionOracle) -> tuple[PauliWord, bool]:
    if isinstance(x, PauliWord):
        _check_word(x, F.k)
        return x, False
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool) and 0 <= x < F.k:
        word = make_generator(int(x), F)
        F(int(x))  # erase the register holding F(x)
        return word, True
    raise MalformedEncodingError(f"not a reduced encoding for k={F.k}: {x!r}")


def reduced_group_op(x: ReducedEncoding, y: ReducedEncoding, F: FunctionOracle,
                     inverse: bool = False) -> ReducedEncoding:
    """Encoding of ``x*y`` (or ``x^-1 * y``) using at most four ``F``-queries.

    Integer operands cost two queries each (evaluate, then erase). A result
    of generator shape ``a_ij``/``b_ij`` is re-encoded as ``i`` when ``F(i) == j``,
    which costs two more queries; this check is skipped when both operands
    are generators, since a product of two generators is never a generator.
    """
    wx, gx = _expand(x, F)
    wy, gy = _expand(y, F)
    if inverse:
        wx = wx.inverse()
    product = wx * wy
    if gx and gy:
        return product
    pattern = _generator_pattern(product, F.k)
    if pattern is None:
        return product
    i, j = pattern
    match = F(i) == j
    F(i)  # erase
    return i if match else product


def commutes(i: int, j: int, F: FunctionOracle) -> bool:
    return reduced_group_op(i, j, F) == reduced_group_op(j, i, F)


class PauliReducedGroup(BlackBoxGroup):
    """Black-box view of the group; ``counter`` counts group operations and
    ``F.counter`` the underlying function queries."""

    def __init__(self, F: FunctionOracle) -> None:
        super().__init__()
        self.F = F
        self.k = F.k
        self.identity = PauliWord.identity(F.k)
        self.max_f_per_op = 0

    def __repr__(self) -> str:
        return f"PauliReducedGroup({self.F!r})"

    @property
    def f_queries(self) -> int:
        return self.F.f_queries

    def generators(self) -> GeneratorList:
        return GeneratorList(self, [self.identity, *range(self.k)])

    def _op(self, g, h, inverse):
        before = self.F.f_queries
        out = reduced_group_op(g, h, self.F, inverse)
        self.max_f_per_op = max(self.max_f_per_op, self.F.f_queries - before)
        return out

    def _mul(self, g, h):
        return self._op(g, h, False)

    def _inv_mul(self, g, h):
        return self._op(g, h, True)


def usc_instance(k: int, kind: str, seed: int | np.random.Generator) -> FunctionOracle:
    """Random Unique Split Collision instance.

    ``kind="permutation"`` gives a uniform permutation; ``"split-collision"``
    samples a permutation and redirects one point of the upper half onto the
    value of one point of the lower half.
    """
    if k < 2 or k % 2:
        raise ValueError(f"k must be even and >= 2, got {k}")
    rng = np.random.default_rng(seed)
    values = rng.permutation(k)
    if kind == "split-collision":
        x = int(rng.integers(k // 2))
        y = int(rng.integers(k // 2, k))
        values[y] = values[x]
    elif kind != "permutation":
        raise ValueError(f"unknown instance kind {kind!r}")
    return FunctionOracle(values.tolist())


def exact_usc_solver(F: FunctionOracle) -> bool:
    """Accept iff ``F`` has a split collision; queries ``F`` at every point."""
    h = F.k // 2
    low = {F(x) for x in range(h)}
    return any(F(y) in low for y in range(h, F.k))


def uc_to_usc(F: FunctionOracle, usc_solver: Callable[[FunctionOracle], bool],
              seed: int | np.random.Generator) -> bool:
    """Decide Unique Collision with a split-collision solver.

    Runs ``usc_solver`` on ``F`` composed with two independent uniform
    permutations of the domain and accepts if either run accepts.
    """
    rng = np.random.default_rng(seed)
    verdicts = [usc_solver(ComposedOracle(F, rng.permutation(F.k))) for _ in range(2)]
    return any(verdicts)
