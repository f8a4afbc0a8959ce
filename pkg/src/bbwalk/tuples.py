"""Tuple states, product trees and the lazy random walk on ordered tuples.

A state is an ordered tuple ``u`` of ``l`` distinct indices into a
generator list ``g_0 .. g_{k-1}`` (0-based, ``g_0`` the identity), and
``g_u = g_{u_0} ... g_{u_{l-1}}``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .groups import BlackBoxGroup, CapExceededError, enumeration_cap

Move = tuple[int, int] | None


def compute_p(k: int, l: int) -> Fraction:
    """Probability that two fixed indices are both in or both out of a random tuple."""
    if k < 2 or not 1 <= l <= k:
        raise ValueError(f"need k >= 2 and 1 <= l <= k, got k={k}, l={l}")
    return Fraction(l * (l - 1) + (k - l) * (k - l - 1), k * (k - 1))


def num_tuples(k: int, l: int) -> int:
    return math.perm(k, l)


def all_tuples(k: int, l: int) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(k), l))


def hamming(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a != b for a, b in zip(u, v))


def _split(l: int) -> int:
    """Left subtree size; the deepest leaves end up leftmost."""
    depth = math.ceil(math.log2(l))
    return min(2 ** (depth - 1), l - 2 ** (depth - 2)) if depth >= 2 else 1


class ProductTree:
    """Balanced binary tree over ``g_{u_0}, ..., g_{u_{l-1}}``.

    Internal nodes hold the product of their two children, so the root is
    ``g_u``. Nodes live in flat lists; ``leaves[p]`` is the node of position ``p``.
    """

    def __init__(self, u: Sequence[int], generators: Sequence, group: BlackBoxGroup) -> None:
        self.u = tuple(u)
        self.generators = generators
        self.group = group
        self.left: list[int] = []
        self.right: list[int] = []
        self.parent: list[int] = []
        self.depth: list[int] = []
        self.values: list = []
        self.leaves: list[int] = []
        self.root_id = self._grow(0, len(self.u), -1, 0)

    def _new(self, parent: int, depth: int) -> int:
        self.left.append(-1)
        self.right.append(-1)
        self.parent.append(parent)
        self.depth.append(depth)
        self.values.append(None)
        return len(self.values) - 1

    def _grow(self, lo: int, hi: int, parent: int, depth: int) -> int:
        node = self._new(parent, depth)
        size = hi - lo
        if size == 1:
            self.leaves.append(node)
            self.values[node] = self.generators[self.u[lo]]
            return node
        mid = lo + _split(size)
        self.left[node] = self._grow(lo, mid, node, depth + 1)
        self.right[node] = self._grow(mid, hi, node, depth + 1)
        self.values[node] = self.group.mul(self.values[self.left[node]],
                                           self.values[self.right[node]])
        return node

    @property
    def root(self):
        return self.values[self.root_id]

    @property
    def height(self) -> int:
        return max(self.depth)

    def internal_nodes(self) -> list[int]:
        return [n for n in range(len(self.values)) if self.left[n] >= 0]

    def shape(self):
        """Nested tuples of positions, e.g. ``((0, 1), 2)`` for three leaves."""
        def walk(n):
            if self.left[n] < 0:
                return self.leaves.index(n)
            return walk(self.left[n]), walk(self.right[n])
        return walk(self.root_id)

    def ancestors(self, position: int) -> list[int]:
        out, n = [], self.parent[self.leaves[position]]
        while n >= 0:
            out.append(n)
            n = self.parent[n]
        return out

    def _uncompute(self, nodes: list[int]) -> None:
        for n in sorted(nodes, key=lambda n: self.depth[n]):
            rest = self.group.inv_mul(self.values[self.left[n]], self.values[n])
            if rest != self.values[self.right[n]]:
                raise RuntimeError("product tree out of sync with its leaves")
            self.values[n] = None

    def _recompute(self, nodes: list[int]) -> None:
        for n in sorted(nodes, key=lambda n: -self.depth[n]):
            self.values[n] = self.group.mul(self.values[self.left[n]], self.values[self.right[n]])

    def set_leaves(self, u: Sequence[int], positions: Sequence[int]) -> None:
        """Move to tuple ``u`` that differs from ``self.u`` only at ``positions``.

        Ancestors of the changed leaves are uncomputed root to leaf with
        ``inv_mul`` and recomputed leaf to root with ``mul``: two queries per
        distinct ancestor.
        """
        touched = sorted({a for p in positions for a in self.ancestors(p)})
        self._uncompute(touched)
        self.u = tuple(u)
        for p in positions:
            self.values[self.leaves[p]] = self.generators[self.u[p]]
        self._recompute(touched)

    def erase(self) -> None:
        """Uncompute every internal node (``l - 1`` queries)."""
        self._uncompute(self.internal_nodes())

    def snapshot(self) -> tuple:
        return tuple(self.values)


def build_tree(u: Sequence[int], generators: Sequence, group: BlackBoxGroup) -> ProductTree:
    """Product tree of ``u``; costs exactly ``l - 1`` queries."""
    return ProductTree(u, generators, group)


def draw_move(rng: np.random.Generator, k: int, l: int) -> Move:
    """``None`` for the lazy branch, else a uniform ``(position, index)``."""
    if rng.integers(2) == 0:
        return None
    return int(rng.integers(l)), int(rng.integers(k))


def apply_move(u: tuple[int, ...], move: Move) -> tuple[tuple[int, ...], list[int]]:
    """New tuple and the positions whose entries changed."""
    if move is None:
        return u, []
    i, j = move
    w = list(u)
    if j in w:
        m = w.index(j)
        if m == i:
            return u, []
        w[i], w[m] = w[m], w[i]
        return tuple(w), [i, m]
    w[i] = j
    return tuple(w), [i]


def walk_step(u: tuple[int, ...], tree: ProductTree, rng: np.random.Generator,
              k: int | None = None) -> tuple[tuple[int, ...], ProductTree]:
    """One lazy step; the tree is updated in place."""
    k = len(tree.generators) if k is None else k
    new, changed = apply_move(tuple(u), draw_move(rng, k, len(u)))
    if changed:
        tree.set_leaves(new, changed)
    return new, tree


def transition_support(u: Sequence[int], k: int) -> list[tuple[tuple[int, ...], Fraction]]:
    """Exact outgoing distribution of one walk step from ``u``."""
    u = tuple(u)
    l = len(u)
    weight = Fraction(1, 2 * l * k)
    out = Counter({u: Fraction(1, 2)})
    for i in range(l):
        for j in range(k):
            out[apply_move(u, (i, j))[0]] += weight
    return sorted(out.items())


def tuple_products(group: BlackBoxGroup, generators: Sequence, l: int,
                   cap: int | None = None) -> dict[tuple[int, ...], object]:
    """``g_u`` for every ``u`` in ``S_l``, sharing prefix products."""
    k = len(generators)
    cap = enumeration_cap() if cap is None else cap
    if num_tuples(k, l) > cap:
        raise CapExceededError(f"|S_l| = {num_tuples(k, l)} exceeds cap {cap}")
    out: dict[tuple[int, ...], object] = {}

    def extend(prefix: tuple[int, ...], value) -> None:
        if len(prefix) == l:
            out[prefix] = value
            return
        for j in range(k):
            if j not in prefix:
                nxt = generators[j] if value is None else group.mul(value, generators[j])
                extend(prefix + (j,), nxt)

    extend((), None)
    return out


def sample_tuple(rng: np.random.Generator, k: int, l: int) -> tuple[int, ...]:
    """Uniform element of ``S_l`` (uniform ordered sample without replacement)."""
    return tuple(int(x) for x in rng.choice(k, size=l, replace=False))


def sample_gu_not_in_K(group: BlackBoxGroup, generators: Sequence, K, l: int,
                       mode: str = "exact", samples: int = 10_000, seed=0):
    """``Pr_u[g_u not in K]``: a ``Fraction`` when exact, a float when sampled."""
    K = set(K)
    k = len(generators)
    if mode == "exact":
        products = tuple_products(group, generators, l)
        outside = sum(g not in K for g in products.values())
        return Fraction(outside, len(products))
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(samples):
        hits += build_tree(sample_tuple(rng, k, l), generators, group).root not in K
    return hits / samples


def sample_noncommuting_pair(group: BlackBoxGroup, generators: Sequence, l: int,
                             mode: str = "exact", samples: int = 10_000, seed=0):
    """``Pr_{u,v}[g_u g_v != g_v g_u]`` for independent uniform ``u, v``."""
    k = len(generators)
    if mode == "exact":
        products = tuple_products(group, generators, l)
        counts = Counter(products.values())
        elems = list(counts)
        bad = 0
        for a, b in itertools.combinations(elems, 2):
            if group.mul(a, b) != group.mul(b, a):
                bad += 2 * counts[a] * counts[b]
        return Fraction(bad, len(products) ** 2)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(samples):
        gu = build_tree(sample_tuple(rng, k, l), generators, group).root
        gv = build_tree(sample_tuple(rng, k, l), generators, group).root
        hits += group.mul(gu, gv) != group.mul(gv, gu)
    return hits / samples


def tester_queries_per_trial(k: int) -> int:
    return 4 * (k // 2 - 1) + 2


def randomized_commutativity_test(group: BlackBoxGroup, generators: Sequence,
                                  trials: int, seed=0) -> bool:
    """One-sided randomized test; ``True`` means "commutative".

    Each trial draws ``u, v`` uniformly from ``S_l`` with ``l = floor(k/2)``,
    builds both product trees, compares ``g_u g_v`` with ``g_v g_u`` and erases
    the trees again: ``4(l-1) + 2`` queries per trial, for all trials.
    """
    k = len(generators)
    if k < 2:
        raise ValueError("need at least two generators")
    l = k // 2
    rng = np.random.default_rng(seed)
    commutative = True
    for _ in range(trials):
        tu = build_tree(sample_tuple(rng, k, l), generators, group)
        tv = build_tree(sample_tuple(rng, k, l), generators, group)
        if group.mul(tu.root, tv.root) != group.mul(tv.root, tu.root):
            commutative = False
        tu.erase()
        tv.erase()
    return commutative


def coupled_step(pair: tuple[tuple[int, ...], tuple[int, ...]], k: int,
                 rng: np.random.Generator) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], Move]:
    """Advance both tuples with one shared draw; also returns the draw."""
    u, v = pair
    move = draw_move(rng, k, len(u))
    return (apply_move(u, move)[0], apply_move(v, move)[0]), move


class CouplingTime(NamedTuple):
    mean: float
    stddev: float
    trials: int

    @property
    def stderr(self) -> float:
        return self.stddev / math.sqrt(self.trials) if self.trials else 0.0


def coupling_time(u, v, k: int, rng: np.random.Generator, count_lazy: bool = False,
                  max_steps: int = 10**7) -> int:
    """Steps until the coupled pair coalesces.

    By default only non-lazy steps are counted, i.e. the coupling of the
    underlying non-lazy kernel; ``count_lazy=True`` counts every draw.
    """
    pair, steps = (tuple(u), tuple(v)), 0
    while pair[0] != pair[1]:
        pair, move = coupled_step(pair, k, rng)
        steps += count_lazy or move is not None
        if steps > max_steps:
            raise RuntimeError("coupling did not coalesce")
    return steps


def estimate_coupling_time(k: int, l: int, trials: int, seed=0, count_lazy: bool = False,
                           start=None) -> CouplingTime:
    """Monte-Carlo coupling time from a worst-case (disjoint) start pair."""
    if start is None:
        if 2 * l > k:
            raise ValueError("disjoint start needs 2l <= k")
        start = (tuple(range(l)), tuple(range(l, 2 * l)))
    rng = np.random.default_rng(seed)
    times = np.array([coupling_time(*start, k, rng, count_lazy) for _ in range(trials)],
                     dtype=float)
    std = float(times.std(ddof=1)) if trials > 1 else 0.0
    return CouplingTime(float(times.mean()), std, trials)


def exact_coupling_times(k: int, l: int, count_lazy: bool = False) -> dict:
    """Expected coalescence time from every ordered pair, by solving the
    absorbing linear system of the coupled chain."""
    states = all_tuples(k, l)
    pairs = [(a, b) for a in states for b in states if a != b]
    index = {p: n for n, p in enumerate(pairs)}
    A = np.eye(len(pairs))
    active = 1.0 / (l * k)
    for (a, b), r in index.items():
        for i in range(l):
            for j in range(k):
                nxt = (apply_move(a, (i, j))[0], apply_move(b, (i, j))[0])
                if nxt[0] != nxt[1]:
                    A[r, index[nxt]] -= active
    times = np.linalg.solve(A, np.ones(len(pairs)))
    if count_lazy:
        times *= 2
    return {p: float(times[n]) for p, n in index.items()}
