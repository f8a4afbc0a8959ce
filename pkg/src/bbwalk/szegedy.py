"""Classical simulation of the quantized walk on directed-edge space.

Vectors are complex arrays indexed by the edges ``(u, v)`` with
``P[u, v] > 0`` plus every self-loop ``(u, u)``, sorted by ``(u, v)``.
Both reflections are applied matrix-free in time linear in the edge count.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .markov import ChainMatrix

NORM_TOL = 1e-9


@dataclass(frozen=True)
class EdgeIndex:
    src: np.ndarray
    dst: np.ndarray
    n_states: int

    def __len__(self) -> int:
        return len(self.src)

    def slot(self, u: int, v: int) -> int:
        lo = np.searchsorted(self.src, u)
        hi = np.searchsorted(self.src, u, side="right")
        pos = lo + np.searchsorted(self.dst[lo:hi], v)
        if pos >= hi or self.dst[pos] != v:
            raise KeyError((u, v))
        return int(pos)


def _matrix(chain) -> np.ndarray:
    return chain.P if isinstance(chain, ChainMatrix) else np.asarray(chain, dtype=float)


def edge_index(chain) -> EdgeIndex:
    P = _matrix(chain)
    src, dst = np.nonzero((P > 0) | np.eye(P.shape[0], dtype=bool))
    return EdgeIndex(src, dst, P.shape[0])


def absorbed(P: np.ndarray, marked: Iterable[int]) -> np.ndarray:
    """Marked rows replaced by self-loops."""
    PM = P.copy()
    for u in marked:
        PM[u] = 0.0
        PM[u, u] = 1.0
    return PM


def start_state(chain) -> np.ndarray:
    """Amplitude ``sqrt(P[u, v] / N)`` on each edge ``(u, v)``."""
    P = _matrix(chain)
    e = edge_index(P)
    return np.sqrt(P[e.src, e.dst] / P.shape[0]).astype(complex)


def _block_sum(keys: np.ndarray, weights: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    re = np.bincount(keys, weights * v.real, minlength=n)
    im = np.bincount(keys, weights * v.imag, minlength=n)
    return re + 1j * im


class QuantizedWalk:
    """Walk operator ``W = R_2 R_1`` for the chain absorbed at ``marked``.

    ``R_1`` reflects each block of fixed first coordinate ``u`` about the
    vector ``sqrt(P_M[u, .])``; ``R_2`` does the same for blocks of fixed
    second coordinate ``v`` with ``sqrt(P_M[v, .])``.
    """

    def __init__(self, chain, marked: Iterable[int] = ()) -> None:
        self.P = _matrix(chain)
        self.marked = frozenset(int(u) for u in marked)
        self.edges = edge_index(self.P)
        self.N = self.P.shape[0]
        PM = absorbed(self.P, self.marked)
        src, dst = self.edges.src, self.edges.dst
        self._a = np.sqrt(PM[src, dst])
        self._b = np.sqrt(PM[dst, src])
        self.psi0 = start_state(self.P)

    @property
    def marked_fraction(self) -> float:
        return len(self.marked) / self.N

    def reflect_first(self, v: np.ndarray) -> np.ndarray:
        inner = _block_sum(self.edges.src, self._a, v, self.N)
        return 2 * self._a * inner[self.edges.src] - v

    def reflect_second(self, v: np.ndarray) -> np.ndarray:
        inner = _block_sum(self.edges.dst, self._b, v, self.N)
        return 2 * self._b * inner[self.edges.dst] - v

    def step(self, v: np.ndarray) -> np.ndarray:
        return self.reflect_second(self.reflect_first(v))

    def dense_reflections(self) -> tuple[np.ndarray, np.ndarray]:
        """Assembled ``R_1`` and ``R_2`` (for cross-checks on small chains)."""
        E = len(self.edges)
        A = np.zeros((E, self.N))
        B = np.zeros((E, self.N))
        A[np.arange(E), self.edges.src] = self._a
        B[np.arange(E), self.edges.dst] = self._b
        eye = np.eye(E)
        return 2 * A @ A.T - eye, 2 * B @ B.T - eye


def apply_reflection_first(chain, v: np.ndarray) -> np.ndarray:
    return QuantizedWalk(chain).reflect_first(v)


def apply_reflection_second(chain, v: np.ndarray) -> np.ndarray:
    return QuantizedWalk(chain).reflect_second(v)


def walk_operator_step(qw: QuantizedWalk, v: np.ndarray) -> np.ndarray:
    return qw.step(v)


@dataclass(frozen=True)
class DetectionBudget:
    """``t_max = ceil(C / sqrt(delta * epsilon))`` steps, threshold ``theta``."""

    delta: float
    epsilon: float
    C: float = 3.0
    theta: float = 0.75

    def __post_init__(self) -> None:
        if not (self.delta > 0 and self.epsilon > 0):
            raise ValueError("delta and epsilon must be positive")

    @property
    def t_max(self) -> int:
        return max(1, math.ceil(self.C / math.sqrt(self.delta * self.epsilon) - 1e-12))


@dataclass
class Detection:
    nonempty: bool
    statistic: float
    t_max: int
    trace: list[tuple[int, float]] = field(repr=False, default_factory=list)

    def write_trace(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "overlap"])
            w.writerows((t, repr(o)) for t, o in self.trace)


def detect_marked(qw: QuantizedWalk, budget: DetectionBudget) -> Detection:
    """Average of ``|<psi0|W^t|psi0>|^2`` over ``t = 1..t_max``; report
    non-empty iff the average falls below ``theta``.

    With no marked state ``psi0`` is fixed by ``W``, so the average is 1.
    """
    v = qw.psi0.copy()
    trace = []
    for t in range(1, budget.t_max + 1):
        v = qw.step(v)
        trace.append((t, float(abs(np.vdot(qw.psi0, v)) ** 2)))
    stat = sum(o for _, o in trace) / budget.t_max
    return Detection(stat < budget.theta, stat, budget.t_max, trace)
