"""Exact spectral and mixing analysis of small symmetric chains."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Hashable

import numpy as np

from .groups import CapExceededError, enumeration_cap
from .tuples import all_tuples, num_tuples, transition_support

CHAIN_CAP = 5_040
PRODUCT_CAP = 2_500
EIG_TOL = 1e-9


class NotLazyError(ValueError):
    pass


@dataclass
class ChainMatrix:
    """Transition matrix over labelled states.

    ``exact`` holds sparse rows of Fractions when available; ``P`` is the
    dense float matrix used for eigenvalues.
    """

    states: list[Hashable]
    P: np.ndarray
    exact: list[dict[int, Fraction]] | None = None

    def __post_init__(self) -> None:
        self.index = {s: n for n, s in enumerate(self.states)}

    @property
    def size(self) -> int:
        return len(self.states)

    def exact_row_sums(self) -> list[Fraction]:
        if self.exact is None:
            raise ValueError("no exact rows stored")
        return [sum(row.values(), Fraction(0)) for row in self.exact]

    def is_exactly_symmetric(self) -> bool:
        if self.exact is None:
            raise ValueError("no exact rows stored")
        return all(self.exact[b].get(a, 0) == p
                   for a, row in enumerate(self.exact) for b, p in row.items())

    def is_irreducible(self) -> bool:
        seen, stack = {0}, [0]
        adj = self.P > 0
        while stack:
            a = stack.pop()
            for b in np.flatnonzero(adj[a]):
                if b not in seen:
                    seen.add(int(b))
                    stack.append(int(b))
        return len(seen) == self.size

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["state"] + [str(s) for s in self.states])
            for s, row in zip(self.states, self.P):
                w.writerow([str(s)] + [repr(float(x)) for x in row])


def enumerate_chain(k: int, l: int, cap: int | None = None) -> ChainMatrix:
    """Full transition matrix of the lazy tuple walk on ``S_l``."""
    cap = enumeration_cap(CHAIN_CAP) if cap is None else cap
    if num_tuples(k, l) > cap:
        raise CapExceededError(f"|S_l| = {num_tuples(k, l)} exceeds cap {cap}")
    states = all_tuples(k, l)
    index = {s: n for n, s in enumerate(states)}
    exact = [{index[v]: p for v, p in transition_support(u, k)} for u in states]
    P = np.zeros((len(states), len(states)))
    for a, row in enumerate(exact):
        for b, p in row.items():
            P[a, b] = float(p)
    return ChainMatrix(states, P, exact)


def lazy_complete_chain(m: int) -> ChainMatrix:
    """``(I + (J - I)/(m - 1)) / 2`` on ``m`` states."""
    if m < 2:
        raise ValueError("need m >= 2")
    off = Fraction(1, 2 * (m - 1))
    exact = [{b: (Fraction(1, 2) if a == b else off) for b in range(m)} for a in range(m)]
    P = np.array([[float(exact[a][b]) for b in range(m)] for a in range(m)])
    return ChainMatrix(list(range(m)), P, exact)


@dataclass
class SpectralReport:
    lambda2: float
    gap: float
    min_eigenvalue: float
    eigenvalues: list[float] = field(repr=False, default_factory=list)

    def to_json(self) -> str:
        return json.dumps({"lambda2": self.lambda2, "gap": self.gap,
                           "min_eigenvalue": self.min_eigenvalue})


def spectral_gap(chain: ChainMatrix | np.ndarray, tol: float = 1e-12) -> SpectralReport:
    """Eigenvalue gap ``1 - lambda_2`` of a symmetric transition matrix."""
    P = chain.P if isinstance(chain, ChainMatrix) else np.asarray(chain, dtype=float)
    if not np.allclose(P, P.T, atol=tol, rtol=0):
        raise ValueError("transition matrix is not symmetric")
    eig = np.sort(np.linalg.eigvalsh(P))[::-1]
    lambda2 = float(eig[1]) if len(eig) > 1 else 0.0
    return SpectralReport(lambda2, 1.0 - lambda2, float(eig[-1]), eig.tolist())


@dataclass
class MixingCurve:
    delta: list[float]

    def mixing_time(self) -> int | None:
        """Smallest ``t`` with ``delta(t') <= 1/(2e)`` for all computed ``t' >= t``."""
        threshold = 1 / (2 * math.e)
        tau = None
        for t in range(len(self.delta) - 1, -1, -1):
            if self.delta[t] > threshold:
                break
            tau = t
        return tau

    def to_json(self) -> str:
        return json.dumps({"delta": self.delta})


def stationary(P: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eig(P.T)
    v = np.real(V[:, np.argmin(np.abs(w - 1))])
    return v / v.sum()


def mixing_curve(chain: ChainMatrix | np.ndarray, t_max: int) -> MixingCurve:
    """Worst-case total variation distance to stationarity for ``t = 0..t_max``."""
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    P = chain.P if isinstance(chain, ChainMatrix) else np.asarray(chain, dtype=float)
    pi = stationary(P)
    dist = np.eye(P.shape[0])
    delta = []
    for _ in range(t_max + 1):
        delta.append(float(0.5 * np.abs(dist - pi).sum(axis=1).max()))
        dist = dist @ P
    return MixingCurve(delta)


def verify_gap_from_coupling(chain: ChainMatrix, coupling_time_bound: float) -> bool:
    """``gap >= 1/(4 e T)`` for a lazy chain with coupling time at most ``T``."""
    report = spectral_gap(chain)
    if report.min_eigenvalue < -EIG_TOL:
        raise NotLazyError(f"negative eigenvalue {report.min_eigenvalue}")
    return report.gap >= 1 / (4 * math.e * coupling_time_bound)


def harmonic(l: int) -> float:
    return sum(1 / d for d in range(1, l + 1))


def coupling_bound(l: int) -> float:
    """``2 l (ln l + 1)``, which dominates ``2 l H_l``."""
    return 2 * l * (math.log(l) + 1)


def gap_lower_bound(l: int, log=math.log) -> float:
    """``1 / (8 e l log l)``; undefined for ``l = 1``."""
    if l < 2:
        raise ValueError("the l log l bound needs l >= 2")
    return 1 / (8 * math.e * l * log(l))


def product_chain(chain: ChainMatrix, cap: int | None = None) -> ChainMatrix:
    """Two independent copies: ``P (x) P`` on paired states."""
    cap = enumeration_cap(PRODUCT_CAP) if cap is None else cap
    n = chain.size
    if n * n > cap:
        raise CapExceededError(f"{n * n} product states exceed cap {cap}")
    states = [(a, b) for a in chain.states for b in chain.states]
    exact = None
    if chain.exact is not None:
        exact = [{c * n + d: p * q for c, p in chain.exact[a].items() for d, q in chain.exact[b].items()}
                 for a in range(n) for b in range(n)]
    return ChainMatrix(states, np.kron(chain.P, chain.P), exact)


def sparse_product_gap(chain: ChainMatrix, tol: float = 1e-13) -> float:
    """``1 - lambda_2(P (x) P)`` via a sparse Lanczos solve, for product
    chains too large to assemble densely."""
    from scipy import sparse
    from scipy.sparse.linalg import eigsh

    P = sparse.csr_matrix(chain.P)
    big = sparse.kron(P, P, format="csr")
    v0 = np.random.default_rng(0).normal(size=big.shape[0])  # fixed start: reproducible output
    vals = eigsh(big, k=2, which="LA", tol=tol, v0=v0, return_eigenvectors=False)
    return 1.0 - float(np.sort(vals)[0])
