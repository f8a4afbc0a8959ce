"""Commutativity deciders: the randomized tester and the simulated quantum walk."""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .groups import BlackBoxGroup, CapExceededError, enumeration_cap
from .markov import enumerate_chain, gap_lower_bound, product_chain, spectral_gap
from .szegedy import DetectionBudget, QuantizedWalk, detect_marked
from .tuples import (
    ProductTree,
    build_tree,
    compute_p,
    num_tuples,
    randomized_commutativity_test,
    sample_tuple,
    tuple_products,
    walk_step,
)

SIM_CAP = 2_500


class InfeasibleSizeError(CapExceededError):
    pass


def choose_l(k: int) -> int:
    """``min(ceil(k^(2/3) ln k), floor(k/2))``, but at least 2."""
    if k < 4:
        raise ValueError(f"choose_l needs k >= 4, got {k}")
    return max(2, min(math.ceil(k ** (2 / 3) * math.log(k)), k // 2))


def update_bound(l: int) -> int:
    """Worst-case queries to update one tree after a swap (two leaf paths)."""
    return 4 * math.ceil(math.log2(l)) if l > 1 else 0


def marked_predicate(u_tree: ProductTree, v_tree: ProductTree, group: BlackBoxGroup) -> bool:
    """``g_u g_v != g_v g_u``; exactly two queries."""
    return group.mul(u_tree.root, v_tree.root) != group.mul(v_tree.root, u_tree.root)


def noncommuting_fraction_bound(k: int, l: int) -> float:
    p = compute_p(k, l)
    return float((1 - p) ** 2 / 4)


@dataclass
class AlgorithmConfig:
    l: int | None = None
    gamma: float = 1 / 3
    C: float = 3.0
    theta: float = 0.75
    seed: int = 0
    trials: int | None = None
    delta_source: str = "exact"
    log_base: str = "e"
    sim_cap: int = SIM_CAP

    def __post_init__(self) -> None:
        if not 0 < self.gamma < 0.5:
            raise ValueError("gamma must lie in (0, 1/2)")


@dataclass
class CostLedger:
    k: int
    l: int
    setup_S: int = 0
    check_C: int = 2
    update_U: int = 0
    update_U_bound: int = 0
    steps_taken: int = 0
    checks: int = 0
    update_total: int = 0
    per_tuple_update_max: int = 0
    total_queries: int = 0
    oracle_queries: int = 0
    f_queries: int | None = None
    f_queries_max_per_op: int | None = None

    def balanced(self) -> bool:
        return (self.total_queries == self.setup_S + self.update_total + self.check_C * self.checks
                and self.total_queries == self.oracle_queries)


@dataclass
class SimulationResult:
    commutative: bool
    ledger: CostLedger
    delta: float
    epsilon: float
    t_max: int
    statistic: float
    marked_fraction: float
    labeling_queries: int
    trace: list = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "decision": "commutative" if self.commutative else "non-commutative",
            "k": self.ledger.k, "l": self.ledger.l, "delta": self.delta,
            "epsilon": self.epsilon, "t_max": self.t_max,
            "setup_S": self.ledger.setup_S, "total_queries": self.ledger.total_queries,
            "statistic": self.statistic, "marked_fraction": self.marked_fraction,
        }
        if self.ledger.f_queries is not None:
            out["f_queries"] = self.ledger.f_queries
        out["ledger"] = asdict(self.ledger)
        return out


def quantum_commutativity_sim(group: BlackBoxGroup, generators: Sequence,
                              config: AlgorithmConfig | None = None) -> SimulationResult:
    """Simulate the quantized product walk on ``S_l x S_l``.

    The marked set is ``{(u, v): g_u g_v != g_v g_u}``. Labelling it needs the
    whole state space, so those queries are reported apart from the
    algorithm's cost. The cost ledger replays the query pattern of one branch
    of the walk: set up both trees, then ``t_max`` steps of tree updates
    followed by a marked check.
    """
    config = config or AlgorithmConfig()
    k = len(generators)
    l = config.l or choose_l(k)
    if not 1 <= l <= k // 2:
        raise ValueError(f"need 1 <= l <= k/2, got k={k}, l={l}")
    states = num_tuples(k, l) ** 2
    cap = enumeration_cap(config.sim_cap)
    if states > cap:
        raise InfeasibleSizeError(
            f"{states} product states exceed the simulation cap {cap}; use mode='randomized'")

    chain = enumerate_chain(k, l)
    pairs = product_chain(chain, cap=cap)
    before = group.queries
    products = tuple_products(group, generators, l)
    commute: dict = {}
    marked = []
    for n, (u, v) in enumerate(pairs.states):
        a, b = products[u], products[v]
        key = (a, b)
        if key not in commute:
            commute[key] = commute[(b, a)] = group.mul(a, b) == group.mul(b, a)
        if not commute[key]:
            marked.append(n)
    labeling = group.queries - before

    if config.delta_source == "exact":
        delta = spectral_gap(chain).gap
    else:
        log = math.log2 if config.log_base == "2" else math.log
        delta = gap_lower_bound(l, log)
    epsilon = noncommuting_fraction_bound(k, l)
    budget = DetectionBudget(delta, epsilon, config.C, config.theta)
    det = detect_marked(QuantizedWalk(pairs, marked), budget)

    ledger = replay_query_pattern(group, generators, l, budget.t_max, config.seed)
    return SimulationResult(not det.nonempty, ledger, delta, epsilon, budget.t_max,
                            det.statistic, len(marked) / pairs.size, labeling, det.trace)


def replay_query_pattern(group: BlackBoxGroup, generators: Sequence, l: int, steps: int,
                         seed=0) -> CostLedger:
    """Run setup, ``steps`` walk steps and checks on a classical branch,
    recording costs and the raw oracle counter side by side."""
    k = len(generators)
    rng = np.random.default_rng(seed)
    ledger = CostLedger(k=k, l=l, update_U_bound=2 * update_bound(l))
    F = getattr(group, "F", None)
    f_before = F.f_queries if F is not None else 0
    start = group.queries
    u, v = sample_tuple(rng, k, l), sample_tuple(rng, k, l)
    tu = build_tree(u, generators, group)
    tv = build_tree(v, generators, group)
    ledger.setup_S = group.queries - start
    for _ in range(steps):
        q0 = group.queries
        u, tu = walk_step(u, tu, rng, k)
        q1 = group.queries
        v, tv = walk_step(v, tv, rng, k)
        q2 = group.queries
        ledger.per_tuple_update_max = max(ledger.per_tuple_update_max, q1 - q0, q2 - q1)
        ledger.update_U = max(ledger.update_U, q2 - q0)
        ledger.update_total += q2 - q0
        marked_predicate(tu, tv, group)
        ledger.checks += 1
        ledger.steps_taken += 1
    ledger.oracle_queries = group.queries - start
    ledger.total_queries = ledger.setup_S + ledger.update_total + ledger.check_C * ledger.checks
    if F is not None:
        ledger.f_queries = F.f_queries - f_before
        ledger.f_queries_max_per_op = group.max_f_per_op
    return ledger


def randomized_trials(k: int, gamma: float) -> int:
    """Trials so that a non-abelian input is missed with probability <= gamma."""
    eps = noncommuting_fraction_bound(k, k // 2) if k >= 2 else 1.0
    return max(1, math.ceil(math.log(gamma) / math.log1p(-eps)))


def decide_commutativity(group: BlackBoxGroup, generators: Sequence, mode: str = "randomized",
                         config: AlgorithmConfig | None = None) -> bool:
    """``True`` iff the group generated by ``generators`` is judged abelian."""
    config = config or AlgorithmConfig()
    if mode == "randomized":
        trials = config.trials or randomized_trials(len(generators), config.gamma)
        return randomized_commutativity_test(group, generators, trials, config.seed)
    if mode == "quantum-sim":
        return quantum_commutativity_sim(group, generators, config).commutative
    raise ValueError(f"unknown mode {mode!r}")


def generators_commute(group: BlackBoxGroup, generators: Sequence) -> bool:
    """Ground truth: every generator pair commutes."""
    return all(group.mul(a, b) == group.mul(b, a)
               for a, b in itertools.combinations(generators, 2))
