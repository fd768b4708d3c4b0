"""Reachability and expected-reward queries over a built model.

Queries target the set of states whose phase coherence meets a threshold.
Expected accumulated rewards (time in cycles, energy in Watt-hours) are
solved from the linear fixed-point equations, either by direct elimination
or by value iteration; states that fail to reach the target with
probability one get an infinite expected reward.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .core import ModelParams, State, is_firing, refractory, validate_params
from .dtmc import DtmcModel, HardwareProfile, InitialMode, initial_distribution, MICAZ, skip_power, state_power
from .dynamics import skip_successor
from .metrics import phase_coherence

#: A state counts as failing to reach the target when its reachability
#: probability drops below 1 minus this threshold.
INFINITY_REACH_TOL = 1e-6


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    kind: str = "exact"  # "exact" | "iterative"
    tolerance: float = 1e-9
    max_iterations: int = 1_000_000
    dense_threshold: int = 2_000


@dataclass(frozen=True)
class AnalysisQuery:
    lam: float
    reward_kind: str = "time"  # "time" | "power"
    aggregate: str = "avg"  # "min" | "avg" | "max"
    solver: SolverConfig = SolverConfig()

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must be in [0, 1], got {self.lam}")
        if self.reward_kind not in ("time", "power"):
            raise ValueError(f"unknown reward kind {self.reward_kind!r}")
        if self.aggregate not in ("min", "avg", "max"):
            raise ValueError(f"unknown aggregate {self.aggregate!r}")


@dataclass(frozen=True)
class AnalysisResult:
    value: float
    reach_probability: float
    per_node_mWh: float | None
    states_explored: int
    solve_iterations: int
    wall_time: float


def target_set(model: DtmcModel, lam: float) -> frozenset[int]:
    """Indices of states whose phase coherence is at least lam."""
    t = model.params.t
    return frozenset(
        i for i, sigma in enumerate(model.states) if phase_coherence(sigma, t) >= lam
    )


def _reaching_states(model: DtmcModel, targets: frozenset[int]) -> np.ndarray:
    """Boolean mask of states from which the target set is reachable."""
    n = model.n_states
    predecessors: list[list[int]] = [[] for _ in range(n)]
    for src, row in enumerate(model.transitions):
        for tr in row:
            predecessors[tr.target].append(src)
    mask = np.zeros(n, dtype=bool)
    queue = deque(targets)
    for i in targets:
        mask[i] = True
    while queue:
        j = queue.popleft()
        for src in predecessors[j]:
            if not mask[src]:
                mask[src] = True
                queue.append(src)
    return mask


def _solve_linear(
    a: sp.csr_matrix, b: np.ndarray, solver: SolverConfig
) -> tuple[np.ndarray, int]:
    """Solve x = a x + b; returns the solution and iteration count."""
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), 0
    if solver.kind == "exact":
        system = sp.identity(n, format="csr") - a
        if n <= solver.dense_threshold:
            x = np.linalg.solve(system.toarray(), b)
        else:
            x = spla.spsolve(system.tocsc(), b)
        return x, 0
    if solver.kind == "iterative":
        x = np.zeros(n)
        for it in range(1, solver.max_iterations + 1):
            x_new = a @ x + b
            diff = np.max(np.abs(x_new - x))
            x = x_new
            if diff < solver.tolerance:
                return x, it
        residual = np.max(np.abs(a @ x + b - x))
        raise SolverError(
            f"value iteration did not converge in {solver.max_iterations} iterations"
            f" (residual {residual:.3e})"
        )
    raise ValueError(f"unknown solver kind {solver.kind!r}")


def _restricted_system(
    model: DtmcModel,
    unknown: np.ndarray,
    targets: frozenset[int],
    reward_kind: str | None,
) -> tuple[sp.csr_matrix, np.ndarray, np.ndarray]:
    """Transition sub-matrix over the unknown states plus the constant term.

    With reward_kind None the constant term is the one-step probability of
    entering the target set (reachability); otherwise it is the expected
    one-step reward of the chosen kind.
    """
    pos = -np.ones(model.n_states, dtype=np.int64)
    unknown_idx = np.flatnonzero(unknown)
    pos[unknown_idx] = np.arange(len(unknown_idx))
    rows, cols, vals = [], [], []
    b = np.zeros(len(unknown_idx))
    for local, src in enumerate(unknown_idx):
        for tr in model.transitions[src]:
            if reward_kind is not None:
                r = tr.time_reward if reward_kind == "time" else tr.power_reward
                b[local] += tr.probability * r
            if tr.target in targets:
                if reward_kind is None:
                    b[local] += tr.probability
            elif unknown[tr.target]:
                rows.append(local)
                cols.append(pos[tr.target])
                vals.append(tr.probability)
    a = sp.csr_matrix(
        (vals, (rows, cols)), shape=(len(unknown_idx), len(unknown_idx))
    )
    return a, b, unknown_idx


def reach_probability(
    model: DtmcModel, targets: frozenset[int], solver: SolverConfig = SolverConfig()
) -> tuple[np.ndarray, int]:
    """Per-state probability of eventually reaching the target set."""
    n = model.n_states
    x = np.zeros(n)
    for i in targets:
        x[i] = 1.0
    reaching = _reaching_states(model, targets)
    unknown = reaching.copy()
    for i in targets:
        unknown[i] = False
    a, b, unknown_idx = _restricted_system(model, unknown, targets, None)
    sol, iterations = _solve_linear(a, b, solver)
    x[unknown_idx] = np.clip(sol, 0.0, 1.0)
    return x, iterations


def expected_reward(
    model: DtmcModel,
    targets: frozenset[int],
    reward_kind: str,
    solver: SolverConfig = SolverConfig(),
    reach: np.ndarray | None = None,
) -> tuple[np.ndarray, int]:
    """Per-state expected accumulated reward until the target set is entered.

    Infinite wherever the target is not reached with probability one.
    """
    if reward_kind not in ("time", "power"):
        raise ValueError(f"unknown reward kind {reward_kind!r}")
    if reach is None:
        reach, _ = reach_probability(model, targets, solver)
    n = model.n_states
    values = np.zeros(n)
    certain = reach >= 1.0 - INFINITY_REACH_TOL
    values[~certain] = np.inf
    unknown = certain.copy()
    for i in targets:
        unknown[i] = False
    a, b, unknown_idx = _restricted_system(model, unknown, targets, reward_kind)
    sol, iterations = _solve_linear(a, b, solver)
    values[unknown_idx] = np.maximum(sol, 0.0)
    return values, iterations


def aggregate(
    model: DtmcModel,
    values: np.ndarray,
    reach: np.ndarray,
    agg: str,
    reward_kind: str,
    solve_iterations: int = 0,
    wall_time: float = 0.0,
) -> AnalysisResult:
    """Aggregate per-state expected values over the initial distribution."""
    support = sorted(model.initial)
    weights = np.array([model.initial[i] for i in support])
    vals = values[support]
    reaches = reach[support]
    if agg == "avg":
        value = float(np.dot(weights, np.where(np.isinf(vals), np.inf, vals)))
        if np.any(np.isinf(vals) & (weights > 0)):
            value = np.inf
        reach_p = float(np.min(reaches))
    elif agg == "max":
        value = float(np.max(vals))
        reach_p = float(np.min(reaches))
    elif agg == "min":
        arg = int(np.argmin(vals))
        value = float(vals[arg])
        reach_p = float(reaches[arg])
    else:
        raise ValueError(f"unknown aggregate {agg!r}")
    per_node = None
    if reward_kind == "power":
        per_node = value / model.params.n * 1000.0  # Wh -> mWh per node
    return AnalysisResult(
        value=value,
        reach_probability=reach_p,
        per_node_mWh=per_node,
        states_explored=model.n_states,
        solve_iterations=solve_iterations,
        wall_time=wall_time,
    )


def solve_query(model: DtmcModel, query: AnalysisQuery) -> AnalysisResult:
    """Answer one query end to end: target set, reachability, expected
    reward, aggregation."""
    start = time.perf_counter()
    targets = target_set(model, query.lam)
    reach, it1 = reach_probability(model, targets, query.solver)
    values, it2 = expected_reward(model, targets, query.reward_kind, query.solver, reach)
    wall = time.perf_counter() - start
    return aggregate(
        model, values, reach, query.aggregate, query.reward_kind,
        solve_iterations=it1 + it2, wall_time=wall,
    )


@dataclass(frozen=True)
class MonteCarloResult:
    mean: float
    std_error: float
    max_observed: float
    samples: int
    censored: int
    seed: int


def monte_carlo(
    p: ModelParams,
    profile: HardwareProfile = MICAZ,
    mode: InitialMode = "full",
    lam: float = 1.0,
    reward_kind: str = "time",
    samples: int = 10_000,
    seed: int = 0,
    step_cap: int = 10_000,
) -> MonteCarloResult:
    """Estimate the average accumulated reward by simulating runs.

    Failure counts are drawn per fired phase group from the binomial
    distribution, independently of the exact transition construction.  Runs
    exceeding step_cap are censored at the accumulated value and counted.
    """
    validate_params(p)
    rng = np.random.default_rng(seed)
    init = initial_distribution(p, mode)
    init_states = list(init)
    init_weights = np.array([init[s] for s in init_states])
    t, r, eps, mu = p.t, p.r, p.epsilon, p.mu
    response = p.response_fn
    w_t = profile.w_transmit()

    in_target: dict[State, bool] = {}
    skip_cache: dict[State, tuple[State, float, float]] = {}

    def target(sigma: State) -> bool:
        hit = in_target.get(sigma)
        if hit is None:
            hit = phase_coherence(sigma, t) >= lam
            in_target[sigma] = hit
        return hit

    def firing_step(sigma: State) -> tuple[State, float]:
        # sample one chain-reaction outcome; returns successor and its power
        new = [0] * t
        k_t = sigma[t - 1]
        failures = int(rng.binomial(k_t, mu)) if 0.0 < mu < 1.0 else (k_t if mu >= 1.0 else 0)
        s = k_t - failures
        new[0] += k_t
        for phi in range(t - 1, 0, -1):
            k = sigma[phi - 1]
            if not k:
                continue
            delta = refractory(phi, response(phi, s, eps), r)
            upd = phi + 1 + delta
            if upd > t:
                new[0] += k
            else:
                new[upd - 1] += k
        succ = tuple(new)
        power = state_power(sigma, p, profile) + succ[0] * w_t
        return succ, power

    totals = np.zeros(samples)
    censored = 0
    start_indices = rng.choice(len(init_states), size=samples, p=init_weights)
    for run in range(samples):
        sigma = init_states[int(start_indices[run])]
        acc = 0.0
        steps = 0
        while not target(sigma):
            if steps >= step_cap:
                censored += 1
                break
            if is_firing(sigma):
                succ, power = firing_step(sigma)
                acc += 1.0 / t if reward_kind == "time" else power
                sigma = succ
            else:
                cached = skip_cache.get(sigma)
                if cached is None:
                    succ, skipped = skip_successor(sigma)
                    cached = (succ, skipped / t, skip_power(sigma, p, profile))
                    skip_cache[sigma] = cached
                succ, time_r, power_r = cached
                acc += time_r if reward_kind == "time" else power_r
                sigma = succ
            steps += 1
        totals[run] = acc

    mean = float(np.mean(totals))
    stderr = float(np.std(totals, ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return MonteCarloResult(
        mean=mean,
        std_error=stderr,
        max_observed=float(np.max(totals)),
        samples=samples,
        censored=censored,
        seed=seed,
    )
