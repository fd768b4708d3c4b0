"""Construction of the reachable Markov chain with time and power rewards.

States are the population count tuples; the distinguished unconfigured
initial state is kept implicit and represented by the initial distribution.
Time rewards are measured in oscillation cycles (1/T per firing step,
(T - delta)/T for a skip over T - delta silent steps).  Power rewards are in
Watt-hours and follow the hardware profile: idling current inside the
refractory interval, receive current outside it, plus the transmission cost
of every synchronisation message sent by a firing group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Union

from .core import ModelParams, State, is_firing, validate_params
from .dynamics import skip_successor, successor_distribution


class StateSpaceLimitExceeded(RuntimeError):
    def __init__(self, n_states: int, n_transitions: int, cap: int):
        super().__init__(
            f"state-space cap {cap} exceeded: {n_states} states, {n_transitions} transitions so far"
        )
        self.n_states = n_states
        self.n_transitions = n_transitions


@dataclass(frozen=True)
class HardwareProfile:
    """Current draws and timing of one node; yields per-step energies.

    cycle_s is the length of one full oscillation cycle in seconds, message_s
    the transmission time of one synchronisation message.
    """

    name: str
    idle_a: float
    receive_a: float
    transmit_a: float
    voltage: float
    cycle_s: float
    message_s: float

    def __post_init__(self) -> None:
        for attr in ("idle_a", "receive_a", "transmit_a", "voltage", "cycle_s", "message_s"):
            if getattr(self, attr) <= 0:
                raise ValueError(f"hardware profile field {attr} must be positive")

    def w_idle(self, t: int) -> float:
        """Watt-hours per node per discrete step in idle mode."""
        return self.idle_a * self.voltage * self.cycle_s / (3600.0 * t)

    def w_receive(self, t: int) -> float:
        """Watt-hours per node per discrete step in receive mode."""
        return self.receive_a * self.voltage * self.cycle_s / (3600.0 * t)

    def w_transmit(self) -> float:
        """Watt-hours to transmit one synchronisation message."""
        return self.transmit_a * self.voltage * self.message_s / 3600.0


MICAZ = HardwareProfile(
    name="micaz",
    idle_a=20e-6,
    receive_a=19.7e-3,
    transmit_a=17.4e-3,
    voltage=3.0,
    cycle_s=1.0,
    message_s=1e-3,
)

PROFILES: dict[str, HardwareProfile] = {"micaz": MICAZ}


@dataclass(frozen=True)
class RestabilisationSpec:
    """Initial-state restriction: at least n - u oscillators share a phase."""

    u: int


InitialMode = Union[str, RestabilisationSpec]  # "full" or a restabilisation spec


class Transition(NamedTuple):
    target: int
    probability: float
    time_reward: float
    power_reward: float


@dataclass(frozen=True)
class DtmcModel:
    params: ModelParams
    profile: HardwareProfile
    mode: InitialMode
    states: tuple[State, ...]
    index: dict[State, int] = field(repr=False)
    transitions: tuple[tuple[Transition, ...], ...] = field(repr=False)
    initial: dict[int, float] = field(repr=False)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_transitions(self) -> int:
        return sum(len(row) for row in self.transitions)


def state_count(p: ModelParams) -> int:
    """|Gamma|: weak compositions of n into t parts."""
    return math.comb(p.n + p.t - 1, p.t - 1)


def enumerate_states(p: ModelParams) -> Iterator[State]:
    """All global states in lexicographic order of the counts tuple."""
    n, t = p.n, p.t

    def rec(prefix: list[int], remaining: int, slots: int) -> Iterator[State]:
        if slots == 1:
            yield tuple(prefix + [remaining])
            return
        for k in range(remaining + 1):
            yield from rec(prefix + [k], remaining - k, slots - 1)

    yield from rec([], n, t)


def multinomial(counts: State) -> int:
    """Number of assignments of distinct oscillators realizing the counts."""
    total = sum(counts)
    coeff = 1
    for k in counts:
        coeff *= math.comb(total, k)
        total -= k
    return coeff


def restabilisation_support(p: ModelParams, u: int) -> list[State]:
    """Gamma_U: states where some phase holds at least n - u oscillators."""
    if not 1 <= u < p.n:
        raise ValueError(f"U must satisfy 1 <= U < N, got U={u} with N={p.n}")
    base_params = ModelParams(n=u, t=p.t, r=p.r, epsilon=p.epsilon, mu=p.mu)
    support: set[State] = set()
    for loose in enumerate_states(base_params):
        for i in range(p.t):
            counts = list(loose)
            counts[i] += p.n - u
            support.add(tuple(counts))
    return sorted(support)


def initial_distribution(p: ModelParams, mode: InitialMode = "full") -> dict[State, float]:
    """Multinomial weights over the initial support, normalised to one."""
    validate_params(p)
    if mode == "full":
        denom = p.t**p.n  # equals the sum of all multinomial coefficients
        return {sigma: multinomial(sigma) / denom for sigma in enumerate_states(p)}
    if isinstance(mode, RestabilisationSpec):
        support = restabilisation_support(p, mode.u)
        weights = {sigma: multinomial(sigma) for sigma in support}
        denom = sum(weights.values())
        return {sigma: w / denom for sigma, w in weights.items()}
    raise ValueError(f"unknown initial mode {mode!r}")


def state_power(sigma: State, p: ModelParams, profile: HardwareProfile) -> float:
    """Network power consumption in one discrete step: refractory groups
    idle, all other groups listen."""
    w_i = profile.w_idle(p.t)
    w_r = profile.w_receive(p.t)
    idle = sum(sigma[: p.r])
    return idle * w_i + (p.n - idle) * w_r


def skip_power(sigma: State, p: ModelParams, profile: HardwareProfile) -> float:
    """Power consumed from a non-firing state until the next firing state,
    accumulated over the omitted intermediate steps.

    In step j the refractory interval has effectively shrunk by j for the
    advancing oscillators; index ranges clamp to empty once j >= R.
    """
    w_i = profile.w_idle(p.t)
    w_r = profile.w_receive(p.t)
    t, r = p.t, p.r
    delta = max(phi for phi in range(1, t + 1) if sigma[phi - 1] > 0)
    total = 0.0
    for j in range(t - delta):
        idle = sum(sigma[phi - 1] for phi in range(1, max(r - j, 0) + 1))
        recv = sum(sigma[phi - 1] for phi in range(max(r + 1 - j, 1), delta + 1))
        total += idle * w_i + recv * w_r
    return total


def build_dtmc(
    p: ModelParams,
    profile: HardwareProfile = MICAZ,
    mode: InitialMode = "full",
    max_states: int | None = None,
) -> DtmcModel:
    """Breadth-first closure of the initial support under the successor
    dynamics, annotated with transition probabilities and rewards.

    States are re-indexed lexicographically after exploration so the result
    is independent of traversal order.
    """
    validate_params(p)
    init = initial_distribution(p, mode)
    frontier = list(init)
    seen: set[State] = set(frontier)
    succ: dict[State, list[tuple[State, float]]] = {}
    n_transitions = 0
    while frontier:
        sigma = frontier.pop()
        if is_firing(sigma):
            dist = successor_distribution(sigma, p)
            out = [(b.target, b.probability) for b in dist.branches]
        else:
            target, _ = skip_successor(sigma)
            out = [(target, 1.0)]
        succ[sigma] = out
        n_transitions += len(out)
        for target, _ in out:
            if target not in seen:
                seen.add(target)
                frontier.append(target)
        if max_states is not None and len(seen) > max_states:
            raise StateSpaceLimitExceeded(len(seen), n_transitions, max_states)

    states = tuple(sorted(seen))
    index = {sigma: i for i, sigma in enumerate(states)}
    w_t = profile.w_transmit()
    rows: list[tuple[Transition, ...]] = []
    for sigma in states:
        if is_firing(sigma):
            time_r = 1.0 / p.t
            base_power = state_power(sigma, p, profile)
            row = tuple(
                Transition(index[tgt], prob, time_r, base_power + tgt[0] * w_t)
                for tgt, prob in succ[sigma]
            )
        else:
            _, skipped = skip_successor(sigma)
            (tgt, prob), = succ[sigma]
            row = (
                Transition(index[tgt], prob, skipped / p.t, skip_power(sigma, p, profile)),
            )
        rows.append(row)

    initial = {index[sigma]: weight for sigma, weight in init.items()}
    return DtmcModel(
        params=p,
        profile=profile,
        mode=mode,
        states=states,
        index=index,
        transitions=tuple(rows),
        initial=initial,
    )
