"""Domain types and the elementary oscillator functions.

Global states are plain tuples ``(k_1, ..., k_T)`` counting oscillators per
discrete phase value.  Failure vectors are tuples of the same length whose
entries are either an ``int`` (number of broadcast failures for a phase group
that fired) or ``None`` for groups that did not fire.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

State = tuple[int, ...]
FailureVector = tuple[int | None, ...]

# Sentinel used when rendering failure vectors; internally we use None.
STAR = "*"


def round_half_up(x: float) -> int:
    """Round to the nearest integer, ties away from zero.

    All rounded quantities in the model are non-negative, so ties-away-from-zero
    coincides with ties-up.  Centralized so an alternate tie rule is a one-line
    change.
    """
    return math.floor(x + 0.5)


def perturbation(phi: int, alpha: int, epsilon: float) -> int:
    """Linear phase response: nearest integer to phi * alpha * epsilon."""
    return round_half_up(phi * alpha * epsilon)


ResponseFn = Callable[[int, int, float], int]

RESPONSE_FUNCTIONS: dict[str, ResponseFn] = {
    "linear-ms": perturbation,
}


def register_response(name: str, fn: ResponseFn) -> None:
    """Register a phase response function; must be positive and increasing."""
    RESPONSE_FUNCTIONS[name] = fn


def refractory(phi: int, delta: int, r: int) -> int:
    """Suppress a perturbation inside the refractory interval [1, r].

    With r == 0 the interval is empty and delta always passes through.
    """
    return 0 if 1 <= phi <= r else delta


@dataclass(frozen=True)
class ModelParams:
    """One population model: (N, T, R, epsilon, mu) plus the response family."""

    n: int
    t: int
    r: int
    epsilon: float
    mu: float
    response: str = "linear-ms"

    @property
    def response_fn(self) -> ResponseFn:
        return RESPONSE_FUNCTIONS[self.response]


def validate_params(p: ModelParams) -> ModelParams:
    """Check parameter bounds; returns p unchanged or raises ValueError."""
    if p.n < 1:
        raise ValueError(f"N must satisfy 1 <= N, got {p.n}")
    if p.t < 2:
        raise ValueError(f"T must satisfy 2 <= T, got {p.t}")
    if not 0 <= p.r < p.t:
        raise ValueError(f"R must satisfy 0 <= R < T, got R={p.r} with T={p.t}")
    if not p.epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got {p.epsilon}")
    if not 0 <= p.mu <= 1:
        raise ValueError(f"mu must be in [0, 1], got {p.mu}")
    if p.response not in RESPONSE_FUNCTIONS:
        raise ValueError(f"unknown phase response function {p.response!r}")
    return p


def validate_state(sigma: State, p: ModelParams) -> State:
    if len(sigma) != p.t:
        raise ValueError(f"state has {len(sigma)} entries, expected T={p.t}")
    if any(k < 0 for k in sigma):
        raise ValueError(f"state has negative counts: {sigma}")
    if sum(sigma) != p.n:
        raise ValueError(f"state counts sum to {sum(sigma)}, expected N={p.n}")
    return sigma


def is_firing(sigma: State) -> bool:
    """A state is firing iff oscillators occupy the last phase value."""
    return sigma[-1] > 0


def is_synchronised(sigma: State) -> bool:
    n = sum(sigma)
    return any(k == n for k in sigma)


def format_failure_vector(fv: FailureVector) -> str:
    return "(" + ",".join(STAR if f is None else str(f) for f in fv) + ")"
