"""Entanglement of decohered GHZ states: negativity, concurrence, thresholds."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

from .state import GhzDiagonalState, NoiseKind, decohered_ghz

BISECTION_STEPS = 60


def _check_cut(n: int, size_a: int) -> None:
    if not 1 <= size_a <= n - 1:
        raise ValueError(f"cut size must lie in [1, {n - 1}], got {size_a}")


def half_cut(n: int) -> int:
    return (n + 1) // 2


def negativity(state: GhzDiagonalState, size_a: int) -> float:
    """Negativity across a cut with ``size_a`` qubits on one side.

    Partial transposition moves the corner coherence onto the pair of strings
    ``1_A 0_B`` and ``0_A 1_B``, of weights ``size_a`` and ``n - size_a``.
    That 2x2 block is the only place a negative eigenvalue can appear.
    The convention is unnormalized: a pure GHZ state gives 1/2.
    """
    _check_cut(state.n, size_a)
    da = state.diag_profile[size_a]
    db = state.diag_profile[state.n - size_a]
    mu = 0.5 * (da + db)
    delta = 0.5 * (da - db)
    return max(0.0, float(math.hypot(delta, state.coherence) - mu))


def half_negativity(state: GhzDiagonalState) -> float:
    return negativity(state, half_cut(state.n))


def concurrence_two_qubit(state: GhzDiagonalState) -> float:
    if state.n != 2:
        raise ValueError(f"two-qubit concurrence needs n=2, got n={state.n}")
    d0 = state.diag_profile[0]
    return max(0.0, float(2 * (d0 + abs(state.coherence)) - 1))


def _bisect_zero(f: Callable[[float], float], lo: float = 0.0, hi: float = 1.0) -> float:
    """Boundary between ``f > 0`` (at ``lo``) and ``f <= 0`` (at ``hi``)."""
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class Threshold(NamedTuple):
    p: float
    finite: bool


def negativity_threshold(n: int, size_a: int) -> float:
    """Depolarizing strength at which the negativity across ``size_a`` vanishes."""
    _check_cut(n, size_a)
    return _bisect_zero(lambda p: negativity(decohered_ghz(n, NoiseKind.DEPOLARIZING, p), size_a))


def separability_threshold(n: int, kind: NoiseKind) -> Threshold:
    """Critical noise where the half-versus-half negativity disappears.

    Phase damping keeps the coherence ``(1 - p)**n / 2`` above the zero
    middle populations for every ``p < 1``, so it has no finite threshold and
    ``Threshold(1.0, finite=False)`` is returned.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if NoiseKind.parse(kind) is NoiseKind.PHASE_DAMPING:
        return Threshold(1.0, False)
    return Threshold(negativity_threshold(n, half_cut(n)), True)


def decay_bound_check(kind: NoiseKind, n: int, p: float) -> tuple[float, float]:
    """Half-cut negativity at ``p`` and the bound ``(1 - p)**n`` times its value at 0."""
    measured = half_negativity(decohered_ghz(n, kind, p))
    bound = (1 - p) ** n * half_negativity(decohered_ghz(n, kind, 0.0))
    return measured, bound


def concurrence_crossover() -> float:
    """Noise ``p`` above which phase damping at ``p`` leaves more concurrence
    than depolarization at ``p / 2``."""

    def excess(p):
        pd = concurrence_two_qubit(decohered_ghz(2, NoiseKind.PHASE_DAMPING, p))
        d = concurrence_two_qubit(decohered_ghz(2, NoiseKind.DEPOLARIZING, p / 2))
        return d - pd

    return _bisect_zero(excess, 1e-9, 1.0)
