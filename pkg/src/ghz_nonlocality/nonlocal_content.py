"""Bounds on the nonlocal content of decohered GHZ correlations.

The nonlocal content is the smallest weight of a nonsignalling part over all
splits of a correlation into local and nonsignalling components. Only bounds
are computed here; the optimal split itself is never constructed.
"""

from __future__ import annotations

from typing import NamedTuple

from .bell import P_TRANSITION, mermin_visibility
from .errors import ConsistencyError
from .state import check_noise


class NonlocalContentBounds(NamedTuple):
    n: int
    p: float
    lower: float
    upper: float


def lower_bound_generic(value: float, local_bound: float, ns_bound: float) -> float:
    """Nonlocal content implied by a Bell value, clamped to ``[0, 1]``."""
    if ns_bound <= local_bound:
        raise ValueError("nonsignalling bound must exceed the local bound")
    return min(1.0, max(0.0, (value - local_bound) / (ns_bound - local_bound)))


def mermin_content_bounds(n: int, p: float) -> NonlocalContentBounds:
    """Lower bound from the Mermin visibility, upper bound from the GHZ weight.

    The GHZ weight ``(1 - p)**n`` of the decohered state is an upper bound
    because the remaining separable part only produces local correlations.
    Odd ``n`` only.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError(f"content bounds are defined for odd n >= 3, got {n}")
    p = check_noise(p)
    scale = 2.0 ** ((n - 1) // 2)
    lower = lower_bound_generic(mermin_visibility(n, p), 1.0, scale)
    return NonlocalContentBounds(n, p, lower, (1 - p) ** n)


def sandwich_convergence(p: float, n_max: int) -> list[tuple[int, float]]:
    """Ratio ``lower / upper`` along odd ``n`` from 3 to ``n_max``.

    Only meaningful below the visibility transition, where the ratio climbs
    to 1. Raises ``ConsistencyError`` if the ratio ever decreases.
    """
    p = check_noise(p)
    if p >= P_TRANSITION:
        raise ValueError(f"convergence only holds for p < {P_TRANSITION:.6f}, got {p}")
    series = []
    for n in range(3, n_max + 1, 2):
        b = mermin_content_bounds(n, p)
        series.append((n, b.lower / b.upper))
    for (_, prev), (n, cur) in zip(series, series[1:]):
        if cur < prev - 1e-15 or (0 < prev < 1 - 1e-12 and cur <= prev):
            raise ConsistencyError(f"lower/upper ratio stopped increasing at n={n}")
    return series
