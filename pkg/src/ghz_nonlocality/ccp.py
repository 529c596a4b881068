"""Communication-complexity games driven by Bell functionals.

Each of ``n`` parties receives a setting bit ``x_i`` and a sign ``y_i``. The
settings are drawn from ``Q(x) = |g(x)| / sum |g|`` and the signs uniformly.
Everyone must output ``f = y_1 ... y_n sign(g(x))`` while broadcasting a
single bit each.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .bell import (
    P_TRANSITION,
    BellFunctional,
    Observable,
    correlations_all,
    mermin_functional,
    mermin_settings,
)
from .errors import UnsupportedProtocolError
from .state import GhzDiagonalState, check_noise

CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class CcpInstance:
    n: int
    functional: BellFunctional
    q_dist: np.ndarray

    @classmethod
    def from_functional(cls, functional: BellFunctional) -> "CcpInstance":
        g = functional.table()
        q = np.abs(g) / np.sum(np.abs(g))
        q.setflags(write=False)
        return cls(functional.n, functional, q)


def mermin_instance(n: int) -> CcpInstance:
    return CcpInstance.from_functional(mermin_functional(n))


class CcpOutcome(NamedTuple):
    n: int
    p: float
    p_s_quantum: float
    p_s_local: float
    gain: float
    even_variant: bool


def success_probability(value: float, abs_sum: float) -> float:
    if abs(value) > abs_sum * (1 + 1e-12):
        raise ValueError(f"|value| = {abs(value)} exceeds sum |g| = {abs_sum}")
    return 0.5 * (1 + value / abs_sum)


def local_success_mermin(n: int) -> float:
    # even n uses 2**(n - 2) under the square root
    exponent = n - 1 if n % 2 else n - 2
    return 0.5 * (1 + 1 / math.sqrt(2.0**exponent))


def quantum_gain(n: int, p: float) -> CcpOutcome:
    """Success probabilities and gain of the Mermin game with a decohered GHZ state."""
    if n < 3:
        raise ValueError(f"the Mermin game needs n >= 3, got {n}")
    p = check_noise(p)
    quantum = 0.5 * (1 + (1 - p) ** n)
    local = local_success_mermin(n)
    return CcpOutcome(n, p, quantum, local, quantum - local, n % 2 == 0)


def transition_n(p: float) -> float | None:
    """Party count where the odd-n gain turns from growth to decay.

    Returns ``None`` outside ``0 < p < 1 - 1/sqrt(2)``, where no finite
    transition exists.
    """
    if not 0.0 < p < P_TRANSITION:
        return None
    arg = math.sqrt(2) * math.log(1 / math.sqrt(2)) / math.log(1 - p)
    return math.log(arg) / math.log(math.sqrt(2) * (1 - p))


def outcome_distribution(correlation_value: float, n: int) -> np.ndarray:
    """``P(a | x) = 2**-n (1 + C(x) prod a_i)`` over all outcome strings.

    Valid when every proper sub-correlation vanishes, which holds for
    equatorial settings on GHZ-diagonal states. Index bit 1 means outcome -1.
    """
    idx = np.arange(2**n)
    parity = np.array([1.0, -1.0])[np.array([bin(i).count("1") & 1 for i in idx])]
    return (1 + correlation_value * parity) / 2**n


def _run_chunk(seed_seq: np.random.SeedSequence, size: int, n: int, support: np.ndarray,
               q: np.ndarray, signs: np.ndarray, corr: np.ndarray) -> int:
    rng = np.random.Generator(np.random.Philox(seed_seq))
    pick = rng.choice(support.size, size=size, p=q)
    c = corr[pick]
    y = rng.choice([-1, 1], size=(size, n))
    # outcome string: uniform first n - 1 bits, last bit biases the parity by C(x)
    a = rng.choice([-1, 1], size=(size, n))
    want_even = rng.random(size) < (1 + c) / 2
    a[:, -1] = np.where(want_even, 1, -1) * np.prod(a[:, :-1], axis=1)
    broadcast = a * y
    guess = np.prod(broadcast, axis=1)
    f = np.prod(y, axis=1) * signs[pick]
    return int(np.count_nonzero(guess == f))


def simulate_game(instance: CcpInstance, state: GhzDiagonalState, trials: int, seed: int,
                  settings: Sequence[tuple[Observable, Observable]] | None = None,
                  workers: int = 1) -> float:
    """Monte-Carlo success rate of the single-broadcast parity protocol.

    Each party measures its setting, broadcasts ``a_i * y_i`` and everyone
    guesses the product of all broadcasts. Trials are split into fixed chunks
    with independent Philox substreams, so the rate depends only on ``seed``
    and not on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if state.n != instance.n:
        raise ValueError("state and game have different party counts")
    settings = mermin_settings(instance.n) if settings is None else list(settings)
    if not all(o.is_equatorial for pair in settings for o in pair):
        raise UnsupportedProtocolError("outcome sampling requires equatorial observables")
    g = instance.functional.table()
    support = np.flatnonzero(g)
    q = instance.q_dist[support]
    q = q / q.sum()
    signs = np.sign(g)
    corr = correlations_all(state, settings)[support]
    signs = signs[support]

    sizes = [CHUNK] * (trials // CHUNK)
    if trials % CHUNK:
        sizes.append(trials % CHUNK)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    args = [(ss, size, instance.n, support, q, signs, corr) for ss, size in zip(streams, sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = list(pool.map(lambda a: _run_chunk(*a), args))
    else:
        hits = [_run_chunk(*a) for a in args]
    return sum(hits) / trials


def expected_success(instance: CcpInstance, state: GhzDiagonalState,
                     settings: Sequence[tuple[Observable, Observable]] | None = None) -> float:
    """``1/2 (1 + sum_x Q(x) sign(g(x)) C(x))`` by enumeration."""
    settings = mermin_settings(instance.n) if settings is None else list(settings)
    g = instance.functional.table()
    c = correlations_all(state, settings)
    return 0.5 * (1 + math.fsum(instance.q_dist * np.sign(g) * c))
