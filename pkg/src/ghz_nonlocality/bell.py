"""Correlation Bell functionals evaluated on decohered GHZ states."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .dense import from_structured, horodecki_tmatrix
from .errors import ConsistencyError, ResourceLimitError
from .linalg import jacobi_eigvalsh
from .state import GhzDiagonalState, binom, check_noise

ENUMERATION_MAX_N = 19
STRATEGY_MAX_N = 16
P_TRANSITION = 1 - 1 / math.sqrt(2)


@dataclass(frozen=True)
class Observable:
    """Single-qubit observable ``n . sigma`` with eigenvalues +1 and -1."""

    bloch: tuple[float, float, float]

    def __post_init__(self):
        b = tuple(float(v) for v in self.bloch)
        if len(b) != 3:
            raise ValueError("Bloch vector needs three components")
        if abs(math.sqrt(sum(v * v for v in b)) - 1.0) > 1e-12:
            raise ValueError(f"Bloch vector {b} is not a unit vector")
        object.__setattr__(self, "bloch", b)

    @classmethod
    def of(cls, x: float, y: float, z: float, normalize: bool = False) -> "Observable":
        if normalize:
            norm = math.sqrt(x * x + y * y + z * z)
            x, y, z = x / norm, y / norm, z / norm
        return cls((x, y, z))

    @classmethod
    def equatorial(cls, phi: float) -> "Observable":
        return cls((math.cos(phi), math.sin(phi), 0.0))

    @property
    def is_equatorial(self) -> bool:
        return abs(self.bloch[2]) <= 1e-12

    @property
    def raising(self) -> complex:
        """``<1| O |0> = n_x + i n_y``."""
        return complex(self.bloch[0], self.bloch[1])

    def __neg__(self) -> "Observable":
        return Observable(tuple(-v for v in self.bloch))


PAULI_X = Observable((1.0, 0.0, 0.0))
PAULI_Y = Observable((0.0, 1.0, 0.0))
PAULI_Z = Observable((0.0, 0.0, 1.0))

Settings = Sequence[tuple[Observable, Observable]]


def setting_bits(n: int) -> np.ndarray:
    """All setting strings as rows of bits; party 0 is the most significant bit."""
    idx = np.arange(2**n)
    return (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1


@dataclass(frozen=True, eq=False)
class BellFunctional:
    """Full-correlation functional ``sum_x g(x) C(x)``.

    ``g`` maps an ``(m, n)`` array of setting bits to ``m`` coefficients.
    """

    name: str
    n: int
    g: Callable[[np.ndarray], np.ndarray]
    local_bound: float
    ns_bound: float
    abs_sum: float

    def __post_init__(self):
        if not self.local_bound <= self.ns_bound <= self.abs_sum + 1e-12:
            raise ValueError("bounds must satisfy local <= nonsignalling <= sum |g|")

    def table(self) -> np.ndarray:
        if self.n > ENUMERATION_MAX_N:
            raise ResourceLimitError(f"coefficient table for n={self.n} exceeds 2**{ENUMERATION_MAX_N}")
        return np.asarray(self.g(setting_bits(self.n)), dtype=float)


def _chsh_g(bits: np.ndarray) -> np.ndarray:
    return np.where(bits[:, 0] & bits[:, 1], -1.0, 1.0)


def _mermin_g(bits: np.ndarray) -> np.ndarray:
    # cos(pi/2 * s) for integer s, without floating-point cosine noise
    return np.array([1.0, 0.0, -1.0, 0.0])[bits.sum(axis=1) % 4]


def chsh_functional() -> BellFunctional:
    return BellFunctional("chsh", 2, _chsh_g, local_bound=2.0, ns_bound=4.0, abs_sum=4.0)


def mermin_local_bound(n: int) -> float:
    return 2.0 ** (n // 2) if n % 2 == 0 else 2.0 ** ((n - 1) // 2)


def mermin_functional(n: int) -> BellFunctional:
    if n < 2:
        raise ValueError(f"Mermin functional needs n >= 2, got {n}")
    algebraic = 2.0 ** (n - 1)
    return BellFunctional("mermin", n, _mermin_g, mermin_local_bound(n), algebraic, algebraic)


def functional_from_table(table: Sequence[float], name: str = "custom", ns_bound: float | None = None) -> BellFunctional:
    """Wrap an explicit coefficient table; the local bound is found by enumeration."""
    table = np.asarray(table, dtype=float)
    n = int(round(math.log2(table.size)))
    if 2**n != table.size:
        raise ValueError("table length must be a power of two")
    abs_sum = float(np.sum(np.abs(table)))
    frozen = table.copy()

    def g(bits):
        weights = 1 << np.arange(n - 1, -1, -1)
        return frozen[bits @ weights]

    return BellFunctional(name, n, g, local_bound(table), abs_sum if ns_bound is None else ns_bound, abs_sum)


def local_bound(table: Sequence[float]) -> float:
    """Maximum of ``sum_x g(x) prod_i a_i(x_i)`` over deterministic strategies.

    The functional is multilinear in each party's response vector
    ``(a_i(0), a_i(1))``, and negating that vector negates the value. So the
    first ``n - 1`` parties can be restricted to ``(1, 1)`` and ``(1, -1)``,
    and the last party's best response is ``|h(0)| + |h(1)|``.
    """
    table = np.asarray(table, dtype=float)
    n = int(round(math.log2(table.size)))
    if n > STRATEGY_MAX_N:
        raise ResourceLimitError(f"strategy enumeration is capped at n={STRATEGY_MAX_N}")
    h = table.reshape(1, -1)
    for _ in range(n - 1):
        half = h.shape[1] // 2
        zero, one = h[:, :half], h[:, half:]
        h = np.concatenate([zero + one, zero - one], axis=0)
    return float(np.max(np.abs(h[:, 0]) + np.abs(h[:, 1])))


def z_parity(state: GhzDiagonalState) -> float:
    """``<Z x ... x Z>`` on all qubits."""
    return pauli_parity_expectation(state, state.n)


def pauli_parity_expectation(state: GhzDiagonalState, support_size: int) -> float:
    """Expectation of a Z string acting on ``support_size`` of the qubits."""
    n, s = state.n, support_size
    if not 0 <= s <= n:
        raise ValueError(f"support size must lie in [0, {n}], got {s}")
    terms = []
    for k in range(n + 1):
        # Krawtchouk sum: strings of weight k with j ones inside the support
        kraw = sum((-1) ** j * binom(s, j) * binom(n - s, k - j) for j in range(max(0, k - (n - s)), min(s, k) + 1))
        terms.append(state.diag_profile[k] * kraw)
    return math.fsum(terms)


def correlation(state: GhzDiagonalState, observables: Sequence[Observable]) -> float:
    """``Tr[rho O_1 x ... x O_n]`` for single-qubit observables.

    Only the all-Z part of each observable sees the diagonal, and only the
    all-equatorial part sees the corner coherence.
    """
    if len(observables) != state.n:
        raise ValueError(f"need {state.n} observables, got {len(observables)}")
    zprod = math.prod(o.bloch[2] for o in observables)
    value = 0.0
    if zprod != 0.0:
        value += zprod * z_parity(state)
    if state.coherence != 0.0:
        value += 2 * state.coherence * math.prod(o.raising for o in observables).real
    return value


def _check_settings(functional: BellFunctional, settings: Settings) -> None:
    if len(settings) != functional.n:
        raise ValueError(f"functional is for {functional.n} parties, got settings for {len(settings)}")


def correlations_all(state: GhzDiagonalState, settings: Settings) -> np.ndarray:
    """Correlation for every setting string, in :func:`setting_bits` order."""
    if len(settings) != state.n:
        raise ValueError(f"need settings for {state.n} parties, got {len(settings)}")
    zvec = np.ones(1)
    wvec = np.ones(1, dtype=complex)
    for o0, o1 in settings:
        zvec = np.kron(zvec, [o0.bloch[2], o1.bloch[2]])
        wvec = np.kron(wvec, [o0.raising, o1.raising])
    return zvec * z_parity(state) + 2 * state.coherence * wvec.real


def bell_value_enumerated(functional: BellFunctional, state: GhzDiagonalState, settings: Settings) -> float:
    _check_settings(functional, settings)
    if functional.n != state.n:
        raise ValueError("functional and state have different party counts")
    g = functional.table()
    c = correlations_all(state, settings)
    return math.fsum(g * c)


def mermin_value_product_form(state: GhzDiagonalState, settings: Settings) -> float:
    """Mermin value in O(n) for arbitrary per-party settings.

    Uses ``sum_x cos(pi/2 |x|) prod_i f_i(x_i) = Re prod_i (f_i(0) + i f_i(1))``
    for the diagonal part, and the same identity applied to ``W`` and
    ``conj(W)`` for the coherence part.
    """
    zterm = 1.0 + 0j
    w_plus = 1.0 + 0j
    w_conj = 1.0 + 0j
    for o0, o1 in settings:
        zterm *= complex(o0.bloch[2], o1.bloch[2])
        w0, w1 = o0.raising, o1.raising
        w_plus *= w0 + 1j * w1
        w_conj *= w0.conjugate() + 1j * w1.conjugate()
    value = 0.0
    if zterm != 0:
        value += z_parity(state) * zterm.real
    value += state.coherence * (w_plus.real + w_conj.real)
    return value


def bell_value(functional: BellFunctional, state: GhzDiagonalState, settings: Settings) -> float:
    """Evaluate ``sum_x g(x) C(x)``.

    Mermin functionals with ``n >= 20`` use the product form; everything else
    is summed over all ``2**n`` setting strings.
    """
    _check_settings(functional, settings)
    if functional.n != state.n:
        raise ValueError("functional and state have different party counts")
    if functional.name == "mermin" and functional.n > ENUMERATION_MAX_N:
        return mermin_value_product_form(state, settings)
    return bell_value_enumerated(functional, state, settings)


def chsh_standard_settings() -> list[tuple[Observable, Observable]]:
    """Settings ``(-X, Z)`` for party 1 and ``((X - Z)/sqrt2, (X + Z)/sqrt2)`` for party 2."""
    r = 1 / math.sqrt(2)
    return [(-PAULI_X, PAULI_Z), (Observable((r, 0.0, -r)), Observable((r, 0.0, r)))]


def mermin_settings(n: int) -> list[tuple[Observable, Observable]]:
    return [(PAULI_X, PAULI_Y)] * n


def horodecki_m(tmatrix: np.ndarray) -> float:
    """Sum of the two largest eigenvalues of ``T^T T``."""
    w = jacobi_eigvalsh(tmatrix.T @ tmatrix)
    return float(w[-1] + w[-2])


def chsh_max(state: GhzDiagonalState) -> float:
    """Maximal CHSH value over all measurement settings (Horodecki criterion)."""
    if state.n != 2:
        raise ValueError(f"CHSH needs n=2, got n={state.n}")
    t = horodecki_tmatrix(from_structured(state))
    return 2 * math.sqrt(max(horodecki_m(t), 0.0))


def chsh_max_phase_damping(p: float) -> float:
    return 2 * math.sqrt(1 + (1 - p) ** 4)


def chsh_max_depolarizing(p: float) -> float:
    return 2 * math.sqrt(2) * (1 - p) ** 2


def chsh_critical_depolarizing() -> float:
    """Depolarizing strength where the two-qubit CHSH maximum drops to 2."""
    return 1 - 2 ** -0.25


class MerminReport(NamedTuple):
    n: int
    p: float
    value: float
    local_bound: float
    visibility: float
    p_c: float
    p_t: float


def mermin_critical_noise(n: int) -> float:
    """Noise strength above which the X/Y Mermin value no longer beats the local bound."""
    if n < 3:
        raise ValueError(f"Mermin inequality needs n >= 3, got {n}")
    exponent = (n - 1) / n if n % 2 else (n - 2) / n
    return 1 - (1 / math.sqrt(2)) ** exponent


def mermin_value(n: int, p: float) -> float:
    return (1 - p) ** n * 2.0 ** (n - 1)


def mermin_visibility(n: int, p: float) -> float:
    return mermin_value(n, p) / mermin_local_bound(n)


def mermin_report(n: int, p: float) -> MerminReport:
    if n < 3:
        raise ValueError(f"Mermin inequality needs n >= 3, got {n}")
    p = check_noise(p)
    value = mermin_value(n, p)
    lb = mermin_local_bound(n)
    p_c = mermin_critical_noise(n)
    if not p_c < P_TRANSITION:
        raise ConsistencyError(f"p_c({n}) = {p_c} is not below p_t")
    return MerminReport(n, p, value, lb, value / lb, p_c, P_TRANSITION)
