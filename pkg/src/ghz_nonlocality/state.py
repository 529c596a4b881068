"""Compressed exact representation of decohered GHZ states.

A GHZ state sent through independent depolarizing or phase-damping channels
stays diagonal in the computational basis apart from the single coherence
between ``|0...0>`` and ``|1...1>``. Both channels also act symmetrically on
the qubits, so every basis string of Hamming weight ``k`` carries the same
diagonal value ``d_k``. The state is therefore fully described by ``n + 1``
numbers plus one coherence.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

EXACT_BINOMIAL_MAX_N = 60


class NoiseKind(enum.Enum):
    DEPOLARIZING = "d"
    PHASE_DAMPING = "pd"

    @classmethod
    def parse(cls, value) -> "NoiseKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "d": cls.DEPOLARIZING,
            "depolarizing": cls.DEPOLARIZING,
            "pd": cls.PHASE_DAMPING,
            "phase_damping": cls.PHASE_DAMPING,
            "phasedamping": cls.PHASE_DAMPING,
            "dephasing": cls.PHASE_DAMPING,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown noise kind {value!r}") from None


@lru_cache(maxsize=4096)
def binom(n: int, k: int) -> float:
    """Binomial coefficient as a float; log-gamma above ``EXACT_BINOMIAL_MAX_N``."""
    if k < 0 or k > n:
        return 0.0
    if n <= EXACT_BINOMIAL_MAX_N:
        return float(math.comb(n, k))
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


def check_noise(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise strength must lie in [0, 1], got {p}")
    return p


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GhzDiagonalState:
    """GHZ-diagonal state of ``n`` qubits.

    Attributes
    ----------
    n : int
        Number of qubits.
    diag_profile : ndarray, shape (n + 1,)
        ``diag_profile[k]`` is the value of *each* diagonal entry whose basis
        string has Hamming weight ``k``. Multiplicities ``C(n, k)`` are not
        folded in.
    coherence : float
        Matrix element between ``|0...0>`` and ``|1...1>``.
    """

    n: int
    diag_profile: np.ndarray
    coherence: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        profile = _frozen(self.diag_profile)
        if profile.shape != (self.n + 1,):
            raise ValueError(f"diag_profile must have length n + 1 = {self.n + 1}")
        object.__setattr__(self, "diag_profile", profile)
        object.__setattr__(self, "coherence", float(self.coherence))

    def multiplicities(self) -> np.ndarray:
        return np.array([binom(self.n, k) for k in range(self.n + 1)])

    def trace(self) -> float:
        return math.fsum(self.multiplicities() * self.diag_profile)

    def violations(self, tol: float = 1e-12) -> list[str]:
        """List the invariants this state breaks (empty when valid)."""
        d = self.diag_profile
        out = []
        if np.any(d < -tol):
            out.append("negative diagonal entry")
        if abs(self.trace() - 1.0) > tol:
            out.append(f"trace {self.trace()!r} != 1")
        if abs(self.coherence) > math.sqrt(max(d[0], 0.0) * max(d[-1], 0.0)) + tol:
            out.append("corner coherence exceeds sqrt(d_0 d_n)")
        if np.max(np.abs(d - d[::-1])) > tol:
            out.append("profile is not bit-flip symmetric")
        return out

    def validate(self, tol: float = 1e-12) -> None:
        bad = self.violations(tol)
        if bad:
            raise ValueError("invalid GHZ-diagonal state: " + "; ".join(bad))

    def to_dict(self) -> dict:
        return {"n": self.n, "diag_profile": self.diag_profile.tolist(), "coherence": self.coherence}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "GhzDiagonalState":
        return cls(int(data["n"]), data["diag_profile"], data["coherence"])

    @classmethod
    def from_json(cls, text: str) -> "GhzDiagonalState":
        return cls.from_dict(json.loads(text))


def make_ghz(n: int) -> GhzDiagonalState:
    """Pure GHZ state ``(|0...0> + |1...1>) / sqrt(2)``."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    d = np.zeros(n + 1)
    d[0] = d[n] = 0.5
    return GhzDiagonalState(n, d, 0.5)


def is_pure_ghz(state: GhzDiagonalState, tol: float = 1e-14) -> bool:
    ref = make_ghz(state.n)
    return bool(
        np.max(np.abs(state.diag_profile - ref.diag_profile)) <= tol
        and abs(state.coherence - ref.coherence) <= tol
    )


def depolarized_profile(n: int, p: float) -> np.ndarray:
    # each qubit's population flips with probability p / 2
    q = p / 2
    k = np.arange(n + 1)
    return 0.5 * (q**k * (1 - q) ** (n - k) + (1 - q) ** k * q ** (n - k))


def apply_channel(state: GhzDiagonalState, kind: NoiseKind, p: float) -> GhzDiagonalState:
    """Send every qubit of a pure GHZ state through the given channel."""
    kind = NoiseKind.parse(kind)
    p = check_noise(p)
    if not is_pure_ghz(state):
        raise ValueError("apply_channel expects a pure GHZ state from make_ghz")
    n = state.n
    coherence = (1 - p) ** n * state.coherence
    if kind is NoiseKind.PHASE_DAMPING:
        return GhzDiagonalState(n, state.diag_profile, coherence)
    return GhzDiagonalState(n, depolarized_profile(n, p), coherence)


def decohered_ghz(n: int, kind: NoiseKind, p: float) -> GhzDiagonalState:
    return apply_channel(make_ghz(n), kind, p)


@dataclass(frozen=True, eq=False)
class GhzMixture:
    """Split of a decohered state into a GHZ part and a diagonal remainder.

    ``residual`` is ``None`` when the GHZ weight is one (no noise), since the
    remainder is undefined there.
    """

    n: int
    ghz_weight: float
    residual: GhzDiagonalState | None

    @property
    def residual_profile(self) -> np.ndarray | None:
        return None if self.residual is None else self.residual.diag_profile


def split_ghz_component(state: GhzDiagonalState, p: float) -> GhzMixture:
    """Write ``state`` as ``w |GHZ><GHZ| + (1 - w) rho_s`` with ``w = (1 - p)**n``."""
    p = check_noise(p)
    n = state.n
    w = (1 - p) ** n
    if p == 0.0:
        return GhzMixture(n, 1.0, None)
    ghz = make_ghz(n)
    rest = -math.expm1(n * math.log1p(-p)) if p < 1 else 1.0
    profile = (state.diag_profile - w * ghz.diag_profile) / rest
    coherence = (state.coherence - w * ghz.coherence) / rest
    return GhzMixture(n, w, GhzDiagonalState(n, profile, coherence))


def recombine(mixture: GhzMixture) -> GhzDiagonalState:
    """Inverse of :func:`split_ghz_component`."""
    w = mixture.ghz_weight
    ghz = make_ghz(mixture.n)
    res = mixture.residual
    if res is None:
        return ghz
    return GhzDiagonalState(
        mixture.n,
        w * ghz.diag_profile + (1 - w) * res.diag_profile,
        w * ghz.coherence + (1 - w) * res.coherence,
    )
