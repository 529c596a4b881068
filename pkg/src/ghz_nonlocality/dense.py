"""Brute-force density-matrix backend used to verify the structured formulas.

Qubit ``0`` is the most significant bit of the computational-basis index,
matching ``np.kron`` ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ResourceLimitError
from .linalg import jacobi_eigh, jacobi_eigvalsh
from .state import GhzDiagonalState, NoiseKind, check_noise

DENSE_CAP = 8

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (X, Y, Z)


def _check_cap(n: int, cap: int | None) -> None:
    limit = DENSE_CAP if cap is None else cap
    if n > limit:
        raise ResourceLimitError(f"dense state with n={n} exceeds the cap of {limit} qubits")


@dataclass(frozen=True, eq=False)
class DenseState:
    """Full ``2**n x 2**n`` density matrix."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 2**self.n
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match n={self.n}")

    def validate(self, tol: float = 1e-12, eig_tol: float = 1e-10) -> None:
        """Raise ``ValueError`` unless the matrix is a valid density matrix."""
        m = self.matrix
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > tol:
            raise ValueError(f"not Hermitian (deviation {herm:.3g})")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > tol:
            raise ValueError(f"trace is {tr}")
        lo = float(jacobi_eigvalsh(m)[0])
        if lo < -eig_tol:
            raise ValueError(f"negative eigenvalue {lo:.3g}")

    def expectation(self, op: np.ndarray) -> complex:
        return complex(np.trace(self.matrix @ op))


def ghz_dense(n: int, cap: int | None = None) -> DenseState:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    _check_cap(n, cap)
    dim = 2**n
    psi = np.zeros(dim, dtype=complex)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    return DenseState(n, np.outer(psi, psi.conj()))


def product_state(bits: Sequence[int]) -> DenseState:
    dim = 2 ** len(bits)
    idx = int("".join(str(b) for b in bits), 2)
    m = np.zeros((dim, dim), dtype=complex)
    m[idx, idx] = 1.0
    return DenseState(len(bits), m)


def maximally_mixed(n: int) -> DenseState:
    dim = 2**n
    return DenseState(n, np.eye(dim, dtype=complex) / dim)


def from_structured(state: GhzDiagonalState, cap: int | None = None) -> DenseState:
    """Expand a structured GHZ-diagonal state into its full matrix."""
    n = state.n
    _check_cap(n, cap)
    dim = 2**n
    weights = np.array([bin(i).count("1") for i in range(dim)])
    m = np.diag(np.asarray(state.diag_profile)[weights]).astype(complex)
    m[0, -1] = m[-1, 0] = state.coherence
    return DenseState(n, m)


def kraus_for(kind: NoiseKind, p: float) -> list[np.ndarray]:
    """Single-qubit Kraus operators of the depolarizing or phase-damping channel."""
    kind = NoiseKind.parse(kind)
    check_noise(p)
    if kind is NoiseKind.DEPOLARIZING:
        ops = [math.sqrt(1 - 3 * p / 4) * I2]
        if p > 0:
            ops += [math.sqrt(p / 4) * P for P in PAULIS]
        return ops
    ops = [math.sqrt(1 - p) * I2]
    if p > 0:
        ops += [
            math.sqrt(p) * np.array([[1, 0], [0, 0]], dtype=complex),
            math.sqrt(p) * np.array([[0, 0], [0, 1]], dtype=complex),
        ]
    return ops


def apply_kraus_to_qubit(matrix: np.ndarray, n: int, qubit: int, ops: Iterable[np.ndarray]) -> np.ndarray:
    left = 2**qubit
    right = 2 ** (n - qubit - 1)
    t = matrix.reshape(left, 2, right, left, 2, right)
    out = np.zeros_like(t)
    for k in ops:
        out += np.einsum("ab,xbyuvw,cv->xayucw", k, t, k.conj(), optimize=True)
    return out.reshape(matrix.shape)


def apply_channel_dense(state: DenseState, kind: NoiseKind, p: float, cap: int | None = None) -> DenseState:
    """Apply the same single-qubit channel independently to every qubit."""
    _check_cap(state.n, cap)
    ops = kraus_for(kind, p)
    m = state.matrix
    for q in range(state.n):
        m = apply_kraus_to_qubit(m, state.n, q, ops)
    return DenseState(state.n, m)


def partial_transpose(state: DenseState, cut: Iterable[int]) -> np.ndarray:
    n = state.n
    cut = sorted(set(cut))
    if not cut or len(cut) >= n or cut[0] < 0 or cut[-1] >= n:
        raise ValueError(f"cut must be a nonempty proper subset of range({n}), got {cut}")
    t = state.matrix.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for q in cut:
        axes[q], axes[n + q] = axes[n + q], axes[q]
    return t.transpose(axes).reshape(state.matrix.shape)


def pt_spectrum(state: DenseState, cut: Iterable[int], cap: int | None = None) -> np.ndarray:
    """Ascending eigenvalues of the partial transpose over the qubits in ``cut``."""
    _check_cap(state.n, cap)
    return jacobi_eigvalsh(partial_transpose(state, cut))


def negativity_dense(state: DenseState, cut: Iterable[int]) -> float:
    w = pt_spectrum(state, cut)
    return float(-np.sum(w[w < 0]))


def wootters_concurrence(state: DenseState) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    With ``rho = W W^dagger`` (``W`` holds the eigenvectors scaled by the
    square roots of the eigenvalues), the ``l_i`` are the singular values of
    the complex-symmetric matrix ``W^T (Y x Y) W``. They are read off as the
    positive eigenvalues of its Hermitian dilation, which avoids taking the
    square root of near-zero eigenvalues of ``rho rho~``.
    """
    if state.n != 2:
        raise ValueError(f"concurrence is defined for two qubits, got n={state.n}")
    w, v = jacobi_eigh(state.matrix)
    wmat = v * np.sqrt(np.clip(w, 0.0, None))
    tau = wmat.T @ np.kron(Y, Y) @ wmat
    dilation = np.block([[np.zeros((4, 4)), tau], [tau.conj().T, np.zeros((4, 4))]])
    lam = jacobi_eigvalsh(dilation)[::-1][:4]
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def horodecki_tmatrix(state: DenseState) -> np.ndarray:
    """Correlation matrix ``T[i, j] = Tr[rho sigma_i x sigma_j]`` over x, y, z."""
    if state.n != 2:
        raise ValueError(f"T matrix is defined for two qubits, got n={state.n}")
    t = np.empty((3, 3))
    for i, a in enumerate(PAULIS):
        for j, b in enumerate(PAULIS):
            t[i, j] = state.expectation(np.kron(a, b)).real
    return t


def observable_matrix(bloch: Sequence[float]) -> np.ndarray:
    return bloch[0] * X + bloch[1] * Y + bloch[2] * Z


def correlation_dense(state: DenseState, blochs: Sequence[Sequence[float]]) -> float:
    if len(blochs) != state.n:
        raise ValueError(f"need {state.n} observables, got {len(blochs)}")
    op = np.array([[1.0 + 0j]])
    for b in blochs:
        op = np.kron(op, observable_matrix(b))
    return state.expectation(op).real


def outcome_probabilities_dense(state: DenseState, blochs: Sequence[Sequence[float]]) -> np.ndarray:
    """Joint probabilities of all ``2**n`` outcome strings via projector expectations.

    Index bit ``0`` of party ``i`` means outcome ``+1``, bit ``1`` means ``-1``.
    """
    n = state.n
    projectors = []
    for b in blochs:
        o = observable_matrix(b)
        projectors.append(((I2 + o) / 2, (I2 - o) / 2))
    probs = np.empty(2**n)
    for idx in range(2**n):
        op = np.array([[1.0 + 0j]])
        for i in range(n):
            op = np.kron(op, projectors[i][(idx >> (n - 1 - i)) & 1])
        probs[idx] = state.expectation(op).real
    return probs
