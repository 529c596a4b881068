import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghz_nonlocality.linalg import jacobi_eigh, jacobi_eigvalsh


def random_hermitian(rng, m):
    a = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return a + a.conj().T


@pytest.mark.parametrize("m", [1, 2, 3, 4, 8, 17, 32])
def test_matches_lapack(m):
    rng = np.random.default_rng(m)
    a = random_hermitian(rng, m)
    w, v = jacobi_eigh(a)
    assert np.allclose(w, np.linalg.eigvalsh(a), atol=1e-12)
    assert np.allclose(a @ v, v * w, atol=1e-11)
    assert np.allclose(v.conj().T @ v, np.eye(m), atol=1e-12)


def test_real_symmetric_and_diagonal():
    a = np.diag([3.0, -1.0, 2.0])
    assert np.array_equal(jacobi_eigvalsh(a), [-1.0, 2.0, 3.0])
    b = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(jacobi_eigvalsh(b), [1.0, 3.0], atol=1e-15)


def test_degenerate_spectrum():
    # Bell-state partial transpose: eigenvalues -1/2 and 1/2 (x3)
    a = 0.5 * np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    assert np.allclose(jacobi_eigvalsh(a), [-0.5, 0.5, 0.5, 0.5], atol=1e-15)


def test_deterministic():
    a = random_hermitian(np.random.default_rng(7), 12)
    w1, v1 = jacobi_eigh(a)
    w2, v2 = jacobi_eigh(a)
    assert np.array_equal(w1, w2) and np.array_equal(v1, v2)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        jacobi_eigh(np.zeros((2, 3)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_trace_and_frobenius_preserved(m, seed):
    a = random_hermitian(np.random.default_rng(seed), m)
    w = jacobi_eigvalsh(a)
    assert np.isclose(w.sum(), np.trace(a).real, atol=1e-11)
    assert np.isclose(np.sum(w**2), np.linalg.norm(a) ** 2, rtol=1e-12)
