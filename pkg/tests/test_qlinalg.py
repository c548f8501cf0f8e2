import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from naqsim.operators import pauli
from naqsim.qlinalg import (
    NumericalError,
    expectation,
    hermitian_eig,
    hermiticity_residual,
    jacobi_eigh,
    kron,
    partial_trace,
)

SZ, SX = pauli("z"), pauli("x")
I2, I4 = np.eye(2), np.eye(4)


def test_kron_examples():
    assert np.allclose(kron(I2, I2), I4)
    assert np.allclose(kron(SZ, I2), np.diag([1, 1, -1, -1]))
    e00 = np.array([1, 0, 0, 0])
    assert np.allclose(kron(SX, SX) @ e00, [0, 0, 0, 1])


def test_kron_matches_numpy(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.array_equal(kron(a, b), np.kron(a, b))


def test_partial_trace_examples():
    ra = np.array([[0.7, 0.2j], [-0.2j, 0.3]])
    rb = np.array([[0.4, 0.1], [0.1, 0.6]])
    assert np.allclose(partial_trace(kron(ra, rb), 1), ra)
    assert np.allclose(partial_trace(kron(ra, rb), 2), rb)
    assert np.allclose(partial_trace(I4 / 4, 2), I2 / 2)
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(partial_trace(np.outer(phi, phi), 1), I2 / 2)


def test_partial_trace_rejects_bad_input():
    with pytest.raises(ValueError):
        partial_trace(np.eye(3), 1)
    with pytest.raises(ValueError):
        partial_trace(I4, 3)


def test_eig_examples():
    assert np.allclose(hermitian_eig(SZ), [-1, 1])
    assert np.allclose(hermitian_eig(SX), [-1, 1])
    assert np.allclose(hermitian_eig(I4 / 4), [0.25] * 4)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_jacobi_reports_non_convergence():
    m = np.array([[1, 1j, 0.5], [-1j, 2, 0.3], [0.5, 0.3, 0]], dtype=complex)
    with pytest.raises(NumericalError):
        jacobi_eigh(m, max_sweeps=0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_eig_reconstructs_against_lapack(n, seed):
    r = np.random.default_rng(seed)
    a = r.normal(size=(n, n)) + 1j * r.normal(size=(n, n))
    m = a + a.conj().T
    w, v = hermitian_eig(m, vectors=True)
    assert np.all(np.diff(w) >= 0)
    assert np.allclose(w, np.linalg.eigvalsh(m), atol=1e-10)
    assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - m)) < 1e-10
    assert np.max(np.abs(v.conj().T @ v - np.eye(n))) < 1e-12


def test_degenerate_spectrum():
    u = np.linalg.qr(np.random.default_rng(5).normal(size=(4, 4)))[0]
    m = u @ np.diag([1.0, 1.0, 1.0, -2.0]) @ u.T
    assert np.allclose(hermitian_eig(m), [-2, 1, 1, 1], atol=1e-12)


def test_expectation_examples():
    assert expectation(I2 / 2, SZ) == pytest.approx(0)
    assert expectation(np.diag([1, 0]), SZ) == pytest.approx(1)
    assert expectation(np.full((2, 2), 0.5), SX) == pytest.approx(1)
    with pytest.raises(ValueError):
        expectation(I4, SZ)


def test_hermiticity_residual():
    assert hermiticity_residual(SX) == 0
    assert hermiticity_residual(np.array([[0, 1], [0, 0]])) == pytest.approx(1)
