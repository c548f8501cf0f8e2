"""Small dense complex linear algebra for one- and two-qubit operators.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Two-qubit
operators use the basis ordering |00>, |01>, |10>, |11> with site 1 as the
left tensor factor, which is the block layout produced by :func:`kron`.
"""
from __future__ import annotations

import numpy as np

HERM_TOL = 1e-12
EIG_TOL = 1e-10

_JACOBI_MAX_SWEEPS = 50


class NumericalError(RuntimeError):
    """Raised when an iterative numerical routine fails to converge or blows up."""


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def dagger(m) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def kron(a, b) -> np.ndarray:
    """Tensor product with ``result[i*db + k, j*db + l] = a[i, j] * b[k, l]``."""
    a = as_matrix(a)
    b = as_matrix(b)
    da, db = a.shape[0], b.shape[0]
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(da * db, da * db)


def partial_trace(m, keep: int) -> np.ndarray:
    """Reduce a 4x4 two-qubit operator to the 2x2 operator on site ``keep``."""
    m = as_matrix(m)
    if m.shape != (4, 4):
        raise ValueError(f"partial_trace expects a 4x4 operator, got {m.shape}")
    if keep not in (1, 2):
        raise ValueError(f"site index must be 1 or 2, got {keep!r}")
    t = m.reshape(2, 2, 2, 2)  # (i, k, j, l) for row (i k), column (j l)
    if keep == 1:
        return np.einsum("ikjk->ij", t)
    return np.einsum("ikil->kl", t)


def hermiticity_residual(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - dagger(m))))


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def jacobi_eigh(m, tol: float = 1e-15, max_sweeps: int = _JACOBI_MAX_SWEEPS):
    """Cyclic complex Jacobi diagonalisation of a Hermitian matrix.

    Each 2x2 pivot block is diagonalised by a unitary plane rotation that
    first removes the phase of the off-diagonal entry. Sweeps continue until
    the off-diagonal Frobenius norm drops below ``tol`` times the matrix
    norm.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    v : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = as_matrix(m).copy()
    a = 0.5 * (a + dagger(a))
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(float(np.linalg.norm(a)), np.finfo(float).tiny)

    for _ in range(max_sweeps):
        if _off_norm(a) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(1.0, theta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # columns p, q transform by G = [[c, s*phase], [-s*conj(phase), c]]
                g = np.array([[c, s * phase], [-s * np.conj(phase), c]])
                cols = a[:, [p, q]] @ g
                a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
                rows = dagger(g) @ a[[p, q], :]
                a[p, :], a[q, :] = rows[0], rows[1]
                a[p, q] = a[q, p] = 0.0
                vc = v[:, [p, q]] @ g
                v[:, p], v[:, q] = vc[:, 0], vc[:, 1]
    else:
        raise NumericalError(
            f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
            f"(off-diagonal norm {_off_norm(a):.3e}, scale {scale:.3e})"
        )

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eig(m, vectors: bool = False):
    """Eigenvalues (ascending) of a Hermitian matrix, optionally with eigenvectors.

    Inputs that are Hermitian only to within ``EIG_TOL`` are symmetrised
    first; anything further from Hermitian is rejected.
    """
    a = as_matrix(m)
    res = hermiticity_residual(a)
    if res > EIG_TOL * max(1.0, float(np.max(np.abs(a)))):
        raise ValueError(f"matrix is not Hermitian (residual {res:.3e})")
    w, v = jacobi_eigh(a)
    if vectors:
        return w, v
    return w


def expectation(rho, obs) -> complex:
    """Return ``Tr(rho @ obs)``."""
    rho = as_matrix(rho)
    obs = as_matrix(obs)
    if rho.shape != obs.shape:
        raise ValueError(f"dimension mismatch: state {rho.shape} vs observable {obs.shape}")
    return complex(np.einsum("ij,ji->", rho, obs))
