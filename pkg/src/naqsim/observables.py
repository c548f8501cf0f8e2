"""Scalar diagnostics of two-qubit states: Bloch components, purity, entropy, concurrence.

Single-state functions use the Jacobi eigensolver from :mod:`naqsim.qlinalg`;
the ``batch_*`` variants evaluate stacks of states with LAPACK and are what
trajectory recording uses.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .operators import embed, pauli
from .qlinalg import as_matrix, expectation, hermitian_eig, kron

ENTROPY_CLIP_WARN = 1e-10

_SYSY = kron(pauli("y"), pauli("y"))
_ZZ = kron(pauli("z"), pauli("z"))


class EntropyClipWarning(RuntimeWarning):
    """Negative eigenvalues larger than the clip tolerance were discarded."""


def purity(rho) -> float:
    rho = as_matrix(rho)
    return float(np.real(np.einsum("ij,ji->", rho, rho)))


def _entropy_from_eigs(w, base: float):
    neg = -np.min(w, axis=-1)
    if np.any(neg > ENTROPY_CLIP_WARN):
        warnings.warn(
            f"clipping negative eigenvalue of magnitude {float(np.max(neg)):.3e}",
            EntropyClipWarning,
            stacklevel=3,
        )
    p = np.clip(w, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    s = np.sum(terms, axis=-1)
    if base != math.e:
        s = s / math.log(base)
    return s


def von_neumann_entropy(rho, base: float = math.e) -> float:
    """-sum p ln p (natural log unless ``base`` is given); 0 ln 0 = 0."""
    return float(_entropy_from_eigs(hermitian_eig(rho), base))


def _spin_flip(rho):
    return _SYSY @ np.conj(rho) @ _SYSY


def _concurrence_from_sqrt_eigs(lams) -> np.ndarray:
    roots = np.sqrt(np.clip(lams, 0.0, None))[..., ::-1]
    return np.maximum(0.0, roots[..., 0] - roots[..., 1] - roots[..., 2] - roots[..., 3])


def concurrence(rho) -> float:
    """Wootters concurrence from the spectrum of sqrt(rho) rho~ sqrt(rho)."""
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise ValueError("concurrence is defined for two-qubit (4x4) states")
    w, v = hermitian_eig(rho, vectors=True)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ np.conj(v).T
    r = root @ _spin_flip(rho) @ root
    return float(_concurrence_from_sqrt_eigs(hermitian_eig(0.5 * (r + np.conj(r).T))))


def site_bloch(rho, site: int, axis: str) -> float:
    return float(np.real(expectation(rho, embed(pauli(axis), site))))


def zz_correlation(rho) -> float:
    return float(np.real(expectation(rho, _ZZ)))


# --- batched evaluation over stacks of shape (n, 4, 4) --------------------------

def batch_eigvalsh(rhos) -> np.ndarray:
    rhos = np.asarray(rhos)
    return np.linalg.eigvalsh(0.5 * (rhos + np.conj(np.swapaxes(rhos, -1, -2))))


def batch_purity(rhos) -> np.ndarray:
    return np.real(np.einsum("nij,nji->n", rhos, rhos))


def batch_entropy(eigs, base: float = math.e) -> np.ndarray:
    return _entropy_from_eigs(np.asarray(eigs), base)


def batch_concurrence(rhos) -> np.ndarray:
    rhos = np.asarray(rhos)
    w, v = np.linalg.eigh(rhos)
    root = (v * np.sqrt(np.clip(w, 0.0, None))[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))
    flipped = _SYSY @ np.conj(rhos) @ _SYSY
    r = root @ flipped @ root
    return _concurrence_from_sqrt_eigs(batch_eigvalsh(r))


def batch_expectation(rhos, obs) -> np.ndarray:
    return np.real(np.einsum("nij,ji->n", rhos, obs))


@dataclass(frozen=True)
class SteadyStateSummary:
    c_ss: float
    c_max: float
    purity_ss: float
    entropy_ss: float
    t_evaluated: float


def steady_state_summary(traj, t_eval: float) -> SteadyStateSummary:
    """Read the state at the last record with t <= t_eval; C_max over the whole run."""
    if not traj:
        raise ValueError("empty trajectory")
    slack = 1e-9 * max(1.0, abs(t_eval))
    if traj[-1].t < t_eval - slack:
        raise ValueError(f"trajectory ends at t={traj[-1].t} before t_eval={t_eval}")
    chosen = None
    for rec in traj:
        if rec.t <= t_eval + slack:
            chosen = rec
        else:
            break
    if chosen is None:
        raise ValueError(f"no record at or before t_eval={t_eval}")
    c_max = max(rec.concurrence for rec in traj)
    return SteadyStateSummary(
        c_ss=chosen.concurrence,
        c_max=c_max,
        purity_ss=chosen.purity,
        entropy_ss=chosen.entropy,
        t_evaluated=chosen.t,
    )
