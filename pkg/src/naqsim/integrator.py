"""Fixed-step RK4 evolution with post-step Hermitisation and positivity monitoring."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np

from .generator import GeneratorContext, rhs
from .observables import (
    batch_concurrence,
    batch_eigvalsh,
    batch_entropy,
    batch_expectation,
    batch_purity,
)
from .operators import embed, pauli
from .qlinalg import NumericalError, dagger, kron

MIN_TRACE = 1e-6


class InvalidStateError(ValueError):
    pass


class CPViolationWarning(RuntimeWarning):
    """The smallest eigenvalue of rho dropped below -cp_tol during a run."""


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 0.05
    t_max: float = 4000.0
    record_stride: int = 20
    cp_tol: float = 1e-12

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_max >= self.dt:
            raise ValueError("t_max must be at least dt")
        if int(self.record_stride) < 1:
            raise ValueError("record_stride must be a positive integer")
        object.__setattr__(self, "record_stride", int(self.record_stride))

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))


class TrajectoryRecord(NamedTuple):
    t: float
    sz1: float
    sx1: float
    zz: float
    purity: float
    entropy: float
    concurrence: float
    min_eig: float


RECORD_FIELDS = TrajectoryRecord._fields


def enforce_valid(rho) -> np.ndarray:
    """Hermitian part of rho divided by its trace. Positivity is left alone."""
    rho = np.asarray(rho, dtype=np.complex128)
    herm = 0.5 * (rho + dagger(rho))
    tr = float(np.real(np.trace(herm)))
    if abs(tr) < MIN_TRACE:
        raise InvalidStateError(f"trace {tr:.3e} too small to renormalise")
    return herm / tr


def rk4_step(rho, ctx: GeneratorContext, dt: float) -> np.ndarray:
    """One classical RK4 step; each stage re-reads <sigma_z> from its own state."""
    rho = np.asarray(rho, dtype=np.complex128)
    k1 = rhs(rho, ctx)
    k2 = rhs(rho + 0.5 * dt * k1, ctx)
    k3 = rhs(rho + 0.5 * dt * k2, ctx)
    k4 = rhs(rho + dt * k3, ctx)
    out = rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NumericalError("non-finite density matrix after RK4 step")
    return out


# --- compiled kernel on row-major vec(rho) ---------------------------------------

@numba.njit(cache=True)
def _vec_rhs(v, sup, z_read, z_add, lam):
    out = sup @ v
    for a in range(lam.shape[0]):
        if lam[a] != 0.0:
            rz = 0.0
            for i in range(v.shape[0]):
                rz += (v[i] * z_read[a, i]).real
            for i in range(v.shape[0]):
                out[i] -= lam[a] * rz * z_add[a, i]
    return out


@numba.njit(cache=True)
def _advance(v, sup, z_read, z_add, lam, dt, nsteps):
    """Run ``nsteps`` RK4 steps plus enforcement; returns (v, status, steps_done).

    status: 0 ok, 1 non-finite state, 2 trace below MIN_TRACE.
    """
    dim = 4
    for step in range(nsteps):
        k1 = _vec_rhs(v, sup, z_read, z_add, lam)
        k2 = _vec_rhs(v + 0.5 * dt * k1, sup, z_read, z_add, lam)
        k3 = _vec_rhs(v + 0.5 * dt * k2, sup, z_read, z_add, lam)
        k4 = _vec_rhs(v + dt * k3, sup, z_read, z_add, lam)
        w = v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        for i in range(w.shape[0]):
            if not (np.isfinite(w[i].real) and np.isfinite(w[i].imag)):
                return w, 1, step
        r = w.reshape((dim, dim))
        h = 0.5 * (r + r.conj().T)
        tr = 0.0
        for i in range(dim):
            tr += h[i, i].real
        if abs(tr) < 1e-6:
            return w, 2, step
        v = (h / tr).ravel()
    return v, 0, nsteps


class _Kernel:
    def __init__(self, ctx: GeneratorContext):
        self.sup = np.ascontiguousarray(ctx.linear_superoperator())
        # r_z = Tr(rho Z) = vec(rho) . vec(Z^T)
        self.z_read = np.ascontiguousarray([z.T.ravel() for z in ctx.sigma_z])
        self.z_add = np.ascontiguousarray([z.ravel() for z in ctx.sigma_z])
        self.lam = np.asarray(ctx.lambdas, dtype=np.float64)

    def advance(self, v, dt, nsteps, offset):
        v, status, done = _advance(v, self.sup, self.z_read, self.z_add, self.lam, dt, nsteps)
        if status == 1:
            raise NumericalError(f"numerical blow-up at step {offset + done + 1}")
        if status == 2:
            raise InvalidStateError(f"trace collapsed at step {offset + done + 1}")
        return v


def integrate(rho0, ctx: GeneratorContext, cfg: IntegratorConfig):
    """Propagate and return (times, states) at the record points.

    Records sit at step 0, every ``record_stride`` steps, and the final step.
    """
    rho = enforce_valid(rho0)
    kernel = _Kernel(ctx)
    n = cfg.n_steps
    marks = list(range(0, n + 1, cfg.record_stride))
    if marks[-1] != n:
        marks.append(n)
    states = np.empty((len(marks), 4, 4), dtype=np.complex128)
    states[0] = rho
    v = np.ascontiguousarray(rho.ravel())
    for idx in range(1, len(marks)):
        v = kernel.advance(v, cfg.dt, marks[idx] - marks[idx - 1], marks[idx - 1])
        states[idx] = v.reshape(4, 4)
    times = np.asarray(marks, dtype=float) * cfg.dt
    return times, states


def records_from_states(times, states) -> list[TrajectoryRecord]:
    eigs = batch_eigvalsh(states)
    sz1 = batch_expectation(states, embed(pauli("z"), 1))
    sx1 = batch_expectation(states, embed(pauli("x"), 1))
    zz = batch_expectation(states, kron(pauli("z"), pauli("z")))
    pur = batch_purity(states)
    with warnings.catch_warnings():
        # positivity is reported through min_eig and the CP monitor instead
        warnings.simplefilter("ignore")
        ent = batch_entropy(eigs)
    conc = batch_concurrence(states)
    return [
        TrajectoryRecord(float(t), float(a), float(b), float(c), float(d), float(e), float(f), float(g))
        for t, a, b, c, d, e, f, g in zip(times, sz1, sx1, zz, pur, ent, conc, eigs[:, 0])
    ]


def evolve(rho0, ctx: GeneratorContext, cfg: IntegratorConfig) -> list[TrajectoryRecord]:
    times, states = integrate(rho0, ctx, cfg)
    records = records_from_states(times, states)
    worst = min(r.min_eig for r in records)
    if worst < -cfg.cp_tol:
        warnings.warn(
            f"minimum eigenvalue {worst:.3e} below -{cfg.cp_tol:g}",
            CPViolationWarning,
            stacklevel=2,
        )
    return records


def min_eigenvalue(records) -> float:
    return min(r.min_eig for r in records) if records else math.nan
