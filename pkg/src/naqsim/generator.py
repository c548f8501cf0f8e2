"""Right-hand side of the nonassociative two-qubit master equation.

The zero-temperature equation integrated by :mod:`naqsim.integrator` is

    drho/dt = -i[H, rho] + sum_a Gamma_a D[sigma_-^(a)] rho + N[rho],
    N[rho]  = -sum_a lambda_a <sigma_z^(a)> sigma_z^(a),

with lambda_a = g_a^2 eps_a kappa_a / 16. The six-associator form with
general bath kernels is available as :func:`general_linear_generator`; it
coincides with :func:`rhs` when the absorption kernel K_- vanishes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import BathKernels, lambda_coefficients
from .operators import SystemParams, build_tfim, embed, pauli, sigma_minus, sigma_plus
from .qlinalg import dagger, hermitian_eig


@dataclass(frozen=True, eq=False)
class GeneratorContext:
    """Immutable operator cache shared by every evaluation of the generator."""

    params: SystemParams
    hamiltonian: np.ndarray
    lowering: tuple[np.ndarray, np.ndarray]
    raising: tuple[np.ndarray, np.ndarray]
    sigma_z: tuple[np.ndarray, np.ndarray]
    gamma_plus: tuple[float, float]
    gamma_minus: tuple[float, float]
    lambdas: tuple[float, float]
    bath: tuple[BathKernels, BathKernels]

    @property
    def jump_ops(self):
        return list(zip(self.lowering, self.gamma_plus))

    def with_feedback(self, lambdas) -> "GeneratorContext":
        """Copy with the feedback strengths replaced (used for harness mutations)."""
        return GeneratorContext(**{**self.__dict__, "lambdas": tuple(float(x) for x in lambdas)})

    def linear_superoperator(self) -> np.ndarray:
        """16x16 matrix of the commutator plus damping part on row-major vec(rho).

        Uses vec(A rho B) = (A kron B^T) vec(rho).
        """
        eye = np.eye(4, dtype=np.complex128)
        h = self.hamiltonian
        sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
        for op, rate in zip(self.lowering, self.gamma_plus):
            if rate == 0:
                continue
            ldl = dagger(op) @ op
            sup += rate * (np.kron(op, op.conj()) - 0.5 * np.kron(ldl, eye) - 0.5 * np.kron(eye, ldl.T))
        return sup


def build_context(p: SystemParams) -> GeneratorContext:
    lowering = tuple(embed(sigma_minus(), a) for a in (1, 2))
    raising = tuple(embed(sigma_plus(), a) for a in (1, 2))
    sz = tuple(embed(pauli("z"), a) for a in (1, 2))
    bath = tuple(
        BathKernels(p.gamma_plus[i], p.eps_plus[i], p.gamma_minus[i], p.eps_minus[i])
        for i in range(2)
    )
    return GeneratorContext(
        params=p,
        hamiltonian=build_tfim(p),
        lowering=lowering,
        raising=raising,
        sigma_z=sz,
        gamma_plus=p.gamma_plus,
        gamma_minus=p.gamma_minus,
        lambdas=p.feedback_strengths(),
        bath=bath,
    )


def dissipator(op, rho) -> np.ndarray:
    """L rho L^dagger - (L^dagger L rho + rho L^dagger L)/2."""
    op = np.asarray(op)
    rho = np.asarray(rho)
    ld = dagger(op)
    ldl = ld @ op
    return op @ rho @ ld - 0.5 * (ldl @ rho + rho @ ldl)


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def _rz(rho, sz) -> float:
    return float(np.real(np.einsum("ij,ji->", rho, sz)))


def closed_form_associators(rho, p: SystemParams) -> list[tuple[np.ndarray, ...]]:
    """Per-site associators (A_1, ..., A_6) of the Ising-aligned twist.

    A_{1,3,6} = -X_a and A_{2,4,5} = +X_a with
    X_a = C0_a <sigma_z^(a)> kappa_a sigma_z^(a) and C0_a = -i g_a^2 / 48.
    """
    rho = np.asarray(rho)
    out = []
    for site, g, kappa in zip((1, 2), p.couplings, p.kappa):
        sz = embed(pauli("z"), site)
        c0 = -1j * g * g / 48.0
        x = c0 * _rz(rho, sz) * kappa * sz
        out.append((-x, x, -x, x, x, -x))
    return out


def feedback(rho, ctx: GeneratorContext) -> np.ndarray:
    rho = np.asarray(rho)
    out = np.zeros((4, 4), dtype=np.complex128)
    for lam, sz in zip(ctx.lambdas, ctx.sigma_z):
        if lam:
            out -= lam * _rz(rho, sz) * sz
    return out


def rhs(rho, ctx: GeneratorContext) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    out = -1j * commutator(ctx.hamiltonian, rho)
    for op, rate in zip(ctx.lowering, ctx.gamma_plus):
        if rate:
            out += rate * dissipator(op, rho)
    return out + feedback(rho, ctx)


def general_linear_generator(rho, ctx: GeneratorContext) -> np.ndarray:
    """Commutator, emission and absorption dissipators plus the six-associator sum.

    Experimental: only the zero-temperature limit (K_- = 0) has reference
    values to compare against.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    out = -1j * commutator(ctx.hamiltonian, rho)
    for site in range(2):
        if ctx.gamma_plus[site]:
            out += ctx.gamma_plus[site] * dissipator(ctx.lowering[site], rho)
        if ctx.gamma_minus[site]:
            out += ctx.gamma_minus[site] * dissipator(ctx.raising[site], rho)
    for site, assoc in enumerate(closed_form_associators(rho, ctx.params)):
        lam = lambda_coefficients(ctx.bath[site])
        for coeff, a in zip(lam, assoc):
            if coeff:
                out += coeff * a
    return out


def bohr_decompose(h, s, merge_tol: float = 1e-9, drop_tol: float = 1e-12):
    """Split ``s`` into components S(w) with [h, S(w)] = -w S(w).

    With S(t) = exp(iht) S exp(-iht) = sum_w exp(-iwt) S(w), the component
    P_a S P_b connecting eigenspaces a -> b carries w = E_b - E_a. Degenerate
    eigenvalues and Bohr gaps closer than ``merge_tol * max|E|`` are merged;
    vanishing components are dropped.
    """
    w, v = hermitian_eig(h, vectors=True)
    scale = max(float(np.max(np.abs(w))), 1.0)
    tol = merge_tol * scale

    levels: list[tuple[float, np.ndarray]] = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[start] > tol:
            vecs = v[:, start:i]
            levels.append((float(np.mean(w[start:i])), vecs @ dagger(vecs)))
            start = i

    s = np.asarray(s, dtype=np.complex128)
    s_scale = max(float(np.max(np.abs(s))), 1.0)
    comps: list[list] = []
    for ea, pa in levels:
        for eb, pb in levels:
            block = pa @ s @ pb
            if np.max(np.abs(block)) <= drop_tol * s_scale:
                continue
            omega = eb - ea
            for entry in comps:
                if abs(entry[0] - omega) <= tol:
                    entry[1] = entry[1] + block
                    break
            else:
                comps.append([omega, block])
    comps.sort(key=lambda e: e[0])
    return [(float(om), m) for om, m in comps]
