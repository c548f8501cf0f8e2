import itertools

import numpy as np
import pytest

from naqsim.bath import BathKernels, lambda_coefficients
from naqsim.generator import (
    bohr_decompose,
    build_context,
    closed_form_associators,
    commutator,
    dissipator,
    feedback,
    general_linear_generator,
    rhs,
)
from naqsim.operators import SystemParams, build_tfim, embed, initial_plus_product, pauli, product_state, sigma_minus
from naqsim.verify import liouvillian_by_columns, random_density

SM1 = embed(sigma_minus(), 1)
SZ1 = embed(pauli("z"), 1)


def test_dark_state_of_damping():
    rho = np.kron(np.diag([0, 1]), np.eye(2) / 2)
    assert np.allclose(dissipator(SM1, rho), 0)


def test_dissipator_on_maximally_mixed():
    d = dissipator(SM1, np.eye(4) / 4)
    # L L^dag / 4 - L^dag L / 4 moves weight from |0> to |1> on site 1
    assert np.allclose(d, np.diag([-0.25, -0.25, 0.25, 0.25]))
    assert np.real(np.trace(d @ SZ1)) == pytest.approx(-1.0)


def test_dissipator_is_traceless(rng):
    for _ in range(20):
        op = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert abs(np.trace(dissipator(op, random_density(rng)))) < 1e-13


def test_associators_vanish_without_twist_or_imbalance(rng):
    rho = random_density(rng)
    for a in closed_form_associators(rho, SystemParams(kappa=0.0)):
        assert all(np.all(x == 0) for x in a)
    for a in closed_form_associators(initial_plus_product(), SystemParams(kappa=100.0)):
        assert all(np.allclose(x, 0) for x in a)
    for a in closed_form_associators(np.eye(4) / 4, SystemParams(kappa=100.0)):
        assert all(np.allclose(x, 0) for x in a)


def test_associator_reference_value():
    rho = product_state((0, 0, 1), (0, 0, 0))
    a = closed_form_associators(rho, SystemParams(g1=0.2, kappa=100.0))[0]
    x = (-1j * 0.04 / 48) * 100 * SZ1
    assert np.allclose(a, [-x, x, -x, x, x, -x], atol=1e-15)


def test_feedback_reference_value():
    ctx = build_context(SystemParams(kappa=100.0))
    rho = product_state((0, 0, 1), (0, 0, 0))
    assert np.allclose(feedback(rho, ctx), -0.0025 * SZ1, atol=1e-15)
    assert all(isinstance(lam, float) for lam in ctx.lambdas)


def test_closed_system_and_pure_damping_limits(rng):
    rho = random_density(rng)
    closed = build_context(SystemParams(gamma_plus=0.0))
    assert np.allclose(rhs(rho, closed), -1j * commutator(closed.hamiltonian, rho))
    damped = build_context(SystemParams(J=0, h1=0, h2=0))
    expect = sum(0.05 * dissipator(embed(sigma_minus(), a), rho) for a in (1, 2))
    assert np.allclose(rhs(rho, damped), expect)


def naive_rhs(rho, p: SystemParams):
    """Entry-by-entry evaluation of the master equation with explicit index loops."""
    h = build_tfim(p)
    ls = [embed(sigma_minus(), a) for a in (1, 2)]
    zs = [embed(pauli("z"), a) for a in (1, 2)]
    out = np.zeros((4, 4), dtype=complex)
    for i, j in itertools.product(range(4), repeat=2):
        v = 0j
        for k in range(4):
            v += -1j * (h[i, k] * rho[k, j] - rho[i, k] * h[k, j])
        for a in range(2):
            l = ls[a]
            for k, m in itertools.product(range(4), repeat=2):
                v += p.gamma_plus[a] * l[i, k] * rho[k, m] * np.conj(l[j, m])
                ldl_ik = sum(np.conj(l[n, i]) * l[n, k] for n in range(4))
                ldl_mj = sum(np.conj(l[n, m]) * l[n, j] for n in range(4))
                v -= 0.5 * p.gamma_plus[a] * (ldl_ik * rho[k, j] * (m == j) + rho[i, m] * ldl_mj * (k == i))
            lam = p.couplings[a] ** 2 * p.eps_plus[a] * p.kappa[a] / 16
            rz = sum(rho[k, m] * zs[a][m, k] for k, m in itertools.product(range(4), repeat=2)).real
            v -= lam * rz * zs[a][i, j]
        out[i, j] = v
    return out


@pytest.mark.parametrize("kappa", [0.0, 200.0])
def test_rhs_matches_naive_loops(rng, kappa):
    p = SystemParams(kappa=kappa)
    ctx = build_context(p)
    for rho in (initial_plus_product(), random_density(rng)):
        assert np.allclose(rhs(rho, ctx), naive_rhs(rho, p), atol=1e-15)


def test_general_generator_zero_temperature(rng):
    ctx = build_context(SystemParams(kappa=(80.0, 150.0)))
    for _ in range(50):
        rho = random_density(rng)
        assert np.max(np.abs(general_linear_generator(rho, ctx) - rhs(rho, ctx))) <= 1e-14


def test_general_generator_finite_temperature_assembly(rng):
    p = SystemParams(kappa=(120.0, -40.0), gamma_minus=0.02, eps_minus=(0.004, -0.003))
    ctx = build_context(p)
    rho = random_density(rng)
    expect = -1j * commutator(ctx.hamiltonian, rho)
    for a in range(2):
        expect = expect + p.gamma_plus[a] * dissipator(ctx.lowering[a], rho)
        expect = expect + p.gamma_minus[a] * dissipator(ctx.raising[a], rho)
        lam = lambda_coefficients(BathKernels(p.gamma_plus[a], p.eps_plus[a], p.gamma_minus[a], p.eps_minus[a]))
        for c, x in zip(lam, closed_form_associators(rho, p)[a]):
            expect = expect + c * x
    assert np.allclose(general_linear_generator(rho, ctx), expect, atol=1e-15)


def test_equal_kernels_cancel_associator_chain(rng):
    p = SystemParams(kappa=150.0, gamma_minus=0.05, eps_minus=0.01)
    ctx = build_context(p)
    rho = random_density(rng)
    linear = -1j * commutator(ctx.hamiltonian, rho)
    for a in range(2):
        linear = linear + 0.05 * dissipator(ctx.lowering[a], rho) + 0.05 * dissipator(ctx.raising[a], rho)
    assert np.allclose(general_linear_generator(rho, ctx), linear, atol=1e-15)


def test_superoperator_matches_column_construction():
    ctx = build_context(SystemParams(kappa=0.0, h1=0.3, h2=0.1))
    assert np.allclose(ctx.linear_superoperator(), liouvillian_by_columns(ctx), atol=1e-15)


def test_with_feedback_mutation_only_touches_lambdas(rng):
    ctx = build_context(SystemParams(kappa=200.0))
    flipped = ctx.with_feedback([-x for x in ctx.lambdas])
    rho = random_density(rng)
    assert np.allclose(feedback(rho, flipped), -feedback(rho, ctx))
    assert flipped.hamiltonian is ctx.hamiltonian


def test_bohr_single_qubit():
    comps = bohr_decompose(pauli("z"), sigma_minus())
    assert len(comps) == 1
    omega, s = comps[0]
    assert omega == pytest.approx(2.0)
    assert np.allclose(s, sigma_minus())


def test_bohr_commuting_operator():
    comps = bohr_decompose(pauli("z"), np.diag([2.0, 3.0]))
    assert [om for om, _ in comps] == [0.0]


@pytest.mark.parametrize("site", [1, 2])
def test_bohr_tfim(site):
    h = build_tfim(SystemParams())
    s = embed(sigma_minus(), site)
    comps = bohr_decompose(h, s)
    assert np.max(np.abs(sum(c for _, c in comps) - s)) < 1e-10
    for omega, c in comps:
        assert np.max(np.abs(h @ c - c @ h + omega * c)) < 1e-10
