"""Release acceptance suite at the reference parameters.

g = 0.2, Gamma_+ = 0.05, eps_+ = 0.01, J = 1, h = 0.25, T = 0, rho(0) = |++><++|,
dt = 0.05, steady state read at t = 200 / Gamma_+. Each test records one
PASS/FAIL line that is printed in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from naqsim import phase_space as ps
from naqsim.config import ExperimentConfig
from naqsim.experiments import field_argmax, sweep_field
from naqsim.generator import build_context
from naqsim.integrator import IntegratorConfig, evolve
from naqsim.operators import SystemParams, initial_plus_product
from naqsim.verify import (
    associator_cross_check,
    bohr_residuals,
    field_mixed,
    field_radial,
    field_solenoidal,
    rk4_oracle_deviation,
    structural_residuals,
)

KAPPAS = (0.0, 50.0, 100.0, 150.0, 200.0)


def report(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    assert ok, detail


@pytest.fixture(scope="module")
def field_scan():
    cfg = ExperimentConfig(mode="sweep-field", kappa_list=KAPPAS)
    t0 = time.perf_counter()
    table = sweep_field(cfg, workers=1)
    serial = time.perf_counter() - t0
    t0 = time.perf_counter()
    table4 = sweep_field(cfg, workers=4)
    parallel = time.perf_counter() - t0
    return cfg.field_grid, table, table4, serial, parallel


def test_01_steady_state_concurrence(reference_sweep):
    c0, c200 = reference_sweep[0.0][0].c_ss, reference_sweep[200.0][0].c_ss
    t0 = time.perf_counter()
    evolve(initial_plus_product(), build_context(SystemParams(kappa=200.0)), IntegratorConfig())
    elapsed = time.perf_counter() - t0
    ok = abs(c0 - 0.306) <= 0.01 and abs(c200 - 0.125) <= 0.01 and elapsed < 10
    report(1, ok, f"C_ss(0)={c0:.5f} C_ss(200)={c200:.5f} trajectory {elapsed:.2f}s")


def test_02_suppression_ratio(reference_sweep):
    c0, c200 = reference_sweep[0.0][0].c_ss, reference_sweep[200.0][0].c_ss
    ratio = (c0 - c200) / c0
    report(2, abs(ratio - 0.59) <= 0.03, f"suppression={ratio:.4f}")


def test_03_purity_and_entropy(reference_sweep):
    s0, s200 = reference_sweep[0.0][0], reference_sweep[200.0][0]
    ok = (
        abs(s0.purity_ss - 0.742) <= 0.02 and abs(s200.purity_ss - 0.547) <= 0.02
        and abs(s0.entropy_ss - 0.533) <= 0.02 and abs(s200.entropy_ss - 0.890) <= 0.02
    )
    report(3, ok, f"purity {s0.purity_ss:.4f}/{s200.purity_ss:.4f} "
                  f"entropy(ln) {s0.entropy_ss:.4f}/{s200.entropy_ss:.4f}")


def test_04_monotonicity(reference_sweep):
    c = [reference_sweep[k][0].c_ss for k in KAPPAS]
    s = [reference_sweep[k][0].entropy_ss for k in KAPPAS]
    ok = all(b <= a for a, b in zip(c, c[1:])) and all(b >= a for a, b in zip(s, s[1:]))
    report(4, ok, "C_ss " + " ".join(f"{x:.4f}" for x in c))


def test_05_transient_invariance(reference_sweep):
    cmax = [reference_sweep[k][0].c_max for k in KAPPAS]
    spread = (max(cmax) - min(cmax)) / max(cmax)
    report(5, spread <= 2e-3, f"C_max relative spread={spread:.2e}")


def test_06_field_scan(field_scan):
    grid, table, table4, serial, parallel = field_scan
    arg0 = field_argmax(grid, table)[0]
    tail = max(row[j] for h, row in zip(grid, table) if h >= 0.5 for j in range(len(KAPPAS)))
    ok = (
        abs(arg0 - 0.25) <= 0.025 + 1e-12 and tail < 1e-3
        and table4 == table and serial < 15 * 60 and parallel < 4 * 60
    )
    report(6, ok, f"argmax(kappa=0)={arg0} max C_ss(h/J>=0.5)={tail:.1e} "
                  f"scan {serial:.0f}s serial / {parallel:.0f}s with 4 workers")


def test_07_complete_positivity(reference_sweep):
    worst = min(m for _, m in reference_sweep.values())
    report(7, worst >= -1e-12, f"min eigenvalue over all runs={worst:.2e}")


def test_08_kappa0_oracle():
    ctx = build_context(SystemParams(kappa=0.0))
    dev = {t: rk4_oracle_deviation(ctx, (t,), 0.05) for t in (1.0, 10.0, 100.0)}
    half = {t: rk4_oracle_deviation(ctx, (t,), 0.025) for t in (10.0, 100.0)}
    ratios = [dev[t] / half[t] for t in half]
    ok = max(dev.values()) <= 1e-6 and all(abs(r - 16) <= 4 for r in ratios)
    report(8, ok, "deviation " + " ".join(f"t={t:g}:{d:.2e}" for t, d in dev.items())
                  + " halving ratio " + " ".join(f"{r:.1f}" for r in ratios))


def test_09_associator_cross_check():
    worst = associator_cross_check(np.random.default_rng(20240601), samples=100)
    report(9, worst <= 1e-12, f"worst |closed form - symbol evaluator|={worst:.3e}")


def test_10_jacobiator():
    fields = [
        ("radial", field_radial, lambda x: 3.0),
        ("solenoidal", field_solenoidal, lambda x: 0.0),
        ("mixed", field_mixed, lambda x: x[1] + 2 * x[2]),
    ]
    rng = np.random.default_rng(7)
    worst, worst_free = {}, 0.0
    for name, b, div in fields:
        worst[name] = 0.0
        for _ in range(3):
            x = rng.uniform(-1, 1, size=3)
            q = rng.uniform(0.5, 2.0)
            for idx in ((1, 2, 3), (2, 1, 3), (3, 1, 2), (1, 1, 2)):
                eps = ps.LEVI_CIVITA[idx[0] - 1, idx[1] - 1, idx[2] - 1]
                got = ps.monopole_jacobiator(b, q, x, idx)
                worst[name] = max(worst[name], abs(got - q * eps * div(x)))
                if name == "solenoidal":
                    worst_free = max(worst_free, abs(got))
    ok = max(worst.values()) <= 1e-6 and worst_free <= 1e-8
    report(10, ok, " ".join(f"{k}:{v:.2e}" for k, v in worst.items()) + f" divfree:{worst_free:.1e}")


def test_11_structural_invariants():
    res = structural_residuals(np.random.default_rng(11), samples=1000)
    ok = (
        res["trace"] <= 1e-13 and res["hermiticity"] <= 1e-13
        and res["homogeneity"] == 0.0 and res["zero_temperature"] <= 1e-14
    )
    report(11, ok, " ".join(f"{k}={v:.1e}" for k, v in res.items()))


def test_12_bohr_decomposition():
    complete, eigen = bohr_residuals(SystemParams(J=1.0, h1=0.25, h2=0.25))
    report(12, complete <= 1e-10 and eigen <= 1e-10, f"completeness={complete:.1e} eigenrelation={eigen:.1e}")
