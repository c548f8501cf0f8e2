"""Pauli algebra, site embeddings, the two-site TFIM Hamiltonian and initial states.

Conventions: sigma_z = diag(1, -1) with |0> = (1, 0)^T, hbar = 1. The
lowering operator (sigma_x - i sigma_y)/2 maps |0> to |1>, so amplitude
damping drives <sigma_z> towards -1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qlinalg import kron

I2 = np.eye(2, dtype=np.complex128)

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def _pair(value) -> tuple[float, float]:
    if np.ndim(value) == 0:
        return (float(value), float(value))
    a, b = value
    return (float(a), float(b))


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the two-site model (energies in units with hbar = 1).

    Per-site quantities accept either a scalar (applied to both sites) or a
    pair. ``gamma_minus``/``eps_minus`` describe the absorption channel and
    vanish at zero temperature.
    """

    J: float = 1.0
    h1: float = 0.25
    h2: float = 0.25
    g1: float = 0.2
    g2: float = 0.2
    gamma_plus: tuple[float, float] = (0.05, 0.05)
    eps_plus: tuple[float, float] = (0.01, 0.01)
    kappa: tuple[float, float] = (0.0, 0.0)
    gamma_minus: tuple[float, float] = field(default=(0.0, 0.0))
    eps_minus: tuple[float, float] = field(default=(0.0, 0.0))

    def __post_init__(self):
        for name in ("gamma_plus", "eps_plus", "kappa", "gamma_minus", "eps_minus"):
            object.__setattr__(self, name, _pair(getattr(self, name)))
        for name in ("J", "h1", "h2", "g1", "g2"):
            object.__setattr__(self, name, float(getattr(self, name)))
        values = [self.J, self.h1, self.h2, self.g1, self.g2]
        for name in ("gamma_plus", "eps_plus", "kappa", "gamma_minus", "eps_minus"):
            values.extend(getattr(self, name))
        if not all(math.isfinite(v) for v in values):
            raise ValueError("all system parameters must be finite")
        if min(self.gamma_plus) < 0 or min(self.gamma_minus) < 0:
            raise ValueError("damping rates must be non-negative")

    @property
    def couplings(self) -> tuple[float, float]:
        return (self.g1, self.g2)

    @property
    def zero_temperature(self) -> bool:
        return self.gamma_minus == (0.0, 0.0) and self.eps_minus == (0.0, 0.0)

    def feedback_strengths(self) -> tuple[float, float]:
        """lambda_a = g_a^2 eps_a kappa_a / 16 for each site."""
        return tuple(
            g * g / 16.0 * e * k
            for g, e, k in zip(self.couplings, self.eps_plus, self.kappa)
        )

    def lambda_over_gamma(self, site: int = 1) -> float:
        i = site - 1
        g = self.couplings[i]
        return g * g / 16.0 * self.eps_plus[i] / self.gamma_plus[i] * self.kappa[i]


def pauli(axis: str) -> np.ndarray:
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}; expected 'x', 'y' or 'z'") from None


def sigma_minus() -> np.ndarray:
    return 0.5 * (pauli("x") - 1j * pauli("y"))


def sigma_plus() -> np.ndarray:
    return 0.5 * (pauli("x") + 1j * pauli("y"))


def embed(op, site: int) -> np.ndarray:
    """Lift a single-qubit operator to the two-qubit space on ``site`` (1 or 2)."""
    if site == 1:
        return kron(op, I2)
    if site == 2:
        return kron(I2, op)
    raise ValueError(f"site must be 1 or 2, got {site!r}")


def build_tfim(p: SystemParams) -> np.ndarray:
    """H = -J sz(x)sz - (h1/2) sx(x)I - (h2/2) I(x)sx."""
    sz, sx = pauli("z"), pauli("x")
    return -p.J * kron(sz, sz) - 0.5 * p.h1 * embed(sx, 1) - 0.5 * p.h2 * embed(sx, 2)


def initial_plus_product() -> np.ndarray:
    """|+><+| (x) |+><+|; every entry equals 1/4."""
    plus = np.full((2, 2), 0.5, dtype=np.complex128)
    return kron(plus, plus)


def product_state(r1, r2) -> np.ndarray:
    """Two-qubit product state built from Bloch vectors ``r1`` and ``r2``."""
    return kron(bloch_state(r1), bloch_state(r2))


def bloch_state(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return 0.5 * (I2 + r[0] * _PAULI["x"] + r[1] * _PAULI["y"] + r[2] * _PAULI["z"])
