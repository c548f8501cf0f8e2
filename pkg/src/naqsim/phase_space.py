"""Stratonovich-Weyl symbols on the Bloch sphere and twisted-bracket diagnostics.

Single-qubit symbols use the kernel (I + sqrt(3) n.sigma)/2. Gradients are
taken with respect to the ambient coordinates s = sqrt(3) n of each site,
where the kernel extends to (I + s.sigma)/2 and symbols of qubit operators
become affine functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .operators import I2, pauli
from .qlinalg import as_matrix, kron

SQRT3 = math.sqrt(3.0)
UNIT_TOL = 1e-12

_SIGMAS = (pauli("x"), pauli("y"), pauli("z"))


@dataclass(frozen=True)
class BlochPoint:
    n: tuple[float, float, float]

    def __post_init__(self):
        v = np.asarray(self.n, dtype=float)
        if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
            raise ValueError(f"Bloch point must be a unit 3-vector, got {self.n!r}")
        object.__setattr__(self, "n", tuple(float(x) for x in v))

    @property
    def sigma(self) -> np.ndarray:
        """Ambient coordinates sqrt(3) n."""
        return SQRT3 * np.asarray(self.n)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "BlochPoint":
        st = math.sin(theta)
        return cls((st * math.cos(phi), st * math.sin(phi), math.cos(theta)))


def _point(n) -> np.ndarray:
    if isinstance(n, BlochPoint):
        return np.asarray(n.n)
    return np.asarray(BlochPoint(tuple(np.asarray(n, dtype=float))).n)


@dataclass(frozen=True)
class SymbolGradient:
    """Gradient of a symbol with respect to the ambient coordinates of one site."""

    site: int
    grad: tuple[complex, complex, complex]

    def __post_init__(self):
        if self.site not in (1, 2):
            raise ValueError(f"site must be 1 or 2, got {self.site!r}")
        g = np.asarray(self.grad, dtype=np.complex128)
        if g.shape != (3,) or not np.all(np.isfinite(g)):
            raise ValueError("gradient must be a finite complex 3-vector")
        object.__setattr__(self, "grad", tuple(complex(x) for x in g))

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.grad, dtype=np.complex128)


@dataclass(frozen=True)
class TwistField:
    """Per-site twist coefficients chi_a(s) of the twisted Poisson bivector."""

    chi: tuple[Callable[[np.ndarray], float], Callable[[np.ndarray], float]]

    @classmethod
    def ising_aligned(cls, kappa1: float, kappa2: float | None = None) -> "TwistField":
        """chi_a(s) = kappa_a * s_z."""
        k2 = kappa1 if kappa2 is None else kappa2
        return cls((lambda s, k=float(kappa1): k * s[2], lambda s, k=float(k2): k * s[2]))

    @classmethod
    def zero(cls) -> "TwistField":
        return cls((lambda s: 0.0, lambda s: 0.0))

    def __call__(self, site: int, sigma_point) -> float:
        return float(self.chi[site - 1](np.asarray(sigma_point, dtype=float)))


def sw_kernel(n) -> np.ndarray:
    v = _point(n)
    return 0.5 * (I2 + SQRT3 * sum(c * s for c, s in zip(v, _SIGMAS)))


def _ambient_kernel(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return 0.5 * (I2 + sum(c * p for c, p in zip(s, _SIGMAS)))


def symbol(a, n1, n2=None) -> complex:
    """SW symbol Tr[A Delta(n1)] or, for two qubits, Tr[A Delta(n1) (x) Delta(n2)]."""
    a = as_matrix(a)
    if n2 is None:
        if a.shape != (2, 2):
            raise ValueError(f"single-site symbol needs a 2x2 operator, got {a.shape}")
        return complex(np.trace(a @ sw_kernel(n1)))
    if a.shape != (4, 4):
        raise ValueError(f"two-site symbol needs a 4x4 operator, got {a.shape}")
    return complex(np.trace(a @ kron(sw_kernel(n1), sw_kernel(n2))))


def ambient_symbol(a, s1, s2=None) -> complex:
    """Symbol extended off the sphere to arbitrary ambient coordinates."""
    a = as_matrix(a)
    if s2 is None:
        return complex(np.trace(a @ _ambient_kernel(s1)))
    return complex(np.trace(a @ kron(_ambient_kernel(s1), _ambient_kernel(s2))))


def symbol_gradient(a, site: int, s1, s2=None, step: float = 1e-4) -> SymbolGradient:
    """Numerical gradient of the ambient symbol with respect to ``site``'s coordinates.

    Central differences with one Richardson refinement; exact up to rounding
    for the affine symbols of qubit operators.
    """
    s1 = np.asarray(s1, dtype=float)
    s2 = None if s2 is None else np.asarray(s2, dtype=float)

    def f(x):
        if site == 1:
            return ambient_symbol(a, x, s2)
        return ambient_symbol(a, s1, x)

    base = s1 if site == 1 else s2
    if base is None:
        raise ValueError("site 2 gradient needs two-site coordinates")
    grad = [_richardson_derivative(f, base, i, step) for i in range(3)]
    return SymbolGradient(site, tuple(grad))


def jump_symbol_gradients(g: float, site: int) -> tuple[SymbolGradient, SymbolGradient]:
    """Gradients of the symbols of S = g sigma_- and S^dagger on ``site``."""
    return (
        SymbolGradient(site, (g / 2, -0.5j * g, 0.0)),
        SymbolGradient(site, (g / 2, 0.5j * g, 0.0)),
    )


def linearized_state_gradient(r, site: int) -> SymbolGradient:
    """Gradient r/4 of the product-state symbol with the inter-site term dropped.

    The full product symbol (1 + r1.s1)(1 + r2.s2)/4 has gradient
    r1 (1 + r2.s2)/4 on site 1; the linearised form keeps only r1/4, which is
    what the closed-form feedback associators are built from.
    """
    return SymbolGradient(site, tuple(0.25 * np.asarray(r, dtype=float)))


def associator(f: SymbolGradient, g: SymbolGradient, h: SymbolGradient,
               chi: TwistField, sigma_point) -> complex:
    """Leading-order associator (-i/6) chi(s) (grad f x grad g) . grad h on one site."""
    if not f.site == g.site == h.site:
        raise ValueError(f"gradients live on different sites: {f.site}, {g.site}, {h.site}")
    triple = np.dot(np.cross(f.vector, g.vector), h.vector)
    return complex(-1j / 6.0 * chi(f.site, sigma_point) * triple)


# --- magnetic-monopole bracket ------------------------------------------------

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0

FD_STEP = 1e-4


def _richardson_derivative(f, z, index: int, step: float):
    z = np.asarray(z, dtype=float)

    def central(hh):
        e = np.zeros_like(z)
        e[index] = hh
        return (f(z + e) - f(z - e)) / (2 * hh)

    return (4 * central(step / 2) - central(step)) / 3


def _gradient(f, z, step: float) -> np.ndarray:
    return np.array([_richardson_derivative(f, z, i, step) for i in range(len(z))])


def magnetic_bracket(f, g, b_field, q: float, step: float = FD_STEP):
    """Bracket {f, g} on phase space z = (x1, x2, x3, p1, p2, p3).

    {x_i, p_j} = delta_ij and {p_i, p_j} = q eps_ijk B_k(x); all partial
    derivatives are finite differences. Returns a function of z.
    """

    def bracket(z):
        z = np.asarray(z, dtype=float)
        df = _gradient(f, z, step)
        dg = _gradient(g, z, step)
        canonical = np.dot(df[:3], dg[3:]) - np.dot(df[3:], dg[:3])
        b = np.asarray(b_field(z[:3]), dtype=float)
        theta_pp = q * np.einsum("ijk,k->ij", LEVI_CIVITA, b)
        return canonical + df[3:] @ theta_pp @ dg[3:]

    return bracket


def jacobiator(f, g, h, b_field, q: float, z, step: float = FD_STEP) -> float:
    """{f,{g,h}} + {g,{h,f}} + {h,{f,g}} evaluated at ``z`` by nested finite differences."""
    total = 0.0
    for a, b, c in ((f, g, h), (g, h, f), (h, f, g)):
        inner = magnetic_bracket(b, c, b_field, q, step)
        total += magnetic_bracket(a, inner, b_field, q, step)(z)
    return float(total)


def momentum(i: int):
    return lambda z: z[3 + i]


def monopole_jacobiator(b_field, q: float, point: Sequence[float],
                        indices: tuple[int, int, int], momenta=None,
                        step: float = FD_STEP) -> float:
    """Cyclic bracket sum of the momenta p_i, p_j, p_k (indices 1-based) at ``point``."""
    if any(i not in (1, 2, 3) for i in indices):
        raise ValueError(f"momentum indices must be in 1..3, got {indices!r}")
    x = np.asarray(point, dtype=float)
    p = np.zeros(3) if momenta is None else np.asarray(momenta, dtype=float)
    z = np.concatenate([x, p])
    i, j, k = (momentum(n - 1) for n in indices)
    return jacobiator(i, j, k, b_field, q, z, step)


def divergence(b_field, point, step: float = FD_STEP) -> float:
    x = np.asarray(point, dtype=float)
    return float(sum(
        _richardson_derivative(lambda y, c=c: np.asarray(b_field(y))[c], x, c, step)
        for c in range(3)
    ))


def jacobiator_closed_form(b_field, q: float, point, indices) -> float:
    """q eps_ijk div B, the monopole charge form of the Jacobi violation."""
    i, j, k = (n - 1 for n in indices)
    return q * LEVI_CIVITA[i, j, k] * divergence(b_field, point)


def sphere_quadrature(n_theta: int = 32, n_phi: int = 64):
    """Gauss-Legendre in cos(theta) times uniform phi; weights sum to 1 (normalised 4 pi)."""
    x, w = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    ct = np.repeat(x, n_phi)
    st = np.sqrt(1 - ct**2)
    ph = np.tile(phi, n_theta)
    pts = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=1)
    weights = np.repeat(w, n_phi) / (2 * n_phi)
    return pts, weights


def reconstruct_from_symbols(values: Sequence[complex], points) -> np.ndarray:
    """Invert the single-qubit symbol map from symbol values at four points.

    The points must be affinely independent on the sphere (e.g. +x, +y, +z, -z).
    """
    pts = np.asarray([_point(p) for p in points])
    if pts.shape != (4, 3):
        raise ValueError("need exactly four sample points")
    # symbol(n) = c0/2 + (sqrt(3)/2) sum_i c_i n_i with c0 = Tr A, c_i = Tr(A sigma_i)
    design = np.hstack([np.full((4, 1), 0.5), 0.5 * SQRT3 * pts])
    coeffs = np.linalg.solve(design, np.asarray(values, dtype=np.complex128))
    return 0.5 * (coeffs[0] * I2 + sum(c * s for c, s in zip(coeffs[1:], _SIGMAS)))
