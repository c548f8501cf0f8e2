"""Bath kernels, damping rates, dispersive shifts and associator coefficients."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .qlinalg import NumericalError

# excision half-widths as multiples of omega_star, refined by Richardson extrapolation
PV_EXCISION_FRACTIONS = (1e-2, 5e-3, 2.5e-3)
_SIMPSON_PANELS = 4000
_TAIL_DECADES = 60.0


@dataclass(frozen=True)
class BathKernels:
    """Time-integrated bath correlators K_+ and K_- with K = (Gamma + i eps)/2."""

    gamma_plus: float
    eps_plus: float
    gamma_minus: float = 0.0
    eps_minus: float = 0.0

    def __post_init__(self):
        if self.gamma_plus < 0 or self.gamma_minus < 0:
            raise ValueError("bath rates must be non-negative")

    @property
    def k_plus(self) -> complex:
        return complex(self.gamma_plus, self.eps_plus) / 2

    @property
    def k_minus(self) -> complex:
        return complex(self.gamma_minus, self.eps_minus) / 2

    @classmethod
    def from_kernels(cls, k_plus: complex, k_minus: complex = 0j) -> "BathKernels":
        return cls(2 * k_plus.real, 2 * k_plus.imag, 2 * k_minus.real, 2 * k_minus.imag)


def lambda_coefficients(k: BathKernels) -> tuple[complex, ...]:
    """Coefficients (Lambda_1, ..., Lambda_6) of the six associator terms.

    Lambda_{1,3,6} = K_+ - K_+^* and Lambda_{2,4,5} = K_- - K_-^*. Only the
    dispersive parts eps_+- enter; the damping rates drop out.
    """
    lp = 2j * k.k_plus.imag
    lm = 2j * k.k_minus.imag
    return (lp, lm, lp, lm, lm, lp)


def fermi_occupation(omega: float, temperature: float) -> float:
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    if temperature == 0:
        if omega > 0:
            return 0.0
        if omega < 0:
            return 1.0
        return 0.5
    x = omega / temperature
    # expit form avoids overflow for large |x|
    if x >= 0:
        e = math.exp(-x)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(x))


@dataclass(frozen=True)
class SpectralDensity:
    """Bath spectral density J(omega) on [lower, upper] plus the transition frequency.

    ``kind`` is one of ``"flat"`` (constant ``amplitude`` on the band),
    ``"ohmic"`` (``amplitude * w * exp(-w / cutoff)`` on [0, inf)) or
    ``"tabulated"`` (linear interpolation of ``table``).
    """

    kind: str
    omega_star: float
    amplitude: float = 0.0
    cutoff: float = 1.0
    lower: float = 0.0
    upper: float = math.inf
    table: tuple[tuple[float, ...], tuple[float, ...]] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("flat", "ohmic", "tabulated"):
            raise ValueError(f"unknown spectral density kind {self.kind!r}")
        if self.kind == "tabulated":
            if self.table is None:
                raise ValueError("tabulated spectral density needs a table")
            w, j = (np.asarray(c, dtype=float) for c in self.table)
            if w.shape != j.shape or w.size < 2 or np.any(np.diff(w) <= 0):
                raise ValueError("table must hold increasing frequencies and matching values")
            if np.any(j < 0):
                raise ValueError("spectral density must be non-negative")
            object.__setattr__(self, "lower", float(w[0]))
            object.__setattr__(self, "upper", float(w[-1]))
        elif self.amplitude < 0:
            raise ValueError("spectral density amplitude must be non-negative")
        if self.kind == "ohmic":
            if self.cutoff <= 0:
                raise ValueError("ohmic cutoff must be positive")
            object.__setattr__(self, "lower", 0.0)
            object.__setattr__(self, "upper", math.inf)
        if not self.lower < self.upper:
            raise ValueError("spectral density support must have lower < upper")

    @classmethod
    def flat(cls, amplitude: float, lower: float, upper: float, omega_star: float):
        return cls("flat", omega_star, amplitude=amplitude, lower=lower, upper=upper)

    @classmethod
    def ohmic(cls, amplitude: float, cutoff: float, omega_star: float):
        return cls("ohmic", omega_star, amplitude=amplitude, cutoff=cutoff)

    @classmethod
    def tabulated(cls, omegas, values, omega_star: float):
        return cls("tabulated", omega_star, table=(tuple(omegas), tuple(values)))

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        if self.kind == "flat":
            inside = (w >= self.lower) & (w <= self.upper)
            return np.where(inside, self.amplitude, 0.0)
        if self.kind == "ohmic":
            return np.where(w >= 0, self.amplitude * w * np.exp(-w / self.cutoff), 0.0)
        ws, js = self.table
        return np.interp(w, ws, js, left=0.0, right=0.0)

    def integration_upper(self) -> float:
        if math.isfinite(self.upper):
            return self.upper
        return self.cutoff * _TAIL_DECADES


def _simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int) -> float:
    if b <= a:
        return 0.0
    n = panels + panels % 2
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    return float(h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))


def principal_value(g: Callable[[np.ndarray], np.ndarray], a: float, b: float, x0: float,
                    fractions=PV_EXCISION_FRACTIONS, panels: int = _SIMPSON_PANELS) -> float:
    """Cauchy principal value of the integral of g(w)/(w - x0) over [a, b].

    Points x0 - u and x0 + u are paired so the 1/u singularity cancels; the
    leftover excision [x0 - d, x0 + d] contributes 2 g'(x0) d + O(d^3), which
    Richardson extrapolation over the excision widths removes.
    """
    if not a < x0 < b:
        raise ValueError(f"singular point {x0} must lie strictly inside ({a}, {b})")
    half = min(x0 - a, b - x0)

    def paired(u):
        return (g(x0 + u) - g(x0 - u)) / u

    if x0 - a < b - x0:
        tail = _simpson(lambda w: g(w) / (w - x0), x0 + half, b, panels)
    else:
        tail = _simpson(lambda w: g(w) / (w - x0), a, x0 - half, panels)

    scale = x0 if x0 != 0 else half
    deltas = [f * abs(scale) for f in fractions]
    estimates = [_simpson(paired, d, half, panels) + tail for d in deltas]
    # error model c1*d + c3*d^3 for halving widths: eliminate d, then d^3
    if len(estimates) >= 3 and all(math.isclose(deltas[i] / deltas[i + 1], 2.0) for i in range(2)):
        r1 = [2 * estimates[i + 1] - estimates[i] for i in range(2)]
        value = (8 * r1[1] - r1[0]) / 7
    else:
        value = estimates[-1]
    if not math.isfinite(value):
        raise NumericalError(f"principal-value quadrature did not converge (value {value})")
    return value


def rates_from_spectral_density(sd: SpectralDensity, temperature: float = 0.0) -> BathKernels:
    """Gamma_+- = 2 pi J(w*) f_+-(w*), eps_+- = -2 PV int J(w) f_+-(w) / (w - w*) dw."""
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    w0 = sd.omega_star
    if not sd.lower < w0 < sd.upper:
        raise ValueError(f"omega_star={w0} lies outside the spectral support [{sd.lower}, {sd.upper}]")

    if temperature == 0:
        # step function; the midpoint value at w = 0 is a null set, and a
        # band edge at 0 must see the one-sided limit rather than 1/2
        def nf(w):
            return np.where(np.asarray(w) < 0, 1.0, 0.0)
    else:
        nf = np.vectorize(lambda w: fermi_occupation(w, temperature), otypes=[float])

    def f_plus(w):
        return 1.0 - nf(w)

    def f_minus(w):
        return nf(w)

    j0 = float(sd(w0))
    a, b = sd.lower, sd.integration_upper()
    out = {}
    for name, occ in (("plus", f_plus), ("minus", f_minus)):
        gamma = 2 * math.pi * j0 * float(occ(w0))
        if temperature == 0 and name == "minus" and sd.lower >= 0:
            # T = 0: n_F vanishes on w > 0
            out[name] = (gamma, 0.0)
            continue
        pv = principal_value(lambda w, occ=occ: sd(w) * occ(w), a, b, w0)
        out[name] = (gamma, -2.0 * pv)
    return BathKernels(out["plus"][0], out["plus"][1], out["minus"][0], out["minus"][1])
