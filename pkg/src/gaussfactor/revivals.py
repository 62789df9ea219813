"""Autocorrelation of a quadratic spectrum and its fractional-revival form.

Time is measured in units of the classical period (``T_cl = 1``), so the
revival time is ``N`` and

    S_N(tau) = sum_m W(m) exp[-2 pi i (m + m^2/N) tau].

Near ``tau = (q/r) N + epsilon + delta_t`` the same sum is rewritten as
``sum_m W_m^(r) I_m^(r)(delta_t)``: Gauss sums times Gaussian shape functions.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError
from .phase import ReducedFraction, gauss_sum_table, phase_sum

#: weights are kept for |m| <= ceil(CUTOFF_WIDTHS * delta_n)
CUTOFF_WIDTHS = 8.0


@dataclass(frozen=True)
class WeightTable:
    """Gaussian occupation weights ``W(m)`` for ``|m| <= cutoff``, centred at 0."""

    delta_n: float
    cutoff: int
    weights: np.ndarray
    center: int = 0

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.cutoff, self.cutoff + 1, dtype=np.int64)

    def density(self, mu):
        """Continuous extension of the weights."""
        return gaussian_weight(mu, self.delta_n)


def gaussian_weight(mu, delta_n):
    return np.exp(-0.5 * (np.asarray(mu, dtype=float) / delta_n) ** 2) / math.sqrt(
        2.0 * math.pi * delta_n**2)


def gaussian_weights(delta_n: float, cutoff: int | None = None) -> WeightTable:
    if not delta_n > 0 or not math.isfinite(delta_n):
        raise DomainError(f"delta_n must be positive and finite, got {delta_n}")
    if cutoff is None:
        cutoff = math.ceil(CUTOFF_WIDTHS * delta_n)
    if cutoff < 1:
        raise DomainError(f"cutoff must be positive, got {cutoff}")
    m = np.arange(-cutoff, cutoff + 1)
    return WeightTable(delta_n=float(delta_n), cutoff=int(cutoff),
                       weights=gaussian_weight(m, delta_n))


@dataclass(frozen=True)
class RevivalParams:
    """Number ``N = T/T_cl`` encoded in the spectrum plus the weight table."""

    N: int
    weight: WeightTable
    t_cl: float = 1.0

    def __post_init__(self):
        if self.N < 2:
            raise DomainError(f"N must be at least 2, got {self.N}")

    @classmethod
    def gaussian(cls, N: int, delta_n: float, cutoff: int | None = None) -> "RevivalParams":
        return cls(N=int(N), weight=gaussian_weights(delta_n, cutoff))

    @property
    def delta_n(self) -> float:
        return self.weight.delta_n


@dataclass(frozen=True)
class ShapeEval:
    """One Gaussian shape function and the parameters it was built from.

    ``sigma_i`` carries the sign of ``epsilon + delta_t``; it is infinite when
    that combination vanishes.
    """

    m: int
    fraction: ReducedFraction
    delta_t: float
    amplitude: complex
    sigma_r: float
    sigma_i: float
    prefactor: complex


def autocorrelation(params: RevivalParams, tau) -> complex:
    """``S_N(tau)``; ``|S_N| <= 1``."""
    w = params.weight
    return phase_sum(w.indices, w.weights, 1, Fraction(1, params.N), tau)


def autocorrelation_series(params: RevivalParams, taus) -> np.ndarray:
    return np.array([autocorrelation(params, tau) for tau in np.asarray(taus, dtype=float)])


def _shape_coefficients(m: int, fraction: ReducedFraction, delta_t: float, N: int):
    # linear and quadratic cycle coefficients of the integrand in mu
    a = delta_t - m / fraction.r
    b = (fraction.epsilon + delta_t) / N
    return a, b


def shape_function_quadrature(m: int, fraction: ReducedFraction, delta_t: float,
                              params: RevivalParams, tol: float = 1e-9) -> complex:
    """Integrate ``I_m^(r)(delta_t)`` numerically over ``|mu| <= 8 delta_n``.

    The interval is split so that each piece holds only a few oscillations of
    the integrand; each piece is integrated adaptively.
    """
    dn = params.delta_n
    a, b = _shape_coefficients(m, fraction, delta_t, params.N)
    half = CUTOFF_WIDTHS * dn
    cycles = abs(a) * 2 * half + abs(b) * half**2
    pieces = max(1, math.ceil(cycles / 4))
    edges = np.linspace(-half, half, pieces + 1)
    norm = 1.0 / math.sqrt(2.0 * math.pi * dn**2)

    def integrand(mu):
        return norm * math.exp(-0.5 * (mu / dn) ** 2) * cmath.exp(
            -2j * math.pi * (a * mu + b * mu * mu))

    total = 0j
    error = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, err, _ = integrate.quad(integrand, lo, hi, epsabs=tol / (2 * pieces), epsrel=0.0,
                                       limit=200, complex_func=True, full_output=True)
        total += value
        # err is complex: real and imaginary error estimates
        error += abs(err)
    if error > tol:
        raise ConvergenceError(f"shape-function quadrature reached error {error:.3g} > {tol:.3g}")
    return complex(total)


def shape_function_closed(m: int, fraction: ReducedFraction, delta_t: float,
                          params: RevivalParams) -> ShapeEval:
    """Closed form of the shape function for the Gaussian weight.

    With ``a = delta_t - m/r`` and ``b = (epsilon + delta_t)/N`` the integral is

        (1 + 4 pi i dn^2 b)^(-1/2) exp(-a^2 / 2 sigma_r^2) exp(+i a^2 / 2 sigma_i^2)

    where ``sigma_r^2 = 1/(4 pi^2 dn^2) + 4 dn^2 b^2`` and
    ``sigma_i^2 = 1/(16 pi^3 dn^4 b) + b/pi``.
    """
    dn = params.delta_n
    a, b = _shape_coefficients(m, fraction, delta_t, params.N)
    prefactor = 1.0 / cmath.sqrt(1.0 + 4j * math.pi * dn**2 * b)
    sigma_r_sq = 1.0 / (4 * math.pi**2 * dn**2) + 4 * dn**2 * b**2
    if b == 0.0:
        sigma_i = math.inf
        chirp = 1.0
    else:
        sigma_i_sq = 1.0 / (16 * math.pi**3 * dn**4 * b) + b / math.pi
        sigma_i = math.copysign(math.sqrt(abs(sigma_i_sq)), sigma_i_sq)
        chirp = cmath.exp(0.5j * a * a / sigma_i_sq)
    amplitude = prefactor * math.exp(-0.5 * a * a / sigma_r_sq) * chirp
    t_cl = params.t_cl
    return ShapeEval(m=m, fraction=fraction, delta_t=delta_t, amplitude=complex(amplitude),
                     sigma_r=math.sqrt(sigma_r_sq) * t_cl, sigma_i=sigma_i * t_cl,
                     prefactor=complex(prefactor))


def sigma_r(fraction: ReducedFraction, delta_t: float, params: RevivalParams) -> float:
    """Width of the real Gaussian at ``delta_t``."""
    b = (fraction.epsilon + delta_t) / params.N
    dn = params.delta_n
    return math.sqrt(1.0 / (4 * math.pi**2 * dn**2) + 4 * dn**2 * b**2) * params.t_cl


def shape_index_range(fraction: ReducedFraction, delta_t: float, params: RevivalParams,
                      widths: float = 8.0) -> range:
    """Indices ``m`` whose Gaussian centre ``m/r`` lies within ``widths`` sigma_r of ``delta_t``."""
    s = sigma_r(fraction, delta_t, params)
    r = fraction.r
    lo = math.floor(r * (delta_t - widths * s))
    hi = math.ceil(r * (delta_t + widths * s))
    return range(lo, hi + 1)


def decomposition_sum(params: RevivalParams, fraction: ReducedFraction, delta_t: float,
                      m_range=None) -> complex:
    """``sum_m W_m^(r) I_m^(r)(delta_t)``; equals ``S_N((q/r)N + epsilon + delta_t)``."""
    if m_range is None:
        m_range = shape_index_range(fraction, delta_t, params)
    table = gauss_sum_table(fraction.r, fraction.q)
    total = 0j
    for m in m_range:
        total += table[m] * shape_function_closed(m, fraction, delta_t, params).amplitude
    return complex(total)
