"""Quadratic-phase exponential sums.

Fraction reduction of times, Gauss-sum tables, curlicue sums and a
phase-accurate weighted sum ``sum_m w_m exp(-2 pi i (a m + b m^2) tau)``.

Every phase is carried as a number of *cycles* and reduced modulo one before
the complex exponential is evaluated.  Rational coefficients are reduced with
exact integer arithmetic; floating coefficients go through error-free
products so that cycle counts near 2**50 keep their fractional part.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

import numpy as np

from .errors import DomainError, ResourceError

Real = Union[float, int, Fraction]

#: default budget (number of unit-modulus terms) for curlicue evaluations
CURLICUE_MAX_TERMS = 10**7

_SPLITTER = 134217729.0  # 2**27 + 1
_INT64_SAFE = 2**31


@dataclass(frozen=True)
class ReducedFraction:
    """A time written as ``(q/r) N + epsilon`` with ``gcd(q, r) = 1``."""

    q: int
    r: int
    epsilon: float

    def __post_init__(self):
        if self.r < 1:
            raise DomainError(f"denominator must be positive, got {self.r}")
        if math.gcd(self.q, self.r) != 1:
            raise DomainError(f"{self.q}/{self.r} is not in lowest terms")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.q, self.r)


@dataclass(frozen=True)
class GaussSumTable:
    """The ``r`` values ``W_m = (1/r) sum_p exp(-2 pi i (p^2 q + p m) / r)``."""

    r: int
    q: int
    values: np.ndarray

    def __getitem__(self, m):
        return self.values[np.mod(m, self.r)]

    def __len__(self):
        return self.r


@dataclass(frozen=True)
class CurlicueSeries:
    """``s_N(n) = sum_{m<N} exp(-2 pi i m^2 n / N)`` for ``n = 0..N-1``."""

    N: int
    values: np.ndarray

    def __getitem__(self, n):
        return self.values[np.mod(n, self.N)]

    def __len__(self):
        return self.N


# --- time reduction ---------------------------------------------------------

def reduce_time(ell: int, N: int) -> ReducedFraction:
    """Write the integer time ``ell`` as ``(q/r) N`` with ``q/r = ell/N`` reduced."""
    if N < 2:
        raise DomainError(f"N must be at least 2, got {N}")
    if ell < 1:
        raise DomainError(f"ell must be positive, got {ell}")
    frac = Fraction(ell, N)
    eps = Fraction(ell) - frac * N
    return ReducedFraction(frac.numerator, frac.denominator, float(eps))


def decompose_real_time(t: float, N: int, r_max: int) -> tuple[ReducedFraction, float]:
    """Split ``t`` into ``(q/r) N + epsilon + delta_t``.

    With ``ell = round(t)``, ``q/r`` is the best rational approximation of
    ``ell/N`` with ``r <= r_max`` (convergents and semiconvergents, ties
    resolved toward the smaller denominator), ``epsilon = ell - (q/r) N`` and
    ``delta_t = t - ell``.  Any ``q/r`` makes the decomposition exact; anchoring
    it at ``ell`` gives ``epsilon = 0`` whenever ``ell * r = q * N``.
    """
    if r_max < 1:
        raise DomainError(f"r_max must be positive, got {r_max}")
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    if not math.isfinite(t):
        raise DomainError(f"t must be finite, got {t}")
    exact_t = Fraction(t)
    ell = round(exact_t)
    ratio = Fraction(ell, N).limit_denominator(r_max)
    eps = ell - ratio * N
    fraction = ReducedFraction(ratio.numerator, ratio.denominator, float(eps))
    return fraction, float(exact_t - ell)


# --- error-free arithmetic ---------------------------------------------------

def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """Return ``(p, e)`` with ``p = fl(a*b)`` and ``p + e == a*b`` exactly."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _as_exact(x: Real):
    if isinstance(x, (Fraction, int, np.integer)) or isinstance(x, Rational):
        return Fraction(x)
    return None


def _coefficient_cycles(coef: Real, tau: Real):
    """Express ``coef * tau`` as ``num/den + hi + lo``.

    The rational part carries everything that can be reduced exactly; the
    double-double remainder ``hi + lo`` is small when ``coef`` is rational.
    """
    exact_coef = _as_exact(coef)
    exact_tau = _as_exact(tau)
    if exact_coef is not None and exact_tau is not None:
        prod = exact_coef * exact_tau
        return prod.numerator % prod.denominator, prod.denominator, 0.0, 0.0
    if exact_coef is not None:
        tau = float(tau)
        ell = round(tau)
        frac = tau - ell  # exact: ell is the nearest integer to tau
        a, b = exact_coef.numerator, exact_coef.denominator
        ch = a / b
        cl = float(exact_coef - Fraction(ch))
        hi, lo = two_prod(ch, frac)
        return (a * ell) % b, b, hi, lo + cl * frac
    hi, lo = two_prod(float(coef), float(tau))
    return 0, 1, hi, lo


def _rational_part(ints: np.ndarray, num: int, den: int) -> np.ndarray:
    """``(ints * num mod den) / den`` in exact integer arithmetic."""
    if num == 0:
        return np.zeros(ints.shape)
    if den < _INT64_SAFE:
        k = (np.mod(ints, den) * num) % den
        return k / den
    k = np.array([(int(v) * num) % den for v in ints.ravel()], dtype=object)
    return np.array([float(Fraction(int(v), den)) for v in k]).reshape(ints.shape)


def _scaled_cycles(ints: np.ndarray, num, den, hi, lo) -> np.ndarray:
    x = ints.astype(np.float64)
    h, l = two_prod(hi, x)
    l = l + lo * x
    h = h - np.rint(h)
    out = _rational_part(ints, num, den) + h + l
    return out - np.rint(out)


def cycle_fractions(indices, linear: Real, quadratic: Real, tau: Real) -> np.ndarray:
    """Fractional cycle counts of ``(linear*m + quadratic*m^2) * tau`` in [-1/2, 1/2].

    ``linear`` and ``quadratic`` may be ``Fraction``/``int`` (reduced exactly)
    or floats.  Indices must satisfy ``|m| < 2**26`` so that ``m^2`` is exact.
    """
    m = np.asarray(indices, dtype=np.int64)
    if m.size and np.max(np.abs(m)) >= 2**26:
        raise DomainError("indices must satisfy |m| < 2**26")
    total = np.zeros(m.shape)
    if linear != 0:
        total = total + _scaled_cycles(m, *_coefficient_cycles(linear, tau))
    if quadratic != 0:
        total = total + _scaled_cycles(m * m, *_coefficient_cycles(quadratic, tau))
    return total - np.rint(total)


def unit_phases(cycles: np.ndarray) -> np.ndarray:
    """``exp(-2 pi i c)`` for reduced cycle counts ``c``."""
    angle = 2.0 * np.pi * cycles
    return np.cos(angle) - 1j * np.sin(angle)


def phase_sum(indices, weights, linear: Real, quadratic: Real, tau: Real) -> complex:
    """Evaluate ``sum_m w_m exp[-2 pi i (linear*m + quadratic*m^2) * tau]``.

    Parameters
    ----------
    indices : array of int
        Summation indices ``m``.
    weights : array of float or complex
        Weights ``w_m`` aligned with ``indices``.
    linear, quadratic : float, int or Fraction
        Coefficients of the linear and quadratic phase terms.  Rational
        coefficients are reduced with exact integer arithmetic.
    tau : float, int or Fraction
        Time argument.

    Returns
    -------
    complex
    """
    w = np.asarray(weights)
    if not np.all(np.isfinite(w)):
        raise DomainError("weights must be finite")
    if not math.isfinite(float(tau)):
        raise DomainError("tau must be finite")
    cycles = cycle_fractions(indices, linear, quadratic, tau)
    return complex(np.sum(w * unit_phases(cycles)))


# --- Gauss and curlicue sums -------------------------------------------------

def _root_table(n: int) -> np.ndarray:
    """``exp(-2 pi i k / n)`` for ``k = 0..n-1``."""
    return unit_phases(np.arange(n) / n)


def gauss_sum_table(r: int, q: int) -> GaussSumTable:
    """Gauss sums ``W_m^(r)`` for ``m = 0..r-1`` by direct summation.

    Each exponent ``p^2 q + p m`` is reduced mod ``r`` in integer arithmetic,
    so the accuracy does not degrade with ``r``.
    """
    if r < 1:
        raise DomainError(f"r must be positive, got {r}")
    q = int(q)
    roots = _root_table(r)
    p = np.arange(r, dtype=np.int64)
    quad = (p * p % r) * (q % r) % r
    values = np.empty(r, dtype=np.complex128)
    # rows of the r x r exponent matrix, chunked to bound memory
    chunk = max(1, 2**22 // r)
    for start in range(0, r, chunk):
        m = np.arange(start, min(r, start + chunk), dtype=np.int64)
        k = (quad[None, :] + np.outer(m, p) % r) % r
        values[start:start + m.size] = roots[k].sum(axis=1) / r
    return GaussSumTable(r=r, q=q % r, values=values)


def curlicue_values(N: int, ns, max_terms: int = CURLICUE_MAX_TERMS) -> np.ndarray:
    """``s_N(n)`` at the requested ``n`` (any integers, taken mod ``N``)."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    ns = np.atleast_1d(np.asarray(ns, dtype=np.int64))
    if ns.size * N > max_terms:
        raise ResourceError(
            f"curlicue evaluation needs {ns.size * N} terms, budget is {max_terms}")
    roots = _root_table(N)
    # s_N(n) = sum_k c_k exp(-2 pi i k n / N) with c_k = #{m : m^2 = k mod N}
    m = np.arange(N, dtype=np.int64)
    residues = m * m % N
    counts = np.bincount(residues, minlength=N)
    support = np.nonzero(counts)[0]
    weights = counts[support].astype(np.float64)
    out = np.empty(ns.size, dtype=np.complex128)
    chunk = max(1, 2**22 // max(1, support.size))
    for start in range(0, ns.size, chunk):
        n = np.mod(ns[start:start + chunk], N)
        k = np.outer(n, support) % N
        out[start:start + n.size] = roots[k] @ weights
    return out


def curlicue_series(N: int, max_terms: int = CURLICUE_MAX_TERMS) -> CurlicueSeries:
    """Full curlicue series ``s_N(n)``, ``n = 0..N-1``."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    if N * N > max_terms:
        raise ResourceError(f"curlicue series of N={N} needs {N * N} terms, budget is {max_terms}")
    return CurlicueSeries(N=N, values=curlicue_values(N, np.arange(N), max_terms=max_terms))
