"""Talbot and particle-in-a-box propagation with hbar = M = 1.

Both geometries share the phase ``exp(-2 pi i n^2 t/T)``; times are passed as
``t_over_T`` (float or ``Fraction``) and reduced through
:func:`gaussfactor.phase.cycle_fractions`, so integer and half-integer
multiples of ``T`` produce exact phases.

Talbot time is ``T = d^2/pi`` for a grating of period ``d``; the box revival
time is ``T = 4 L^2/pi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError, ResourceError
from .phase import cycle_fractions, unit_phases

#: default budget of (x samples * t samples * modes) for a carpet
CARPET_MAX_TERMS = 10**9


@dataclass(frozen=True)
class PropagatorConfig:
    """Geometry, size (period ``d`` or box length ``L``) and mode cutoff."""

    geometry: str
    size: float
    mode_cutoff: int = 256

    def __post_init__(self):
        if self.geometry not in ("talbot", "box"):
            raise DomainError(f"geometry must be 'talbot' or 'box', got {self.geometry!r}")
        if not self.size > 0 or not math.isfinite(self.size):
            raise DomainError(f"size must be positive, got {self.size}")
        if self.mode_cutoff < 1:
            raise DomainError(f"mode_cutoff must be positive, got {self.mode_cutoff}")

    @classmethod
    def talbot(cls, d: float, mode_cutoff: int = 256) -> "PropagatorConfig":
        return cls("talbot", d, mode_cutoff)

    @classmethod
    def box(cls, L: float, mode_cutoff: int = 256) -> "PropagatorConfig":
        return cls("box", L, mode_cutoff)

    @property
    def talbot_time(self) -> float:
        if self.geometry == "talbot":
            return self.size**2 / math.pi
        return 4.0 * self.size**2 / math.pi


@dataclass(frozen=True)
class WavePacket:
    """Complex amplitudes sampled on a uniform grid."""

    x: np.ndarray
    psi: np.ndarray

    @property
    def grid_step(self) -> float:
        return float(self.x[1] - self.x[0]) if self.x.size > 1 else 0.0

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def norm(self, periodic: bool = False) -> float:
        """``sum |psi|^2 dx``: rectangle rule if periodic, else trapezoid."""
        if periodic:
            return float(np.sum(self.density) * self.grid_step)
        return float(np.trapezoid(self.density, self.x))


@dataclass(frozen=True)
class BoxCoefficients:
    """Eigenfunction coefficients ``psi_n``; ``psi_n[k]`` belongs to ``n = k + 1``."""

    psi_n: np.ndarray

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, self.psi_n.size + 1)

    @property
    def weight(self) -> float:
        return float(np.sum(np.abs(self.psi_n) ** 2))


@dataclass(frozen=True)
class WavePacketGrid:
    """Density ``|psi(x, t)|^2``; rows are times, columns positions."""

    x_grid: np.ndarray
    t_grid: np.ndarray
    density: np.ndarray


def gaussian_packet(x, center: float, width: float, momentum: float = 0.0) -> WavePacket:
    """Normalized Gaussian whose density has standard deviation ``width``."""
    x = np.asarray(x, dtype=float)
    amp = (2 * math.pi * width**2) ** -0.25 * np.exp(-((x - center) ** 2) / (4 * width**2))
    return WavePacket(x=x, psi=amp * np.exp(1j * momentum * x))


def box_grid(L: float, nx: int) -> np.ndarray:
    """``nx`` points on ``[0, L]`` including both walls."""
    return np.linspace(0.0, L, nx)


def period_grid(d: float, nx: int) -> np.ndarray:
    """``nx`` points on ``[-d/2, d/2)``."""
    return -0.5 * d + d * np.arange(nx) / nx


def box_eigenfunctions(n, x, L: float) -> np.ndarray:
    """``u_n(x) = sqrt(2/L) sin(n pi x / L)`` with shape ``(len(n), len(x))``."""
    n = np.asarray(n, dtype=float)
    x = np.asarray(x, dtype=float)
    return math.sqrt(2.0 / L) * np.sin(np.outer(n, x) * (math.pi / L))


def _quadratic_phases(n, t_over_T) -> np.ndarray:
    """``exp(-2 pi i n^2 t/T)`` with the cycle count reduced exactly."""
    return unit_phases(cycle_fractions(n, 0, _time(t_over_T), 1))


def _time(t_over_T):
    if isinstance(t_over_T, (Fraction, int)):
        return Fraction(t_over_T)
    t = float(t_over_T)
    if not math.isfinite(t):
        raise DomainError(f"t/T must be finite, got {t_over_T}")
    return t


def box_expand(packet: WavePacket, config: PropagatorConfig) -> BoxCoefficients:
    """``psi_n = int_0^L phi(y) u_n(y) dy`` by trapezoid quadrature on the samples."""
    if config.geometry != "box":
        raise DomainError("box_expand needs a box geometry")
    L = config.size
    outside = (packet.x < 0.0) | (packet.x > L)
    if np.any(np.abs(packet.psi[outside]) > 1e-12):
        raise DomainError("packet has amplitude outside [0, L]")
    x = packet.x[~outside]
    phi = packet.psi[~outside]
    u = box_eigenfunctions(np.arange(1, config.mode_cutoff + 1), x, L)
    return BoxCoefficients(psi_n=np.trapezoid(u * phi[None, :], x, axis=1))


def propagate_box(coeffs: BoxCoefficients, t_over_T, config: PropagatorConfig,
                  x_grid) -> WavePacket:
    """``psi(x, t) = sum_n psi_n u_n(x) exp(-2 pi i n^2 t/T)``."""
    if not np.all(np.isfinite(coeffs.psi_n)):
        raise DomainError("coefficients must be finite")
    x = np.asarray(x_grid, dtype=float)
    n = coeffs.n
    evolved = coeffs.psi_n * _quadratic_phases(n, t_over_T)
    return WavePacket(x=x, psi=evolved @ box_eigenfunctions(n, x, config.size))


def box_green(x, y, t_over_T, config: PropagatorConfig) -> complex:
    """Box Green's function as the sine-product sum over ``n = 1..mode_cutoff``."""
    L = config.size
    n = np.arange(1, config.mode_cutoff + 1)
    terms = np.sin(n * math.pi * x / L) * np.sin(n * math.pi * y / L)
    return complex(2.0 / L * np.sum(terms * _quadratic_phases(n, t_over_T)))


def talbot_green(x, y, t_over_T, config: PropagatorConfig) -> complex:
    """``G_T = (1/2L) sum_{|n|<=cutoff} exp(-i n pi (x-y)/L) exp(-2 pi i n^2 t/T)``.

    For ``config.geometry == 'talbot'`` the length ``L`` is read as ``d/2``.
    """
    L = config.size if config.geometry == "box" else config.size / 2
    M = config.mode_cutoff
    n = np.arange(-M, M + 1)
    waves = np.exp(-1j * n * (math.pi * (x - y) / L))
    return complex(np.sum(waves * _quadratic_phases(n, t_over_T)) / (2 * L))


def box_via_talbot(y: float, x: float, t_over_T, config: PropagatorConfig) -> complex:
    """Box Green's function as ``G_T(x|y) - G_T(x|-y)``."""
    if config.geometry != "box":
        raise DomainError("box_via_talbot needs a box geometry")
    L = config.size
    if not (0.0 <= x <= L and 0.0 <= y <= L):
        raise DomainError("x and y must lie in [0, L]")
    return talbot_green(x, y, t_over_T, config) - talbot_green(x, -y, t_over_T, config)


def _period_check(partial_wave: WavePacket, config: PropagatorConfig):
    if config.geometry != "talbot":
        raise DomainError("Talbot propagation needs a talbot geometry")
    h = partial_wave.grid_step
    if partial_wave.x.size < 2 or not math.isclose(h * partial_wave.x.size, config.size,
                                                   rel_tol=1e-9):
        raise DomainError("partial wave must be sampled uniformly over exactly one period")


def fourier_coefficients(partial_wave: WavePacket, config: PropagatorConfig):
    """``c_m = (1/d) int phi(y) exp(i 2 pi m y/d) dy`` for ``|m| < nx/2``.

    Returns ``(m, c_m)``; the cutoff is also limited by ``config.mode_cutoff``.
    """
    _period_check(partial_wave, config)
    d = config.size
    M = min(config.mode_cutoff, (partial_wave.x.size - 1) // 2)
    m = np.arange(-M, M + 1)
    kernel = np.exp(1j * np.outer(m, partial_wave.x) * (2 * math.pi / d))
    return m, kernel @ partial_wave.psi * (partial_wave.grid_step / d)


def _talbot_spectral(partial_wave, t_over_T, config, x):
    d = config.size
    m, c = fourier_coefficients(partial_wave, config)
    evolved = c * _quadratic_phases(m, t_over_T)
    return np.exp(-1j * np.outer(x, m) * (2 * math.pi / d)) @ evolved


def _bandwidth(partial_wave: WavePacket, config: PropagatorConfig, rel: float = 1e-16) -> float:
    """Largest wavenumber at which the partial wave's spectrum exceeds ``rel`` of its peak."""
    d = config.size
    spectrum = np.abs(np.fft.fft(partial_wave.psi))
    k = 2 * math.pi * np.fft.fftfreq(spectrum.size, d=partial_wave.grid_step)
    live = spectrum > rel * spectrum.max()
    return float(np.max(np.abs(k[live]))) if np.any(live) else 2 * math.pi / d


def _talbot_direct(partial_wave, t_over_T, config, x):
    d = config.size
    t = float(t_over_T) * config.talbot_time
    if not t > 0:
        raise DomainError("the direct Talbot form needs t > 0; use the identity at t = 0")
    alpha = 1.0 / (2.0 * t)
    norm = np.sqrt(alpha / (math.pi * 1j))
    y = partial_wave.x
    phi = partial_wave.psi
    h = partial_wave.grid_step
    # an image n contributes only while the kernel's local wavenumber
    # 2*alpha*|x - y - n d| stays inside the packet's band
    reach = np.max(np.abs(x)) + np.max(np.abs(y))
    band = _bandwidth(partial_wave, config)
    n_max = 0
    while n_max < config.mode_cutoff and 2 * alpha * ((n_max + 1) * d - reach) <= band:
        n_max += 1
    images = np.arange(-n_max, n_max + 1) * d
    if x.shape == y.shape and np.array_equal(x, y):
        # shared uniform grid: the kernel only depends on i - j
        lag = np.arange(-(y.size - 1), y.size)
        sep = lag[:, None] * h - images[None, :]
        kernel = np.exp(1j * alpha * sep**2).sum(axis=1)
        idx = np.arange(y.size)
        out = kernel[idx[:, None] - idx[None, :] + y.size - 1] @ phi
    else:
        out = np.zeros(x.size, dtype=np.complex128)
        for shift in images:
            sep = x[:, None] - y[None, :] - shift
            out += np.exp(1j * alpha * sep**2) @ phi
    return norm * h * out


def propagate_talbot(partial_wave: WavePacket, t_over_T, config: PropagatorConfig,
                     form: str = "spectral", x_grid=None) -> WavePacket:
    """Propagate one period's partial wave through the Talbot propagator.

    ``form='direct'`` integrates the Fresnel image sum by the midpoint rule on
    the partial wave's grid; ``form='spectral'`` uses the Fourier series with
    quadratic phases.  ``x_grid`` defaults to the partial wave's grid.
    """
    x = partial_wave.x if x_grid is None else np.asarray(x_grid, dtype=float)
    if form == "spectral":
        psi = _talbot_spectral(partial_wave, t_over_T, config, x)
    elif form == "direct":
        _period_check(partial_wave, config)
        psi = _talbot_direct(partial_wave, t_over_T, config, x)
    else:
        raise DomainError(f"form must be 'direct' or 'spectral', got {form!r}")
    return WavePacket(x=x, psi=psi)


def carpet_grid(packet: WavePacket, config: PropagatorConfig, t_values: Sequence,
                x_grid=None, max_terms: int = CARPET_MAX_TERMS) -> WavePacketGrid:
    """Density ``|psi(x, t)|^2`` for each ``t/T`` in ``t_values``.

    For a box ``packet`` is the initial wave on ``[0, L]``; for a Talbot
    geometry it is the partial wave of one period.
    """
    x = packet.x if x_grid is None else np.asarray(x_grid, dtype=float)
    if x.size < 16:
        raise DomainError(f"carpet needs at least 16 positions, got {x.size}")
    t_values = list(t_values)
    if not t_values:
        raise DomainError("carpet needs at least one time")
    cost = x.size * len(t_values) * (2 * config.mode_cutoff + 1)
    if cost > max_terms:
        raise ResourceError(f"carpet needs {cost:.3g} term evaluations, budget is {max_terms:.3g}")
    if config.geometry == "box":
        coeffs = box_expand(packet, config)
        rows = [propagate_box(coeffs, t, config, x).density for t in t_values]
    else:
        rows = [propagate_talbot(packet, t, config, "spectral", x).density for t in t_values]
    t_grid = np.array([float(t) for t in t_values]) * config.talbot_time
    return WavePacketGrid(x_grid=x, t_grid=t_grid, density=np.array(rows))


def fidelity(a: WavePacket, b: WavePacket) -> float:
    """``|<a|b>| / (||a|| ||b||)`` on a shared grid."""
    overlap = np.vdot(a.psi, b.psi)
    return float(abs(overlap) / math.sqrt(np.vdot(a.psi, a.psi).real * np.vdot(b.psi, b.psi).real))
