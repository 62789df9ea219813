"""Factorization by interference of quadratic phases.

Two detectors estimate ``gcd(ell, N)`` from a physical signal:

* revival: ``N |S_N(ell)|^2`` at integer multiples of the classical period;
* curlicue: ``|s_N(n)|^2 / N`` from the curlicue sum.

Flagged ``ell`` are turned into divisors with ``gcd`` and confirmed by exact
division; the scan then recurses on the cofactor.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ResourceError
from .phase import CURLICUE_MAX_TERMS, curlicue_values
from .revivals import RevivalParams, autocorrelation

log = logging.getLogger(__name__)

#: default width factor: delta_n = AUTO_WIDTH * N / (2 pi)
AUTO_WIDTH = 3.0
#: default budget of (sample x term) evaluations for one revival scan
SCAN_MAX_TERMS = 10**9
DEFAULT_THRESHOLD = 1.5

METHODS = ("revival", "curlicue", "trial_division")


@dataclass(frozen=True)
class ScanRecord:
    """Autocorrelation around one integer time ``ell`` of the number ``N``."""

    ell: int
    N: int
    center_value: float
    window: tuple[tuple[float, float], ...] = ()
    flagged: bool = False

    @property
    def score(self) -> float:
        return self.N * self.center_value


@dataclass
class FactorReport:
    N: int
    method: str
    candidates: list[tuple[int, float]] = field(default_factory=list)
    confirmed_factors: list[int] = field(default_factory=list)
    complete: bool = False
    scan: list[ScanRecord] = field(default_factory=list)
    cofactor: int = 1

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "method": self.method,
            "candidates": [[int(ell), float(score)] for ell, score in self.candidates],
            "confirmed_factors": sorted(int(f) for f in self.confirmed_factors),
            "complete": self.complete,
            "cofactor": self.cofactor,
            "scan": [
                {
                    "ell": rec.ell,
                    "N": rec.N,
                    "center_value": rec.center_value,
                    "window": [list(p) for p in rec.window],
                    "flagged": rec.flagged,
                }
                for rec in self.scan
            ],
        }


def trial_division(N: int) -> list[int]:
    """Prime factors of ``N`` with multiplicity, ascending."""
    if N < 2:
        raise DomainError(f"N must be at least 2, got {N}")
    factors = []
    n = N
    while n % 2 == 0:
        factors.append(2)
        n //= 2
    p = 3
    while p * p <= n:
        while n % p == 0:
            factors.append(p)
            n //= p
        p += 2
    if n > 1:
        factors.append(n)
    return factors


def auto_delta_n(N: int) -> float:
    return AUTO_WIDTH * N / (2 * math.pi)


def _map(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def scan_revival(N: int, delta_n: float | None, ell_range: Sequence[int],
                 window_halfwidth: float = 0.4, samples_per_window: int = 1,
                 threshold_ratio: float = DEFAULT_THRESHOLD, threads: int = 1,
                 max_terms: int = SCAN_MAX_TERMS) -> list[ScanRecord]:
    """Sample ``|S_N(ell + dtau)|^2`` on a window around each ``ell``.

    ``delta_n=None`` selects :func:`auto_delta_n`.  Records come back in the
    order of ``ell_range`` whatever the thread count.
    """
    if samples_per_window < 1 or samples_per_window % 2 == 0:
        raise DomainError(f"samples_per_window must be odd, got {samples_per_window}")
    ells = [int(ell) for ell in ell_range]
    if any(ell < 2 or ell > N for ell in ells):
        raise DomainError(f"ell values must lie in [2, {N}]")
    params = RevivalParams.gaussian(N, auto_delta_n(N) if delta_n is None else delta_n)
    terms = len(ells) * samples_per_window * params.weight.weights.size
    if terms > max_terms:
        raise ResourceError(f"revival scan needs {terms:.3g} term evaluations, budget is {max_terms:.3g}")
    offsets = np.linspace(-window_halfwidth, window_halfwidth, samples_per_window)
    center = samples_per_window // 2
    offsets[center] = 0.0

    def one(ell: int) -> ScanRecord:
        values = [abs(autocorrelation(params, ell + float(d))) ** 2 for d in offsets]
        window = tuple((float(d), float(v)) for d, v in zip(offsets, values))
        c = float(values[center])
        return ScanRecord(ell=ell, N=N, center_value=c, window=window,
                          flagged=N * c >= threshold_ratio)

    return _map(one, ells, threads)


def detect_candidates(scan: Sequence[ScanRecord],
                      threshold_ratio: float = DEFAULT_THRESHOLD) -> list[tuple[int, float]]:
    """``(ell, N * center_value)`` for every record whose score reaches the threshold."""
    return [(rec.ell, rec.score) for rec in scan if rec.score >= threshold_ratio]


def minimal_periods(flagged: Sequence[int]) -> list[int]:
    """Drop every entry that is a multiple of a smaller entry."""
    kept: list[int] = []
    for n in sorted(set(flagged)):
        if not any(n % k == 0 for k in kept):
            kept.append(n)
    return kept


def curlicue_scores(N: int, ns, max_terms: int = CURLICUE_MAX_TERMS) -> np.ndarray:
    """``|s_N(n)|^2 / N``, an estimate of ``gcd(n, N)``."""
    return np.abs(curlicue_values(N, ns, max_terms=max_terms)) ** 2 / N


def curlicue_factor(N: int, threshold_ratio: float = DEFAULT_THRESHOLD,
                    ns=None) -> list[tuple[int, float]]:
    """Minimal periods ``n`` of the flagged curlicue magnitudes, with their scores.

    By default every ``n`` in ``1..N-1`` is examined.
    """
    if N < 3:
        raise DomainError(f"N must be at least 3, got {N}")
    ns = np.arange(1, N) if ns is None else np.asarray(ns, dtype=np.int64)
    scores = curlicue_scores(N, ns)
    flagged = {int(n): float(s) for n, s in zip(ns, scores) if s >= threshold_ratio}
    return [(n, flagged[n]) for n in minimal_periods(flagged)]


Detector = Callable[[int, range], tuple[list[tuple[int, float]], list[ScanRecord]]]


def revival_detector(delta_n: float | None = None, window_halfwidth: float = 0.4,
                     samples_per_window: int = 1, threshold_ratio: float = DEFAULT_THRESHOLD,
                     threads: int = 1, max_terms: int = SCAN_MAX_TERMS) -> Detector:
    """Detector scanning the autocorrelation of the number being factored.

    A fixed ``delta_n`` applies to the first stage only; cofactors use the
    automatic width, since their spectra differ.
    """
    first = [True]

    def detect(c: int, ells: range):
        width = delta_n if first[0] else None
        first[0] = False
        records = scan_revival(c, width, ells, window_halfwidth, samples_per_window,
                               threshold_ratio, threads, max_terms)
        return detect_candidates(records, threshold_ratio), records

    return detect


def curlicue_detector(threshold_ratio: float = DEFAULT_THRESHOLD) -> Detector:
    def detect(c: int, ells: range):
        if len(ells) == 0:
            return [], []
        scores = curlicue_scores(c, np.arange(ells.start, ells.stop))
        records = [ScanRecord(ell=int(n), N=c, center_value=float(s) / c,
                              flagged=bool(s >= threshold_ratio))
                   for n, s in zip(ells, scores)]
        flagged = {rec.ell: rec.score for rec in records if rec.flagged}
        return [(n, flagged[n]) for n in minimal_periods(flagged)], records

    return detect


def _scan_range(c: int, lmax: int | None) -> range:
    upper = math.isqrt(c - 1) + 1 if lmax is None else lmax  # ceil(sqrt(c))
    return range(2, min(upper, c - 1) + 1)


def confirm_and_recurse(candidates: Sequence[tuple[int, float]], N: int, detect: Detector,
                        method: str = "revival", lmax: int | None = None,
                        scan: Sequence[ScanRecord] = ()) -> FactorReport:
    """Turn candidates into confirmed prime factors, rescanning each cofactor.

    Powers of two are stripped arithmetically first.  A candidate ``ell``
    yields the divisor ``gcd(ell, c)`` of the current cofactor ``c``; proper
    divisors are refined to primes by applying the same procedure to them.
    When a scan covering ``[2, ceil(sqrt(c))]`` finds no divisor, ``c`` is
    taken as prime; a shorter scan (``lmax``) leaves it unfactored.
    """
    if N < 2:
        raise DomainError(f"N must be at least 2, got {N}")
    report = FactorReport(N=N, method=method, candidates=list(candidates), scan=list(scan))
    c = N
    while c % 2 == 0:
        report.confirmed_factors.append(2)
        c //= 2
    pending = list(candidates)
    fresh = False  # pending came from a scan of the current cofactor
    while c > 1:
        divisors = sorted({math.gcd(ell, c) for ell, _ in pending} - {1, c})
        if divisors:
            d = divisors[0]
            primes = _refine(d, detect, method, report)
            for p in primes:
                assert c % p == 0
                c //= p
            report.confirmed_factors.extend(primes)
            fresh = False
            continue
        if fresh:
            ells = _scan_range(c, lmax)
            if (ells.stop - 1) >= math.isqrt(c) or c < 4:
                report.confirmed_factors.append(c)
                c = 1
            break
        ells = _scan_range(c, lmax)
        pending, records = detect(c, ells)
        report.scan.extend(records)
        report.candidates.extend(pending)
        fresh = True
    report.cofactor = c
    report.confirmed_factors.sort()
    report.complete = c == 1
    return report


def _refine(d: int, detect: Detector, method: str, parent: FactorReport) -> list[int]:
    if d < 4:
        return [d]
    sub = confirm_and_recurse([], d, detect, method)
    parent.scan.extend(sub.scan)
    if sub.complete:
        return sub.confirmed_factors
    # an unrefined divisor still divides N; keep it whole
    return sub.confirmed_factors + [sub.cofactor]


def factorize(N: int, method: str = "revival", delta_n: float | None = None,
              window_halfwidth: float = 0.4, samples_per_window: int = 1,
              threshold_ratio: float = DEFAULT_THRESHOLD, lmax: int | None = None,
              threads: int = 1, max_terms: int = SCAN_MAX_TERMS) -> FactorReport:
    """Factor ``N`` with the chosen detector."""
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}")
    if N < 2:
        raise DomainError(f"N must be at least 2, got {N}")
    if method == "trial_division":
        factors = trial_division(N)
        return FactorReport(N=N, method=method, confirmed_factors=factors, complete=True)
    if method == "revival":
        detect = revival_detector(delta_n, window_halfwidth, samples_per_window,
                                  threshold_ratio, threads, max_terms)
    else:
        detect = curlicue_detector(threshold_ratio)
    report = confirm_and_recurse([], N, detect, method, lmax)
    log.debug("factorized %d -> %s (complete=%s)", N, report.confirmed_factors, report.complete)
    return report
