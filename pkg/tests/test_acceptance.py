"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import json
import math
import random
import time

import numpy as np
import pytest

from gaussfactor.cli import run
from gaussfactor.factoring import scan_revival, trial_division
from gaussfactor.phase import (ReducedFraction, curlicue_series, decompose_real_time,
                               gauss_sum_table)
from gaussfactor.propagators import (PropagatorConfig, box_green, box_via_talbot, fidelity,
                                     box_expand, box_grid, gaussian_packet, period_grid,
                                     propagate_box, propagate_talbot)
from gaussfactor.revivals import (RevivalParams, autocorrelation, decomposition_sum,
                                  shape_function_closed, shape_function_quadrature)

pytestmark = pytest.mark.acceptance


def central_local_max(rec) -> bool:
    values = [v for _, v in rec.window]
    c = len(values) // 2
    return values[c] > values[c - 1] and values[c] > values[c + 1]


def test_revival_scan_1309(verdict):
    start = time.perf_counter()
    ells = [2, 3, 5, 7, 11, 13, 17, 19]
    records = scan_revival(1309, 250, ells, window_halfwidth=0.4, samples_per_window=801)
    elapsed = time.perf_counter() - start
    peaked = {rec.ell for rec in records if central_local_max(rec)}
    scores = {rec.ell: rec.score for rec in records}
    factor_ok = all(abs(scores[f] - f) <= 0.25 * f for f in (7, 11, 17))
    floor_bad = {ell: round(s, 3) for ell, s in scores.items() if ell not in (7, 11, 17) and s > 1.5}
    checks = {
        "central maxima exactly {7,11,17}": peaked == {7, 11, 17},
        "factor scores within 25%": factor_ok,
        "non-factor scores <= 1.5": not floor_bad,
        "runtime <= 60 s": elapsed <= 60,
    }
    detail = "; ".join(f"{k}: {'ok' if v else 'no'}" for k, v in checks.items())
    detail += f"; central maxima {sorted(peaked)}; non-factors above 1.5 {floor_bad}"
    assert verdict("1 revival scan N=1309, dn=250", all(checks.values()), detail, elapsed)


def cli_factor(capsys, *argv):
    code = run(["factor", *argv])
    out, _ = capsys.readouterr()
    assert code == 0
    return json.loads(out)


def test_full_factorization(verdict, capsys):
    t0 = time.perf_counter()
    a = cli_factor(capsys, "1309")
    t1 = time.perf_counter()
    b = cli_factor(capsys, "21", "--method", "curlicue")
    t2 = time.perf_counter()
    ok = (a["confirmed_factors"] == [7, 11, 17] == trial_division(1309) and a["complete"]
          and b["confirmed_factors"] == [3, 7] == trial_division(21) and b["complete"]
          and t1 - t0 <= 60 and t2 - t1 <= 60)
    detail = (f"1309 -> {a['confirmed_factors']} in {t1 - t0:.2f} s; "
              f"21 -> {b['confirmed_factors']} in {t2 - t1:.2f} s")
    assert verdict("2 full factorization", ok, detail, t2 - t0)


def test_curlicue_structure_21(verdict):
    start = time.perf_counter()
    values = curlicue_series(21).values
    elapsed = time.perf_counter() - start
    imag = np.abs(values.imag)
    expected = {n for n in range(1, 21) if n % 3 == 0 or n % 7 == 0}
    large = {n for n in range(21) if imag[n] > 5}
    small_ok = all(imag[n] < 1e-6 for n in range(21) if n not in expected)
    ok = large == expected and small_ok and elapsed < 1
    detail = f"|Im| > 5 at {sorted(large)}; others below 1e-6: {small_ok}"
    assert verdict("3 curlicue imaginary structure N=21", ok, detail, elapsed)


def test_decomposition_identity(verdict):
    rng = random.Random(4)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        N = rng.randint(2, 500)
        params = RevivalParams.gaussian(N, rng.uniform(10, 100))
        t = rng.uniform(0, N)
        fraction, dt = decompose_real_time(t, N, rng.randint(1, 50))
        worst = max(worst, abs(decomposition_sum(params, fraction, dt) - autocorrelation(params, t)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed <= 120
    assert verdict("4 decomposition identity", ok, f"max error {worst:.2e}", elapsed)


def test_shape_function_oracle(verdict):
    rng = random.Random(8)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        N = rng.randint(2, 500)
        params = RevivalParams.gaussian(N, rng.uniform(10, 100))
        r = rng.randint(1, 50)
        q = rng.choice([q for q in range(r) if math.gcd(q, r) == 1] or [0])
        fraction = ReducedFraction(q, r, rng.uniform(-0.5, 0.5))
        dt = rng.uniform(-0.5, 0.5)
        m = round(r * dt) + rng.randint(-3, 3)
        closed = shape_function_closed(m, fraction, dt, params).amplitude
        worst = max(worst, abs(shape_function_quadrature(m, fraction, dt, params) - closed))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed <= 30
    assert verdict("5 shape-function oracle", ok, f"max error {worst:.2e}", elapsed)


def test_propagator_properties(verdict):
    start = time.perf_counter()
    talbot = PropagatorConfig.talbot(1.0, 256)
    rng = random.Random(12)
    poisson = 0.0
    for width in (1 / 20, 1 / 50):
        packet = gaussian_packet(period_grid(1.0, 512), 0.0, width)
        for t in [rng.uniform(0.05, 1) for _ in range(10)]:
            direct = propagate_talbot(packet, t, talbot, "direct").density
            spectral = propagate_talbot(packet, t, talbot, "spectral").density
            poisson = max(poisson, float(np.max(np.abs(direct - spectral))))

    packet = gaussian_packet(period_grid(1.0, 512), 0.0, 1 / 20)
    start_t = propagate_talbot(packet, 0, talbot)
    talbot_fid = fidelity(start_t, propagate_talbot(packet, 1, talbot))
    half = propagate_talbot(packet, 0.5, talbot).density
    shift = float(np.max(np.abs(half - np.roll(start_t.density, 256))))

    box = PropagatorConfig.box(1.0, 256)
    box_packet = gaussian_packet(box_grid(1.0, 4097), 0.5, 1 / 20)
    coeffs = box_expand(box_packet, box)
    box_fid = fidelity(propagate_box(coeffs, 0, box, box_packet.x),
                       propagate_box(coeffs, 1, box, box_packet.x))

    identity = 0.0
    for _ in range(50):
        x, y, t = rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0.01, 1)
        identity = max(identity, abs(box_via_talbot(y, x, t, box) - box_green(x, y, t, box)))
    elapsed = time.perf_counter() - start
    parts = {
        "a": poisson <= 1e-8,
        "b": min(talbot_fid, box_fid) >= 1 - 1e-10,
        "c": shift <= 1e-8,
        "d": identity <= 1e-8,
    }
    detail = (f"(a) {poisson:.1e} (b) 1-F talbot {1 - talbot_fid:.1e} box {1 - box_fid:.1e} "
              f"(c) {shift:.1e} (d) {identity:.1e}")
    ok = all(parts.values()) and elapsed <= 60
    assert verdict("6 propagator properties", ok, detail, elapsed)


def test_number_theory_laws(verdict):
    start = time.perf_counter()
    gauss_worst = 0.0
    for r in range(1, 200, 2):
        for q in range(r):
            if math.gcd(q, r) != 1:
                continue
            values = gauss_sum_table(r, q).values
            gauss_worst = max(gauss_worst, float(np.max(np.abs(np.abs(values) - r**-0.5))))
    rng = random.Random(16)
    curl_worst = 0.0
    for N in rng.sample(range(1, 2001, 2), 100):
        s = curlicue_series(N).values
        g = np.gcd(np.arange(N), N)
        curl_worst = max(curl_worst, float(np.max(np.abs(np.abs(s) - np.sqrt(N * g)))) / N)
    elapsed = time.perf_counter() - start
    ok = gauss_worst <= 1e-10 and curl_worst <= 1e-8 and elapsed <= 60
    detail = f"Gauss max dev {gauss_worst:.1e}; curlicue max dev/N {curl_worst:.1e}"
    assert verdict("7 Gauss and curlicue laws", ok, detail, elapsed)
