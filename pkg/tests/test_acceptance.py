"""Exit criteria, one test each. Every result is also listed in the terminal summary."""

import math
import time

import numpy as np
import pytest
from scipy import stats

from conftest import ACCEPTANCE_LINES
from oracles import difference_pdf, symmetric_pdf, tabulated_cdf
from pairslit import kernels
from pairslit.cli import run_scenario
from pairslit.config import parse_config
from pairslit.detection import (
    DetectorWindow,
    sqt_joint_probability,
    sqt_joint_probability_closed_form,
)
from pairslit.ensembles import EnsembleSpec, sample_gibbs_batch, sample_symmetric_batch
from pairslit.trajectories import integrate_batch
from pairslit.wavefield import psi, velocity

pytestmark = pytest.mark.acceptance


def record(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_c1_symmetry_constraint_conservation(geom, bose, L):
    rng = np.random.default_rng(101)
    n = 10_000
    x1 = rng.uniform(-3 * L, 3 * L, n)
    x2 = rng.uniform(-3 * L, 3 * L, n)
    f = bose.field_array()
    bad = kernels._is_node(x1, 0.0, x2, 0.0, f)
    x1[bad] += 1e-3 * L
    start = time.perf_counter()
    res = integrate_batch(x1, x2, 0.0, bose, geom)
    elapsed = time.perf_counter() - start
    worst = float(res.drift.max()) / L
    record(1, worst < 1e-9 and elapsed < 10.0,
           f"max |x1+x2 - (x1_0+x2_0)| = {worst:.3g} L (< 1e-9 L), {elapsed:.2f} s (< 10 s)")


def test_c2_null_coincidences_for_asymmetric_detectors():
    start = time.perf_counter()
    cfg = parse_config("", {"n_pairs": "100000"}, preset="dbb-time-asymmetric")
    result = run_scenario(cfg, write=False)
    elapsed = time.perf_counter() - start
    r = result.report
    L = cfg.fringe_spacing
    P, Q = cfg.detector_p, cfg.detector_q
    windows_ok = (P.x_lo == pytest.approx(0.2 * L) and P.x_hi == pytest.approx(0.3 * L)
                  and Q.x_lo == pytest.approx(-0.6 * L) and Q.x_hi == pytest.approx(-0.5 * L))
    ok = (windows_ok and r.n_pairs == 100_000 and r.coincidences == 0 and r.p_sqt > 0
          and r.verdict == "CONFLICT" and elapsed < 60.0)
    record(2, ok, f"coincidences = {r.coincidences}, SQT oracle = {r.p_sqt:.4g} > 0, "
                  f"z = {r.z_score:.1f} -> {r.verdict}, {elapsed:.1f} s (< 60 s)")


GIBBS_WINDOWS = [
    (0.2, 0.1, -0.6, 0.1),
    (0.0, 0.25, -1.5, 0.25),
    (1.0, 0.4, 2.0, 0.3),
    (-0.3, 0.6, 0.5, 0.5),
    (0.4, 0.2, -0.6, 0.2),
]


def test_c3_gibbs_ensemble_matches_born_rule():
    base = parse_config("", preset="dbb-gibbs-asymmetric").ensemble.seed
    passes = []
    details = []
    slowest = 0.0
    for i, (plo, pw, qlo, qw) in enumerate(GIBBS_WINDOWS):
        overrides = {"n_pairs": "100000", "seed": str(base + i), "det_p_lo": str(plo),
                     "det_p_width": str(pw), "det_q_lo": str(qlo), "det_q_width": str(qw)}
        start = time.perf_counter()
        r = run_scenario(parse_config("", overrides, preset="dbb-gibbs-asymmetric"), write=False).report
        slowest = max(slowest, time.perf_counter() - start)
        within = abs(r.p_dbb - r.p_sqt) < 3 * r.p_dbb_stderr
        passes.append(within)
        details.append(f"{r.z_score:+.2f}")
    ok = sum(passes) >= 4 and slowest < 60.0
    record(3, ok, f"{sum(passes)}/5 window configurations within 3 SE (z = {', '.join(details)}), "
                  f"slowest {slowest:.1f} s (< 60 s)")


def test_c4_mirror_windows_match_symmetric_line():
    cfg = parse_config("", {"n_pairs": "100000"}, preset="dbb-time-symmetric")
    r = run_scenario(cfg, write=False).report
    L = cfg.fringe_spacing
    P = cfg.detector_p
    # independent oracle: closed-form integral of 1 + cos(4 pi x / L)
    k2 = 4 * math.pi / L

    def F(x):
        return x + math.sin(k2 * x) / k2
    W = cfg.sample_half_width
    oracle = 2 * (F(P.x_hi) - F(P.x_lo)) / (F(W) - F(-W))
    ok = (r.comparison_target == "symmetric_line"
          and abs(r.p_symmetric_line - oracle) < 1e-12
          and abs(r.p_dbb - r.p_symmetric_line) < 3 * r.p_dbb_stderr)
    record(4, ok, f"rate {r.p_dbb:.5f} vs line quadrature {r.p_symmetric_line:.5f} "
                  f"(|diff| = {abs(r.p_dbb - r.p_symmetric_line) / r.p_dbb_stderr:.2f} SE < 3)")


def test_c5_oracle_closed_form_vs_quadrature(bose, L):
    rng = np.random.default_rng(505)
    worst = 0.0
    done = 0
    start = time.perf_counter()
    while done < 20:
        a = rng.uniform(-3, 3, 2)
        w = rng.uniform(0.01, 1.0, 2)
        P = DetectorWindow(a[0] * L, w[0] * L, "P")
        Q = DetectorWindow(a[1] * L, w[1] * L, "Q")
        if P.overlaps(Q) or max(P.x_hi, Q.x_hi) > 3 * L:
            continue
        q = sqt_joint_probability(bose, P, Q, 3 * L)
        c = sqt_joint_probability_closed_form(bose, P, Q, 3 * L)
        worst = max(worst, abs(q - c) / abs(c))
        done += 1
    elapsed = time.perf_counter() - start
    record(5, worst < 1e-9 and elapsed < 1.0,
           f"max relative difference {worst:.2g} (< 1e-9) over 20 window pairs, {elapsed:.3f} s (< 1 s)")


def _fd_velocity(p, r1, r2, h):
    def grad(which):
        out = np.zeros(2)
        for axis in range(2):
            e = np.zeros(2)
            e[axis] = h
            if which == 0:
                up, dn = psi(p, r1 + e, r2), psi(p, r1 - e, r2)
            else:
                up, dn = psi(p, r1, r2 + e), psi(p, r1, r2 - e)
            out[axis] = np.angle(up / dn) / (2 * h)
        return out
    return p.hbar / p.mass * grad(0), p.hbar / p.mass * grad(1)


def test_c6_velocity_field_against_finite_differences(geom, bose_env, L):
    from pairslit.wavefield import WaveParams
    mb_env = WaveParams(bose_env.vectors, "mb", envelope_sigma=bose_env.envelope_sigma)
    rng = np.random.default_rng(606)
    h = 1e-6 * geom.wavelength
    worst = {"bose": 0.0, "mb": 0.0}
    worst_sum = 0.0
    for name, p in (("bose", bose_env), ("mb", mb_env)):
        done = 0
        while done < 1000:
            r1 = np.array([rng.uniform(-3 * L, 3 * L), rng.uniform(geom.launch_y, geom.screen_distance)])
            r2 = np.array([rng.uniform(-3 * L, 3 * L), rng.uniform(geom.launch_y, geom.screen_distance)])
            if p.bose and 1 + math.cos(p.vectors.k @ (r1 - r2)) < 1e-6:
                continue
            v1, v2 = velocity(p, r1, r2)
            f1, f2 = _fd_velocity(p, r1, r2, h)
            scale = max(np.linalg.norm(v1), np.linalg.norm(v2))
            worst[name] = max(worst[name], np.linalg.norm(f1 - v1) / scale, np.linalg.norm(f2 - v2) / scale)
            if p.bose:
                worst_sum = max(worst_sum, abs(v1[0] + v2[0]))
            done += 1
    ok = worst["bose"] < 1e-5 and worst["mb"] < 1e-5 and worst_sum < 1e-12
    record(6, ok, f"finite-difference mismatch bose {worst['bose']:.2g}, mb {worst['mb']:.2g} (< 1e-5); "
                  f"max |v1x + v2x| = {worst_sum:.2g} (< 1e-12)")


def test_c7_bose_pairs_never_cross_mb_pairs_do(geom, bose):
    spec = EnsembleSpec("time_symmetric", 10_000, 707, launch_spacing=1.0)
    init = sample_symmetric_batch(spec, bose, y0=geom.launch_y)
    res = integrate_batch(init.x1, init.x2, init.t0, bose, geom, record=True)
    flips = 0
    for i in range(init.x1.size):
        xs = res.samples[i, : res.n_samples[i], 1]
        flips += bool(np.any(np.sign(xs) != np.sign(init.x1[i])))
    flips += int(np.count_nonzero(np.sign(res.x1) != np.sign(init.x1)))
    doc = run_scenario(parse_config("", preset="mb-crossing-demo"), write=False).document
    crossings = doc["trajectories"]["pairs_crossing_axis"]
    record(7, flips == 0 and crossings >= 1,
           f"bose sign changes of x1 = {flips} over 10^4 pairs; mb-crossing-demo pairs crossing x=0 = {crossings}")


def test_c8_sampler_fidelity(bose, L):
    n = 100_000
    crit = stats.kstwo.ppf(0.99, n)
    W = 3 * L
    kappa = 2 * math.pi / L
    s = sample_symmetric_batch(EnsembleSpec("time_symmetric", n, 808, launch_spacing=1.0), bose).x1
    d_sym = stats.kstest(s, tabulated_cdf(symmetric_pdf(kappa), -W, W)).statistic
    g = sample_gibbs_batch(EnsembleSpec("gibbs", n, 809), bose)
    d_gibbs = stats.kstest(g.x1 - g.x2, tabulated_cdf(difference_pdf(kappa, W), -2 * W, 2 * W)).statistic
    record(8, d_sym < crit and d_gibbs < crit,
           f"KS distance symmetric {d_sym:.5f}, gibbs {d_gibbs:.5f} (1% critical value {crit:.5f})")


def test_c9_determinism(tmp_path):
    from pairslit.config import PRESETS
    same = []
    for name in PRESETS:
        blobs = []
        for run in range(2):
            out = tmp_path / f"{name}-{run}"
            run_scenario(parse_config("", preset=name, output_dir=out))
            blobs.append((out / "report.json").read_bytes())
        same.append(blobs[0] == blobs[1])
    record(9, all(same), f"byte-identical report.json for {sum(same)}/{len(same)} presets")
