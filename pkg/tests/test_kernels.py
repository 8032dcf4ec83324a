"""Compiled and numpy paths must agree; the counter stream must behave."""

import numpy as np
import pytest

from pairslit import kernels
from pairslit.detection import DetectorWindow, count_arrays
from pairslit.ensembles import EnsembleSpec, rng_substream, sample_gibbs_batch, sample_symmetric_batch
from pairslit.trajectories import integrate_batch


def test_stream_is_deterministic():
    a = rng_substream(42, 7).random(1000)
    b = rng_substream(42, 7).random(1000)
    np.testing.assert_array_equal(a, b)


def test_stream_is_a_pure_function_of_counter():
    s = rng_substream(5, 3)
    first = s.random(10)
    second = s.random(10)
    np.testing.assert_array_equal(np.concatenate([first, second]), s.uniform(0, 20))


def test_neighbouring_streams_uncorrelated():
    # sample correlation of independent streams has sd 1/sqrt(n) = 0.01
    n = 10_000
    a = rng_substream(123, 0).random(n)
    b = rng_substream(123, 1).random(n)
    assert abs(np.corrcoef(a, b)[0, 1]) < 4 / np.sqrt(n)


def test_stream_correlation_spread_is_ideal():
    n = 10_000
    r = np.array([np.corrcoef(rng_substream(7, i).random(n), rng_substream(7, i + 1).random(n))[0, 1]
                  for i in range(400)])
    assert r.std() == pytest.approx(1 / np.sqrt(n), rel=0.1)
    assert abs(r.mean()) < 4 / np.sqrt(n * r.size)


def test_seeds_give_different_streams():
    assert rng_substream(1, 0).random(1)[0] != rng_substream(2, 0).random(1)[0]


def test_uniform_range_and_moments():
    u = rng_substream(9, 9).random(200_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert u.mean() == pytest.approx(0.5, abs=0.005)
    assert u.var() == pytest.approx(1 / 12, abs=0.002)


def test_compiled_rng_matches_numpy():
    key_np = kernels._stream_key(np.uint64(77), np.array([3], dtype=np.uint64))[0]
    key_nb = kernels._stream_key_nb(np.uint64(77), np.uint64(3))
    assert key_np == key_nb
    with np.errstate(over="ignore"):
        u_np = kernels._uniform(np.array([key_np]), np.uint64(11))[0]
    assert u_np == kernels._uniform_nb(np.uint64(key_nb), np.uint64(11))


def test_samplers_agree_across_paths(bose, L):
    spec = EnsembleSpec("time_symmetric", 20_000, 31, launch_spacing=1.0)
    a = sample_symmetric_batch(spec, bose, kernel=kernels._sample_symmetric_nb)
    b = sample_symmetric_batch(spec, bose, kernel=kernels._sample_symmetric_np)
    np.testing.assert_array_equal(a.x1, b.x1)
    spec = EnsembleSpec("gibbs", 20_000, 31)
    a = sample_gibbs_batch(spec, bose, kernel=kernels._sample_gibbs_nb)
    b = sample_gibbs_batch(spec, bose, kernel=kernels._sample_gibbs_np)
    np.testing.assert_array_equal(a.x1, b.x1)
    np.testing.assert_array_equal(a.x2, b.x2)


@pytest.mark.parametrize("params", ["bose", "mb", "bose_env"])
def test_integrators_agree_across_paths(request, geom, params):
    p = request.getfixturevalue(params)
    rng = np.random.default_rng(4)
    x1, x2 = rng.uniform(-30, 30, 2_000), rng.uniform(-30, 30, 2_000)
    t0 = rng.uniform(0, 5, 2_000)
    a = integrate_batch(x1, x2, t0, p, geom, record=True, kernel=kernels._integrate_nb)
    b = integrate_batch(x1, x2, t0, p, geom, record=True, kernel=kernels._integrate_np)
    for name in ("t1", "x1", "t2", "x2", "drift", "crossed", "n_samples"):
        np.testing.assert_allclose(getattr(a, name), getattr(b, name), rtol=1e-13, atol=1e-12)
    np.testing.assert_allclose(a.samples, b.samples, rtol=1e-13, atol=1e-12)


def test_counting_agrees_across_paths():
    rng = np.random.default_rng(5)
    x1, x2 = rng.uniform(-3, 3, 50_000), rng.uniform(-3, 3, 50_000)
    P, Q = DetectorWindow(0.1, 0.5, "P"), DetectorWindow(-1.0, 0.3, "Q")
    assert count_arrays(x1, x2, P, Q, kernel=kernels._count_nb) == \
        count_arrays(x1, x2, P, Q, kernel=kernels._count_np)


def test_sampler_reports_failure(bose):
    out = np.empty(3)
    f = bose.field_array()
    # an impossible bound forces every candidate to be rejected
    assert kernels._sample_symmetric_nb(np.uint64(1), 3, 1.0, f, 1e300, 5, out) == 0
    assert kernels._sample_symmetric_np(np.uint64(1), 3, 1.0, f, 1e300, 5, out) == 0
