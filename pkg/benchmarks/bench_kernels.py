"""Time the compiled and pure-numpy kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--pairs N] [--repeats R]

Each kernel is called once untimed first, so numba compilation (or a cache
load) is not counted. The reported figure is the best of ``R`` runs. The
script also checks that both paths produce the same numbers.
"""

import argparse
import time

import numpy as np

from pairslit import kernels
from pairslit.detection import DetectorWindow, count_arrays
from pairslit.ensembles import EnsembleSpec, sample_gibbs_batch, sample_symmetric_batch
from pairslit.trajectories import integrate_batch, transit_time
from pairslit.wavefield import SlitGeometry, WaveParams, make_wave_vectors


def _counts(c):
    return np.array([c.coincidences, c.singles_P, c.singles_Q])


def best_of(fn, repeats):
    fn()
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=100_000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args(argv)
    n = args.pairs

    geom = SlitGeometry(1.0, 20.0, 20.0, 200.0)
    p = WaveParams(make_wave_vectors(geom), "bose")
    L = p.fringe_spacing
    sym = EnsembleSpec("time_symmetric", n, 1, launch_spacing=2 * transit_time(p, geom))
    gib = EnsembleSpec("gibbs", n, 2)
    init = sample_gibbs_batch(gib, p, geom.launch_y)
    P = DetectorWindow(0.2 * L, 0.1 * L, "P")
    Q = DetectorWindow(-0.6 * L, 0.1 * L, "Q")
    x_screen = integrate_batch(init.x1, init.x2, init.t0, p, geom)

    cases = [
        ("sample symmetric",
         lambda k: lambda: sample_symmetric_batch(sym, p, kernel=k).x1,
         kernels._sample_symmetric_nb, kernels._sample_symmetric_np),
        ("sample gibbs",
         lambda k: lambda: sample_gibbs_batch(gib, p, kernel=k).x1,
         kernels._sample_gibbs_nb, kernels._sample_gibbs_np),
        ("integrate RK4",
         lambda k: lambda: integrate_batch(init.x1, init.x2, init.t0, p, geom, kernel=k).x1,
         kernels._integrate_nb, kernels._integrate_np),
        ("count coincidences",
         lambda k: lambda: _counts(count_arrays(x_screen.x1, x_screen.x2, P, Q, kernel=k)),
         kernels._count_nb, kernels._count_np),
    ]

    print(f"pairs = {n}, best of {args.repeats}")
    print(f"{'kernel':<20} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8}  agree")
    for name, make, nb, npy in cases:
        t_nb, out_nb = best_of(make(nb), args.repeats)
        t_np, out_np = best_of(make(npy), args.repeats)
        agree = np.allclose(out_nb, out_np, rtol=1e-12, atol=0.0)
        print(f"{name:<20} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>8.1f}  {agree}")


if __name__ == "__main__":
    main()
