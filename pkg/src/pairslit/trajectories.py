"""Fixed-step RK4 integration of pair trajectories from the launch line to the screen."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .wavefield import NodeError, SlitGeometry, WaveParams, longitudinal_speed


class StallError(RuntimeError):
    pass


@dataclass(frozen=True)
class PairInitial:
    x1: float
    x2: float
    t0: float
    y0: float


@dataclass(frozen=True)
class ArrivalEvent:
    t: float
    x1: float
    x2: float
    pair_id: int


@dataclass(frozen=True)
class PairTrajectory:
    samples: np.ndarray  # rows of (t, x1, y1, x2, y2)
    arrival: tuple[float, float, float]
    arrival_times: tuple[float, float]
    symmetry_drift: float
    crossed_axis: bool
    pair_id: int = 0


@dataclass(frozen=True)
class IntegratorConfig:
    step_fraction: float = 0.01
    step: float | None = None

    def step_for(self, p: WaveParams, geom: SlitGeometry) -> float:
        if self.step is not None:
            if not self.step > 0:
                raise ValueError("step must be positive")
            return float(self.step)
        if not self.step_fraction > 0:
            raise ValueError("step_fraction must be positive")
        return self.step_fraction * transit_time(p, geom)


def transit_time(p: WaveParams, geom: SlitGeometry) -> float:
    return (geom.screen_distance - geom.launch_y) / longitudinal_speed(p)


@dataclass
class BatchResult:
    t1: np.ndarray
    x1: np.ndarray
    t2: np.ndarray
    x2: np.ndarray
    drift: np.ndarray
    crossed: np.ndarray
    status: np.ndarray
    samples: np.ndarray | None = None
    n_samples: np.ndarray | None = None

    @property
    def arrival_time(self) -> np.ndarray:
        return np.maximum(self.t1, self.t2)

    def events(self, first_id: int = 0) -> list[ArrivalEvent]:
        t = self.arrival_time
        return [ArrivalEvent(float(t[i]), float(self.x1[i]), float(self.x2[i]), first_id + i)
                for i in range(t.size)]


def integrate_batch(x1, x2, t0, p: WaveParams, geom: SlitGeometry,
                    cfg: IntegratorConfig = IntegratorConfig(), record: bool = False,
                    kernel=None) -> BatchResult:
    """Integrate many pairs launched on ``y = launch_y``.

    ``kernel`` overrides the dispatched integrator (used by the benchmark and
    the cross-path tests). Raises :class:`NodeError` or :class:`StallError`
    if any pair fails.
    """
    x1 = np.ascontiguousarray(x1, dtype=float)
    x2 = np.ascontiguousarray(x2, dtype=float)
    t0 = np.ascontiguousarray(np.broadcast_to(np.asarray(t0, dtype=float), x1.shape))
    n = x1.size
    h = cfg.step_for(p, geom)
    span = geom.screen_distance - geom.launch_y
    max_steps = 2 * math.ceil(span / (h * longitudinal_speed(p))) + 10
    y = np.full(n, float(geom.launch_y))
    if record:
        samples = np.full((n, max_steps + 1, 5), np.nan)
    else:
        samples = np.empty((0, 0, 5))
    out = BatchResult(
        t1=np.empty(n), x1=np.empty(n), t2=np.empty(n), x2=np.empty(n),
        drift=np.empty(n), crossed=np.zeros(n, dtype=np.bool_),
        status=np.empty(n, dtype=np.int8),
        samples=samples if record else None,
        n_samples=np.empty(n, dtype=np.int64),
    )
    kernel = kernel or kernels.integrate_kernel
    kernel(x1, y, x2, y.copy(), t0, h, float(geom.screen_distance), p.field_array(), max_steps,
           record, samples, out.n_samples, out.t1, out.x1, out.t2, out.x2, out.drift,
           out.crossed, out.status)
    bad = np.flatnonzero(out.status != kernels.STATUS_OK)
    if bad.size:
        i = int(bad[0])
        if out.status[i] == kernels.STATUS_NODE:
            raise NodeError(f"pair {i} ran into a node of the wavefunction")
        raise StallError(f"pair {i} did not reach the screen within {max_steps} steps")
    return out


def integrate_pair(init: PairInitial, p: WaveParams, geom: SlitGeometry,
                   cfg: IntegratorConfig = IntegratorConfig(), pair_id: int = 0) -> PairTrajectory:
    if not init.y0 == geom.launch_y:
        geom = SlitGeometry(geom.wavelength, geom.slit_separation, geom.slit_width,
                            geom.screen_distance, init.y0)
    if kernels._is_node(init.x1, init.y0, init.x2, init.y0, p.field_array()):
        raise NodeError("initial positions sit on a node")
    res = integrate_batch([init.x1], [init.x2], [init.t0], p, geom, cfg, record=True)
    samples = res.samples[0, : res.n_samples[0]].copy()
    return PairTrajectory(
        samples=samples,
        arrival=(float(res.arrival_time[0]), float(res.x1[0]), float(res.x2[0])),
        arrival_times=(float(res.t1[0]), float(res.t2[0])),
        symmetry_drift=float(res.drift[0]),
        crossed_axis=bool(res.crossed[0]),
        pair_id=pair_id,
    )


def screen_arrivals(traj: PairTrajectory) -> ArrivalEvent:
    t, x1, x2 = traj.arrival
    return ArrivalEvent(t, x1, x2, traj.pair_id)


def check_symmetry_invariant(traj: PairTrajectory) -> float:
    return traj.symmetry_drift
