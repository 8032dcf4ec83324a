"""Launch conditions for the time ensemble of mirror-symmetric pairs and the Gibbs ensemble.

Every pair draws from its own counter-based stream keyed by ``(seed,
pair_id)``, so a pair's initial condition does not depend on how many other
pairs are generated or in which order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .trajectories import PairInitial
from .wavefield import WaveParams

MAX_ATTEMPTS = 1_000_000


class EnsembleKind(enum.Enum):
    TIME_SYMMETRIC = "time_symmetric"
    GIBBS = "gibbs"


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble recipe. ``sample_window`` is a half-width in fringe spacings."""

    kind: EnsembleKind
    n_pairs: int
    seed: int
    launch_spacing: float | None = None
    sample_window: float = 3.0

    def __post_init__(self):
        if not isinstance(self.kind, EnsembleKind):
            object.__setattr__(self, "kind", EnsembleKind(self.kind))
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.kind is EnsembleKind.TIME_SYMMETRIC:
            if self.launch_spacing is None or not self.launch_spacing > 0:
                raise ValueError("launch_spacing must be positive for a time ensemble")
        if not self.sample_window > 0:
            raise ValueError("sample_window must be positive")


class CounterStream:
    """Deterministic uniform stream for one ``(seed, pair_id)``.

    Draw ``j`` is a pure function of ``(seed, pair_id, j)``; the samplers
    consume exactly these values.
    """

    def __init__(self, seed: int, pair_id: int):
        self.seed = seed
        self.pair_id = pair_id
        with np.errstate(over="ignore"):
            self._key = kernels._stream_key(np.uint64(seed), np.array([pair_id], dtype=np.uint64))
        self._pos = 0

    def uniform(self, start: int, count: int) -> np.ndarray:
        counters = np.arange(start, start + count, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return kernels._uniform(self._key, counters)

    def random(self, count: int) -> np.ndarray:
        out = self.uniform(self._pos, count)
        self._pos += count
        return out


def rng_substream(seed: int, pair_id: int) -> CounterStream:
    return CounterStream(seed, pair_id)


@dataclass(frozen=True)
class InitialBatch:
    """Column form of a list of :class:`PairInitial` (what the kernels consume)."""

    x1: np.ndarray
    x2: np.ndarray
    t0: np.ndarray
    y0: float

    def __len__(self):
        return self.x1.size

    def as_list(self) -> list[PairInitial]:
        return [PairInitial(float(a), float(b), float(t), self.y0)
                for a, b, t in zip(self.x1, self.x2, self.t0)]


def _half_width(spec: EnsembleSpec, p: WaveParams) -> float:
    return spec.sample_window * p.fringe_spacing


def sample_symmetric_batch(spec: EnsembleSpec, p: WaveParams, y0: float = 0.0,
                           kernel=None) -> InitialBatch:
    if spec.kind is not EnsembleKind.TIME_SYMMETRIC:
        raise ValueError("sample_symmetric needs an EnsembleSpec of kind time_symmetric")
    if not p.bose:
        raise ValueError("the mirror-symmetric ensemble is defined for Bose statistics only")
    n = spec.n_pairs
    x = np.empty(n)
    kernel = kernel or kernels.sample_symmetric_kernel
    failed = kernel(np.uint64(spec.seed), n, _half_width(spec, p), p.field_array(), p.density_bound(),
                    MAX_ATTEMPTS, x)
    if failed >= 0:
        raise SamplingError(f"rejection sampling failed for pair {failed}")
    t0 = spec.launch_spacing * np.arange(1, n + 1, dtype=float)
    return InitialBatch(x, -x, t0, y0)


def sample_gibbs_batch(spec: EnsembleSpec, p: WaveParams, y0: float = 0.0,
                       kernel=None) -> InitialBatch:
    if spec.kind is not EnsembleKind.GIBBS:
        raise ValueError("sample_gibbs needs an EnsembleSpec of kind gibbs")
    n = spec.n_pairs
    x1 = np.empty(n)
    x2 = np.empty(n)
    kernel = kernel or kernels.sample_gibbs_kernel
    failed = kernel(np.uint64(spec.seed), n, _half_width(spec, p), p.field_array(), p.density_bound(),
                    MAX_ATTEMPTS, x1, x2)
    if failed >= 0:
        raise SamplingError(f"rejection sampling failed for pair {failed}")
    return InitialBatch(x1, x2, np.zeros(n), y0)


def sample_symmetric(spec: EnsembleSpec, p: WaveParams, y0: float = 0.0) -> list[PairInitial]:
    return sample_symmetric_batch(spec, p, y0).as_list()


def sample_gibbs(spec: EnsembleSpec, p: WaveParams, y0: float = 0.0) -> list[PairInitial]:
    return sample_gibbs_batch(spec, p, y0).as_list()


def sample_batch(spec: EnsembleSpec, p: WaveParams, y0: float = 0.0) -> InitialBatch:
    if spec.kind is EnsembleKind.TIME_SYMMETRIC:
        return sample_symmetric_batch(spec, p, y0)
    return sample_gibbs_batch(spec, p, y0)
