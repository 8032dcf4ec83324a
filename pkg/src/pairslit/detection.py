"""Detector windows, coincidence counting, the Born-rule joint-detection oracle, and z-tests."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .quadrature import integrate_1d, integrate_2d
from .trajectories import ArrivalEvent
from .wavefield import WaveParams, density

CONFLICT_Z = 5.0
CONSISTENT_Z = 2.0


class WindowError(ValueError):
    pass


@dataclass(frozen=True)
class DetectorWindow:
    """Half-open interval ``[x_lo, x_lo + width)`` on the screen."""

    x_lo: float
    width: float
    label: str = "P"

    def __post_init__(self):
        if not self.width > 0:
            raise WindowError(f"detector {self.label}: width must be positive")

    @property
    def x_hi(self) -> float:
        return self.x_lo + self.width

    def reflected(self) -> "DetectorWindow":
        return DetectorWindow(-self.x_hi, self.width, self.label)

    def overlaps(self, other: "DetectorWindow") -> bool:
        return self.x_lo < other.x_hi and other.x_lo < self.x_hi


def check_windows(P: DetectorWindow, Q: DetectorWindow) -> None:
    if P.overlaps(Q):
        raise WindowError("detector windows P and Q overlap")


def is_mirror_pair(P: DetectorWindow, Q: DetectorWindow, tol: float = 1e-12) -> bool:
    scale = max(abs(P.x_lo), abs(P.x_hi), P.width)
    return abs(P.x_lo + Q.x_hi) <= tol * scale and abs(P.width - Q.width) <= tol * scale


def is_asymmetric_pair(P: DetectorWindow, Q: DetectorWindow) -> bool:
    """Q is not P's mirror image and the mirror of P misses Q entirely."""
    return not P.reflected().overlaps(Q)


# ---------------------------------------------------------------- oracle

def _rect_mass_quadrature(p: WaveParams, a1, b1, a2, b2) -> float:
    return integrate_2d(lambda x, y: density(p, x, y), a1, b1, a2, b2)


def _interval_transform(a, b, kappa):
    # |int_a^b e^{i kappa x} dx| and the phase point, written via sinc to stay stable
    width = b - a
    return width * np.sinc(kappa * width / (2.0 * math.pi)), 0.5 * (a + b)


def _rect_mass_closed_form(p: WaveParams, a1, b1, a2, b2) -> float:
    if not math.isinf(p.envelope_sigma):
        raise ValueError("closed form needs an infinite envelope width")
    area = (b1 - a1) * (b2 - a2)
    if not p.bose:
        return p.norm_scale * area
    kappa = abs(float(p.vectors.k[0]))
    s1, m1 = _interval_transform(a1, b1, kappa)
    s2, m2 = _interval_transform(a2, b2, kappa)
    return 2.0 * p.norm_scale * (area + s1 * s2 * math.cos(kappa * (m1 - m2)))


def _joint(p, P, Q, norm_window, mass):
    check_windows(P, Q)
    w = float(norm_window)
    if not w > 0:
        raise WindowError("normalization window must be positive")
    for win in (P, Q):
        if win.x_lo < -w or win.x_hi > w:
            raise WindowError(f"detector {win.label} lies outside the normalization window [-{w}, {w}]")
    num = mass(p, P.x_lo, P.x_hi, Q.x_lo, Q.x_hi) + mass(p, Q.x_lo, Q.x_hi, P.x_lo, P.x_hi)
    den = mass(p, -w, w, -w, w)
    return num / den


def sqt_joint_probability(p: WaveParams, P: DetectorWindow, Q: DetectorWindow,
                          norm_window: float) -> float:
    """Probability that the unordered pair lands one particle in each window.

    ``norm_window`` is the half-width of the square on which ``|psi|^2`` is
    normalised. Evaluated by adaptive Gauss-Legendre quadrature.
    """
    return _joint(p, P, Q, norm_window, _rect_mass_quadrature)


def sqt_joint_probability_closed_form(p: WaveParams, P: DetectorWindow, Q: DetectorWindow,
                                      norm_window: float) -> float:
    return _joint(p, P, Q, norm_window, _rect_mass_closed_form)


def _intersect(a_lo, a_hi, b_lo, b_hi):
    lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
    return (lo, hi) if hi > lo else None


def symmetric_line_probability(p: WaveParams, P: DetectorWindow, Q: DetectorWindow,
                               half_width: float) -> float:
    """Coincidence probability for pairs constrained to ``x2 = -x1``.

    ``x1`` follows ``|psi(x, -x)|^2`` on ``[-half_width, half_width]``; a
    coincidence needs ``x1`` in P with ``-x1`` in Q or the other way round.
    Zero whenever the mirror of P misses Q.
    """
    check_windows(P, Q)

    def f(x):
        return density(p, x, -x)

    total = 0.0
    for A, B in ((P, Q), (Q, P)):
        seg = _intersect(A.x_lo, A.x_hi, -B.x_hi, -B.x_lo)
        if seg is not None:
            seg = _intersect(*seg, -half_width, half_width)
        if seg is not None:
            total += integrate_1d(f, *seg)
    if total == 0.0:
        return 0.0
    return total / integrate_1d(f, -half_width, half_width)


# ---------------------------------------------------------------- counting

@dataclass(frozen=True)
class CoincidenceCounts:
    n_pairs: int
    coincidences: int
    singles_P: int
    singles_Q: int

    @property
    def rate(self) -> float:
        return self.coincidences / self.n_pairs if self.n_pairs else 0.0


def count_arrays(x1, x2, P: DetectorWindow, Q: DetectorWindow, kernel=None) -> CoincidenceCounts:
    x1 = np.ascontiguousarray(x1, dtype=float)
    x2 = np.ascontiguousarray(x2, dtype=float)
    kernel = kernel or kernels.count_kernel
    c, sp, sq = kernel(x1, x2, P.x_lo, P.x_hi, Q.x_lo, Q.x_hi)
    return CoincidenceCounts(int(x1.size), int(c), int(sp), int(sq))


def count_coincidences(events: list[ArrivalEvent], P: DetectorWindow,
                       Q: DetectorWindow) -> CoincidenceCounts:
    x1 = np.fromiter((e.x1 for e in events), dtype=float, count=len(events))
    x2 = np.fromiter((e.x2 for e in events), dtype=float, count=len(events))
    return count_arrays(x1, x2, P, Q)


@dataclass(frozen=True)
class Comparison:
    z_score: float
    stderr: float
    verdict: str


def binomial_stderr(p_hat: float, n: int) -> float:
    if n <= 0:
        raise ValueError("need at least one pair to estimate a rate")
    if p_hat == 0.0 or p_hat == 1.0:
        return 3.0 / n
    return math.sqrt(p_hat * (1.0 - p_hat) / n)


def compare(p_hat: float, n: int, p_ref: float) -> Comparison:
    se = binomial_stderr(p_hat, n)
    z = (p_hat - p_ref) / se
    if abs(z) > CONFLICT_Z:
        verdict = "CONFLICT"
    elif abs(z) < CONSISTENT_Z:
        verdict = "CONSISTENT"
    else:
        verdict = "INCONCLUSIVE"
    return Comparison(z, se, verdict)


def singles_profile(x, bins: int, window: float):
    """Histogram of arrival positions on ``[-window, window]``: ``(edges, counts)``.

    ``x`` may be a flat array of positions or a list of
    :class:`ArrivalEvent` (both particles counted).
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if len(x) and isinstance(x[0], ArrivalEvent):
        x = [v for e in x for v in (e.x1, e.x2)]
    x = np.asarray(x, dtype=float).ravel()
    counts, edges = np.histogram(x, bins=bins, range=(-window, window))
    return edges, counts


def fringe_visibility(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    hi, lo = counts.max(), counts.min()
    return 0.0 if hi + lo == 0 else (hi - lo) / (hi + lo)


@dataclass(frozen=True)
class CoincidenceReport:
    mode: str
    n_pairs: int
    coincidences: int
    singles_P: int
    singles_Q: int
    p_dbb: float
    p_dbb_stderr: float
    p_sqt: float
    p_symmetric_line: float | None
    comparison_target: str
    p_reference: float
    z_score: float
    verdict: str
    window_config: dict
    normalization_window: float

    def __post_init__(self):
        if self.coincidences > min(self.singles_P, self.singles_Q):
            raise AssertionError("coincidences exceed singles")

    def to_dict(self) -> dict:
        return asdict(self)
