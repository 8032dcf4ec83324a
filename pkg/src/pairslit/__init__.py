"""Bohmian and Born-rule coincidence statistics for two identical particles behind a double slit."""

from ._accel import USE_NUMBA
from .cli import ScenarioResult, run_scenario
from .config import PRESETS, ConfigError, RunConfig, parse_config
from .detection import (
    CoincidenceReport,
    DetectorWindow,
    compare,
    count_coincidences,
    singles_profile,
    sqt_joint_probability,
    sqt_joint_probability_closed_form,
    symmetric_line_probability,
)
from .ensembles import EnsembleKind, EnsembleSpec, rng_substream, sample_gibbs, sample_symmetric
from .trajectories import (
    ArrivalEvent,
    IntegratorConfig,
    PairInitial,
    PairTrajectory,
    check_symmetry_invariant,
    integrate_pair,
    screen_arrivals,
)
from .wavefield import (
    NodeError,
    SlitGeometry,
    Statistics,
    WaveParams,
    WaveVectors,
    density,
    envelope,
    fringe_spacing,
    make_wave_vectors,
    psi,
    velocity,
)

__version__ = "0.1.0"
