"""Optimal-weights Poisson noise filtering for low-count images.

The package estimates a photon-limited intensity image from its Poisson
counts by weighted local averaging, where the weights minimize an explicit
bias-variance bound over the probability simplex.  A two-step, count-only
filter (:func:`owpnf`) does the real work; an oracle variant
(:func:`oracle_filter`) that peeks at the true intensity provides the
benchmark ceiling in simulations.
"""

__version__ = "0.1.0"

from ._engine import set_threads
from .filters import (
    PRESETS,
    DenoiseReport,
    FilterParams,
    oracle_filter,
    owpnf,
    owpnf_step1,
    owpnf_step2,
    weighted_estimate,
)
from .metrics import MetricResult, mse, nmise
from .noise import (
    SceneSpec,
    constant_scene,
    gradient_scene,
    ridges_scene,
    sample_poisson,
    spots_scene,
    validate_intensity,
)
from .similarity import (
    estimated_similarity,
    local_mean,
    oracle_similarity,
    patch_kernel,
)
from .weights import (
    VARIANCE_FLOOR,
    brute_force_weights,
    mse_bound,
    optimal_weights,
    project_simplex,
    solve_bandwidth,
)

__all__ = [
    "__version__",
    "set_threads",
    "PRESETS",
    "DenoiseReport",
    "FilterParams",
    "oracle_filter",
    "owpnf",
    "owpnf_step1",
    "owpnf_step2",
    "weighted_estimate",
    "MetricResult",
    "mse",
    "nmise",
    "SceneSpec",
    "constant_scene",
    "gradient_scene",
    "ridges_scene",
    "sample_poisson",
    "spots_scene",
    "validate_intensity",
    "estimated_similarity",
    "local_mean",
    "oracle_similarity",
    "patch_kernel",
    "VARIANCE_FLOOR",
    "brute_force_weights",
    "mse_bound",
    "optimal_weights",
    "project_simplex",
    "solve_bandwidth",
]
