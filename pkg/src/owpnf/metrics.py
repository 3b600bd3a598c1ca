"""Error metrics for intensity estimates under Poisson noise.

The headline figure is the normalized mean integrated squared error

    NMISE = (1/n*) * sum_{f(x) > 0} (fhat(x) - f(x))^2 / f(x)

taken over the ``n*`` pixels of strictly positive true intensity.  The
normalization makes the raw counts themselves score 1.0 in expectation
(their per-pixel variance equals the intensity), so NMISE reads directly as
"fraction of the raw-count error left over".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricResult:
    nmise: float
    mse: float
    n_star: int
    per_pixel: np.ndarray | None = None


def _check_pair(estimate: np.ndarray, truth: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    estimate = np.asarray(estimate, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if estimate.shape != truth.shape:
        raise ValueError(
            f"estimate shape {estimate.shape} does not match truth shape {truth.shape}"
        )
    if not np.all(np.isfinite(truth)) or np.any(truth < 0):
        raise ValueError("truth must be finite and nonnegative")
    if not np.all(np.isfinite(estimate)):
        raise ValueError("estimate contains non-finite values")
    return estimate, truth


def mse(estimate: np.ndarray, truth: np.ndarray) -> float:
    """Plain mean squared error over all pixels."""
    estimate, truth = _check_pair(estimate, truth)
    diff = estimate - truth
    return float(np.mean(diff * diff))


def nmise(
    estimate: np.ndarray, truth: np.ndarray, per_pixel: bool = False
) -> MetricResult:
    """Normalized MSE over positive-truth pixels; see the module docstring.

    Raises ``ValueError`` when the truth has no positive pixel (the metric
    is undefined there, not zero).
    """
    estimate, truth = _check_pair(estimate, truth)
    mask = truth > 0
    n_star = int(mask.sum())
    if n_star == 0:
        raise ValueError("NMISE is undefined: truth has no positive-intensity pixel")
    diff = estimate - truth
    normalized = np.zeros_like(truth)
    normalized[mask] = diff[mask] ** 2 / truth[mask]
    value = float(normalized.sum() / n_star)
    return MetricResult(
        nmise=value,
        mse=float(np.mean(diff * diff)),
        n_star=n_star,
        per_pixel=normalized if per_pixel else None,
    )
