"""Optimal convex weights for variance-weighted local averaging.

Given a window profile of similarities ``rho_i >= 0`` and variances
``f_i > 0``, the linear estimate ``sum_i w_i Y_i`` with ``w`` on the
probability simplex has mean-squared error bounded by

    g(w) = (sum_i w_i rho_i)^2 + sum_i w_i^2 f_i        (bias^2 + variance)

The minimizer of ``g`` over the simplex is a triangular kernel in the
similarity, damped by the variance:

    w_i  propto  (a - rho_i)+ / f_i

where the bandwidth ``a`` is the unique root of the strictly increasing map

    M(a) = sum_i rho_i (a - rho_i)+ / f_i  =  1.

``solve_bandwidth`` finds that root exactly by sorting the similarities and
scanning candidate bandwidths; no iterative root-finding is involved.  When
every ``rho_i`` is zero the root escapes to infinity and the minimizer
degenerates to plain inverse-variance weighting.

``brute_force_weights`` solves the same program numerically (grid search plus
accelerated projected gradient) and exists so tests can cross-check the
closed form against an independent route.
"""

from __future__ import annotations

import functools
import itertools
import math

import numpy as np

#: Variances at or below zero are rejected; callers clamp intensities to this
#: floor before building a profile.
VARIANCE_FLOOR = 1e-6


def _check_profile(rho: np.ndarray, variance: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rho = np.asarray(rho, dtype=np.float64)
    variance = np.asarray(variance, dtype=np.float64)
    if rho.ndim != 1 or variance.ndim != 1:
        raise ValueError("profile arrays must be one-dimensional")
    if rho.shape != variance.shape:
        raise ValueError(
            f"similarity and variance lengths differ: {rho.size} vs {variance.size}"
        )
    if rho.size == 0:
        raise ValueError("empty profile")
    if not np.all(np.isfinite(rho)) or np.any(rho < 0):
        raise ValueError("similarities must be finite and nonnegative")
    if not np.all(np.isfinite(variance)) or np.any(variance <= 0):
        raise ValueError("variances must be finite and strictly positive")
    return rho, variance


def mse_bound(rho: np.ndarray, variance: np.ndarray, weights: np.ndarray) -> float:
    """Evaluate ``(sum w rho)^2 + sum w^2 f`` for a given weight vector."""
    rho, variance = _check_profile(rho, variance)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != rho.shape:
        raise ValueError("weights length does not match the profile")
    bias = float(np.dot(weights, rho))
    return bias * bias + float(np.dot(weights * weights, variance))


def solve_bandwidth(rho: np.ndarray, variance: np.ndarray) -> float:
    """Root of ``M(a) = sum rho_i (a - rho_i)+ / f_i = 1``.

    Returns ``inf`` for a flat profile (all similarities zero), where ``M``
    is identically zero and no finite bandwidth exists.
    """
    rho, variance = _check_profile(rho, variance)
    if not np.any(rho > 0):
        return math.inf

    # Sort similarities ascending (stable, so exact ties keep raster order),
    # then scan the candidate bandwidths a_k = (1 + sum_{i<=k} rho_i^2/f_i)
    # / (sum_{i<=k} rho_i/f_i).  The solution is the last a_k that is still
    # >= rho_k; prefixes of all-zero similarity have a_k = inf and always
    # qualify.
    order = np.argsort(rho, kind="stable")
    r = rho[order]
    v = variance[order]
    s1 = np.cumsum(r / v)
    s2 = np.cumsum(r * r / v)
    with np.errstate(divide="ignore", over="ignore"):
        a_k = np.where(s1 > 0, (1.0 + s2) / s1, math.inf)
    valid = a_k >= r
    k_star = np.flatnonzero(valid)[-1]
    return float(a_k[k_star])


def optimal_weights(rho: np.ndarray, variance: np.ndarray) -> tuple[np.ndarray, float]:
    """Minimizer of the bias^2 + variance bound over the simplex.

    Returns ``(weights, bandwidth)``.  The bandwidth is ``inf`` for a flat
    profile, in which case the weights are plain inverse-variance.
    """
    rho, variance = _check_profile(rho, variance)
    a = solve_bandwidth(rho, variance)
    if math.isinf(a):
        w = 1.0 / variance
    else:
        w = np.maximum(a - rho, 0.0) / variance
    w /= w.sum()
    return w, a


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``v`` onto the probability simplex."""
    v = np.asarray(v, dtype=np.float64)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, v.size + 1)
    r = idx[u + (1.0 - css) / idx > 0][-1]
    theta = (1.0 - css[r - 1]) / r
    return np.maximum(v + theta, 0.0)


@functools.lru_cache(maxsize=None)
def _simplex_grid(n: int, grid_steps: int) -> np.ndarray:
    # Every weight vector with entries k_i/grid_steps summing to 1 (stars
    # and bars), one row per candidate.  Depends only on the two sizes, so
    # the matrix is built once and reused.
    edges = np.array(
        list(itertools.combinations(range(grid_steps + n - 1), n - 1)),
        dtype=np.int64,
    ).reshape(-1, n - 1)
    m = edges.shape[0]
    fenced = np.column_stack(
        [np.full(m, -1), edges, np.full(m, grid_steps + n - 1)]
    )
    grid = (np.diff(fenced, axis=1) - 1) / grid_steps
    grid.setflags(write=False)
    return grid


def _grid_search(rho: np.ndarray, variance: np.ndarray, grid_steps: int) -> np.ndarray:
    # exhaustive scan over the candidate grid; only viable for short profiles
    if rho.size == 1:
        return np.ones(1)
    grid = _simplex_grid(rho.size, grid_steps)
    gw = grid @ rho
    gw = gw * gw + (grid * grid) @ variance
    return grid[np.argmin(gw)].copy()


def brute_force_weights(
    rho: np.ndarray,
    variance: np.ndarray,
    grid_steps: int = 12,
    iterations: int = 4000,
) -> np.ndarray:
    """Minimize the bound numerically, independent of the closed form.

    Short profiles (length <= 6) start from an exhaustive grid with spacing
    ``1/grid_steps``; longer ones start from uniform weights.  Either start
    is refined by accelerated projected gradient descent, which converges
    globally because the objective is a positive-definite quadratic.  Meant
    as a test oracle, not for production use.
    """
    rho, variance = _check_profile(rho, variance)
    n = rho.size
    if n <= 6 and grid_steps >= 1:
        w = _grid_search(rho, variance, grid_steps)
    else:
        w = np.full(n, 1.0 / n)

    lipschitz = 2.0 * (np.dot(rho, rho) + variance.max())
    z = w.copy()
    t = 1.0
    best_w = w.copy()
    best_g = np.dot(w, rho) ** 2 + np.dot(w * w, variance)
    stall = 0
    check = 4  # evaluating the bound every step costs more than it buys
    for k in range(iterations):
        grad = 2.0 * np.dot(z, rho) * rho + 2.0 * variance * z
        w_next = project_simplex(z - grad / lipschitz)
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        z = w_next + ((t - 1.0) / t_next) * (w_next - w)
        w, t = w_next, t_next
        if (k + 1) % check:
            continue
        gw = np.dot(w, rho) ** 2 + np.dot(w * w, variance)
        if gw < best_g - 1e-16:
            best_g = gw
            best_w = w.copy()
            stall = 0
        else:
            # momentum overshot; drop it and restart the acceleration
            t, z = 1.0, w.copy()
            stall += 1
            if stall >= 15:
                break
    return best_w
