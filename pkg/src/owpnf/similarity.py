"""Similarity profiles between pixels, exact and estimated from counts.

The weight solver consumes, for every pixel ``x`` in a search window around
``x0``, a nonnegative similarity ``rho(x)`` that plays the role of
``|f(x) - f(x0)|``.  Two routes produce it:

* :func:`oracle_similarity` reads the true intensity image (available only in
  simulations) and returns ``|f(x) - f(x0)|`` directly.

* :func:`estimated_similarity` compares patches of the observed counts.  The
  kernel-weighted squared patch difference has expectation
  ``(patch contrast)^2 + 2 f(x0)`` under Poisson noise, so its square root is
  debiased by ``sqrt(2 * mean_level)`` and clipped at zero.

Patch kernels come in three kinds: a Gaussian in the pixel distance, a
rectangular (uniform) kernel, and the overlap-count kernel ``k0`` whose value
on the Chebyshev shell ``j`` of a radius-``R`` patch is
``sum_{k=max(1,j)}^{R} (2k+1)^-2``.  The raw ``k0`` mass over the whole patch
telescopes to exactly ``R``; ``k0`` is the package default because it weighs
central pixels by how many nested sub-patches contain them.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import mirror_index
from .weights import VARIANCE_FLOOR

KERNEL_KINDS = ("gauss", "k0", "rect")


def patch_kernel(
    kind: str, radius_px: int, h: float = 1.0, normalize: bool = True
) -> np.ndarray:
    """Build a ``(2R+1, 2R+1)`` patch kernel of the given kind.

    ``h`` is the Gaussian width and is ignored by the other kinds.  With
    ``normalize=True`` (the default) the kernel sums to one.
    """
    if kind not in KERNEL_KINDS:
        raise ValueError(f"kernel kind must be one of {KERNEL_KINDS}, got {kind!r}")
    if radius_px < 0:
        raise ValueError("radius_px must be nonnegative")
    side = 2 * radius_px + 1
    span = np.arange(-radius_px, radius_px + 1)
    if kind == "gauss":
        if h <= 0:
            raise ValueError("gaussian width h must be positive")
        d2 = span[:, None] ** 2 + span[None, :] ** 2
        k = np.exp(-d2 / (2.0 * h * h))
    elif kind == "rect":
        k = np.ones((side, side))
    else:  # k0
        if radius_px == 0:
            k = np.ones((1, 1))
        else:
            shell = np.maximum(np.abs(span[:, None]), np.abs(span[None, :]))
            tail = np.zeros(radius_px + 2)
            for j in range(radius_px, 0, -1):
                tail[j] = tail[j + 1] + 1.0 / (2 * j + 1) ** 2
            tail[0] = tail[1]
            k = tail[shell]
    if normalize:
        k = k / k.sum()
    return k


def oracle_similarity(
    intensity: np.ndarray,
    x0: tuple[int, int],
    pixels: np.ndarray,
    offset: float = 0.0,
) -> np.ndarray:
    """``|f(x) - f(x0)| + offset`` for each window pixel ``x``.

    ``pixels`` holds absolute coordinates (as from ``grid.window_pixels``);
    out-of-range ones are read through the mirror extension.
    """
    intensity = np.asarray(intensity, dtype=np.float64)
    rows, cols = intensity.shape
    if offset < 0:
        raise ValueError("similarity offset must be nonnegative")
    f0 = intensity[x0[0], x0[1]]
    out = np.empty(len(pixels))
    for i, (r, c) in enumerate(pixels):
        fx = intensity[mirror_index(int(r), rows), mirror_index(int(c), cols)]
        out[i] = abs(fx - f0) + offset
    return out


def estimated_similarity(
    counts: np.ndarray,
    x0: tuple[int, int],
    x: tuple[int, int],
    kernel: np.ndarray,
    mean_level: float,
    parity: str = "all",
) -> float:
    """Similarity of ``x`` to ``x0`` estimated from patch differences.

    Computes ``(sqrt(sum_y kappa(y) |Y(y) - Y(x + y - x0)|^2)
    - sqrt(2 * mean_level))+`` with ``y`` running over the patch around
    ``x0``.  ``kernel`` is a normalized patch kernel; ``parity="odd"``
    restricts the sum to the checkerboard half of the patch not containing
    the center (and renormalizes), which decouples the patch difference from
    the center pixel's own count.
    """
    counts = np.asarray(counts, dtype=np.float64)
    rows, cols = counts.shape
    if mean_level < 0:
        raise ValueError("mean_level must be nonnegative")
    radius = kernel.shape[0] // 2
    if kernel.shape != (2 * radius + 1, 2 * radius + 1):
        raise ValueError("kernel must be square with odd side")

    total = 0.0
    mass = 0.0
    for di in range(-radius, radius + 1):
        for dj in range(-radius, radius + 1):
            if parity == "odd" and (di + dj) % 2 == 0:
                continue
            if parity == "even" and (di + dj) % 2 != 0:
                continue
            k = kernel[di + radius, dj + radius]
            ya = counts[
                mirror_index(x0[0] + di, rows), mirror_index(x0[1] + dj, cols)
            ]
            yb = counts[
                mirror_index(x[0] + di, rows), mirror_index(x[1] + dj, cols)
            ]
            total += k * (ya - yb) ** 2
            mass += k
    if mass <= 0:
        raise ValueError("parity restriction left an empty patch")
    total /= mass
    return max(math.sqrt(total) - math.sqrt(2.0 * mean_level), 0.0)


def local_mean(counts: np.ndarray, x0: tuple[int, int], radius_px: int) -> float:
    """Mean of the counts over the full window around ``x0``, floored.

    The floor (``1e-6``) keeps the value usable as a variance surrogate even
    on an all-zero window.
    """
    counts = np.asarray(counts, dtype=np.float64)
    rows, cols = counts.shape
    total = 0.0
    for di in range(-radius_px, radius_px + 1):
        for dj in range(-radius_px, radius_px + 1):
            total += counts[
                mirror_index(x0[0] + di, rows), mirror_index(x0[1] + dj, cols)
            ]
    side = 2 * radius_px + 1
    return max(total / (side * side), VARIANCE_FLOOR)
