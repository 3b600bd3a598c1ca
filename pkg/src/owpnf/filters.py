"""The optimal-weights Poisson noise filter (OWPNF) and its oracle twin.

Both filters estimate each pixel's intensity as a convex combination of
counts in a square search window, with weights from
:mod:`owpnf.weights` — a triangular kernel in the similarity, damped by the
variance.  They differ only in where the similarity comes from:

* :func:`oracle_filter` reads the true intensity image (simulation only);
  per-pixel variances are the true intensities, floored at ``1e-6``.

* :func:`owpnf` works from counts alone.  Step one estimates similarities
  by kernel-weighted patch comparison, debiased by the local mean level,
  and solves the weight program with that same mean level standing in for
  every variance.  Step two selectively smooths the result: wherever the
  windowed mean of the step-one image is at or below ``gamma_threshold``
  (a low-count region, where patch similarities are least reliable) it
  applies a small Gaussian of radius ``smooth_radius_px`` and width
  ``smooth_bandwidth``; brighter regions pass through untouched.

Window geometry near the image frontier reads through the mirror extension
(no edge duplication).  All per-pixel reductions run in raster order, so
outputs are bit-identical regardless of the thread count.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _engine
from .grid import mirror_index, window_offsets
from .similarity import KERNEL_KINDS, patch_kernel

set_threads = _engine.set_threads


@dataclass(frozen=True)
class FilterParams:
    """Geometry and tuning of one filter run.

    Radii are in pixels: a search radius of 7 means a 15x15 window.  The
    ``split`` flag restricts search windows to the checkerboard half
    containing the center and patch sums to the other half, decoupling the
    two for analysis; production runs leave it off.  ``delta`` is an
    additive offset on every similarity (oracle filter only).
    """

    search_radius_px: int = 7
    patch_radius_px: int = 4
    kernel: str = "k0"
    kernel_h: float = 1.0
    gamma_threshold: float = 5.0
    smooth_radius_px: int = 2
    smooth_bandwidth: float = 1.0
    split: bool = False
    delta: float = 0.0

    def __post_init__(self):
        if self.search_radius_px < 0:
            raise ValueError("search_radius_px must be nonnegative")
        if self.patch_radius_px < 0:
            raise ValueError("patch_radius_px must be nonnegative")
        if self.smooth_radius_px < 0:
            raise ValueError("smooth_radius_px must be nonnegative")
        if self.kernel not in KERNEL_KINDS:
            raise ValueError(f"kernel must be one of {KERNEL_KINDS}")
        if self.kernel == "gauss" and self.kernel_h <= 0:
            raise ValueError("gaussian kernel width must be positive")
        if self.smooth_bandwidth <= 0:
            raise ValueError("smooth_bandwidth must be positive")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.split and self.patch_radius_px < 1:
            raise ValueError("split mode needs patch_radius_px >= 1")

    @property
    def window_side(self) -> int:
        return 2 * self.search_radius_px + 1

    @property
    def patch_side(self) -> int:
        return 2 * self.patch_radius_px + 1

    @classmethod
    def from_sides(cls, M: int = 15, m: int = 9, **kwargs) -> "FilterParams":
        """Build from window/patch side lengths (odd), as on the CLI."""
        for name, side in (("M", M), ("m", m)):
            if side < 1 or side % 2 == 0:
                raise ValueError(f"{name} must be an odd positive side length")
        return cls(search_radius_px=(M - 1) // 2, patch_radius_px=(m - 1) // 2, **kwargs)


#: Hand-tuned configurations for the classic low-count test scenes.
PRESETS: dict[str, FilterParams] = {
    "spots": FilterParams.from_sides(19, 13, smooth_radius_px=2, smooth_bandwidth=1.0),
    "galaxy": FilterParams.from_sides(15, 5, smooth_radius_px=2, smooth_bandwidth=1.0),
    "ridges": FilterParams.from_sides(9, 19, smooth_radius_px=3, smooth_bandwidth=2.0),
    "barbara": FilterParams.from_sides(15, 21, smooth_radius_px=0),
    "cells": FilterParams.from_sides(11, 17, smooth_radius_px=1, smooth_bandwidth=0.6),
}


@dataclass(frozen=True)
class DenoiseReport:
    """Output of a filter run plus provenance.

    ``bandwidth`` maps each pixel to the weight solver's bandwidth there
    (``inf`` where the window profile was flat).  ``step1`` carries the
    intermediate image for the two-step filter, ``None`` otherwise.
    """

    output: np.ndarray
    params: FilterParams
    seconds: float
    bandwidth: np.ndarray | None = None
    step1: np.ndarray | None = None


def _check_image(img: np.ndarray, name: str) -> np.ndarray:
    img = np.ascontiguousarray(np.asarray(img, dtype=np.float64))
    if img.ndim != 2:
        raise ValueError(f"{name} must be a 2-D image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValueError(f"{name} contains non-finite values")
    if np.any(img < 0):
        raise ValueError(f"{name} contains negative values")
    return img


def _check_fit(img: np.ndarray, pad: int, what: str) -> None:
    if pad >= min(img.shape):
        raise ValueError(
            f"{what} needs a mirror margin of {pad} px, which does not fit "
            f"an image of shape {img.shape}"
        )


def _pad(img: np.ndarray, radius: int) -> np.ndarray:
    if radius == 0:
        return img
    return np.pad(img, radius, mode="reflect")


def weighted_estimate(
    counts: np.ndarray,
    x0: tuple[int, int],
    weights: np.ndarray,
    pixels: np.ndarray,
) -> float:
    """``sum_i w_i Y(x_i)`` with out-of-range pixels read by mirroring.

    Reference composition point for tests; the filters fuse this into their
    compiled loops.
    """
    counts = np.asarray(counts, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if len(weights) != len(pixels):
        raise ValueError(
            f"{len(weights)} weights for {len(pixels)} pixels"
        )
    rows, cols = counts.shape
    total = 0.0
    for w, (r, c) in zip(weights, pixels):
        total += w * counts[mirror_index(int(r), rows), mirror_index(int(c), cols)]
    return total


def _window_mask(radius: int, split: bool) -> np.ndarray:
    side = 2 * radius + 1
    if not split:
        return np.ones((side, side), dtype=np.bool_)
    offs = window_offsets(radius, "even")
    mask = np.zeros((side, side), dtype=np.bool_)
    mask[offs[:, 0] + radius, offs[:, 1] + radius] = True
    return mask


def _patch_kernel_for(params: FilterParams) -> np.ndarray:
    kappa = patch_kernel(params.kernel, params.patch_radius_px, params.kernel_h)
    if params.split:
        span = np.arange(-params.patch_radius_px, params.patch_radius_px + 1)
        odd = (span[:, None] + span[None, :]) % 2 != 0
        kappa = np.where(odd, kappa, 0.0)
        kappa /= kappa.sum()
    return np.ascontiguousarray(kappa)


def oracle_filter(
    intensity: np.ndarray, counts: np.ndarray, params: FilterParams | None = None
) -> DenoiseReport:
    """Optimally weighted filter with similarities from the true intensity."""
    if params is None:
        params = FilterParams()
    intensity = _check_image(intensity, "intensity")
    counts = _check_image(counts, "counts")
    if intensity.shape != counts.shape:
        raise ValueError("intensity and counts shapes differ")
    h = params.search_radius_px
    _check_fit(intensity, h, "the search window")
    t0 = time.perf_counter()
    out, bw = _engine.oracle_filter_image(
        _pad(intensity, h), _pad(counts, h),
        intensity.shape[0], intensity.shape[1], h, params.delta,
    )
    return DenoiseReport(
        output=out, params=params, seconds=time.perf_counter() - t0, bandwidth=bw
    )


def owpnf_step1(counts: np.ndarray, params: FilterParams | None = None) -> DenoiseReport:
    """First step: patch-estimated similarities, homoscedastic weight solve."""
    if params is None:
        params = FilterParams()
    counts = _check_image(counts, "counts")
    h = params.search_radius_px
    eta = params.patch_radius_px
    _check_fit(counts, h + eta, "the search window plus patch")
    kappa = _patch_kernel_for(params)
    mask = _window_mask(h, params.split)
    t0 = time.perf_counter()
    out, bw = _engine.step1_image(
        _pad(counts, h + eta), counts.shape[0], counts.shape[1], h, eta, kappa, mask
    )
    return DenoiseReport(
        output=out, params=params, seconds=time.perf_counter() - t0, bandwidth=bw
    )


def owpnf_step2(step1_img: np.ndarray, params: FilterParams | None = None) -> np.ndarray:
    """Second step: Gaussian smoothing gated by the windowed mean level."""
    if params is None:
        params = FilterParams()
    img = _check_image(step1_img, "step-one image")
    h = params.search_radius_px
    d = params.smooth_radius_px
    _check_fit(img, max(h, d), "the gating window")
    span = np.arange(-d, d + 1)
    d2 = span[:, None] ** 2 + span[None, :] ** 2
    smooth = np.exp(-d2 / (2.0 * params.smooth_bandwidth**2))
    return _engine.step2_image(
        _pad(img, max(h, d)), img.shape[0], img.shape[1], h, d,
        np.ascontiguousarray(smooth), params.gamma_threshold,
    )


def owpnf(counts: np.ndarray, params: FilterParams | None = None) -> DenoiseReport:
    """Both steps of the count-only filter; see the module docstring."""
    if params is None:
        params = FilterParams()
    t0 = time.perf_counter()
    first = owpnf_step1(counts, params)
    out = owpnf_step2(first.output, params)
    return DenoiseReport(
        output=out,
        params=params,
        seconds=time.perf_counter() - t0,
        bandwidth=first.bandwidth,
        step1=first.output,
    )
