"""Pixel-grid geometry: search windows, boundary mirroring, parity splits.

Images are 2-D float arrays indexed ``(row, col)``.  Every windowed loop in
this package enumerates pixels in raster order (row-major, top-left to
bottom-right); that single canonical order is what makes results reproducible
bit-for-bit under any parallel schedule.
"""

from __future__ import annotations

import numpy as np

_PARITIES = ("all", "even", "odd")


def mirror_index(i: int, n: int) -> int:
    """Fold coordinate ``i`` back into ``[0, n)`` by mirroring about the edges.

    The edge sample is not repeated: ``-1 -> 1``, ``-2 -> 2``, ``n -> n - 2``.
    Valid while the overshoot is at most ``n - 1``.
    """
    if n < 1:
        raise ValueError("empty axis has no mirror")
    if i < 0:
        i = -i
    if i >= n:
        i = 2 * n - 2 - i
    if i < 0 or i >= n:
        raise ValueError(f"coordinate {i} reflects outside a length-{n} axis")
    return i


def extend_boundary(img: np.ndarray, radius_px: int) -> np.ndarray:
    """Pad ``img`` by ``radius_px`` on every side by mirror reflection.

    Reading the padded array at offset ``-j`` from an original edge returns
    the sample at offset ``+j`` (no edge duplication), so windowed sums near
    the frontier see a symmetrized image.  ``radius_px`` must be smaller than
    both image dimensions for the reflection to be defined.
    """
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {img.shape}")
    if radius_px < 0:
        raise ValueError("radius_px must be nonnegative")
    if radius_px >= min(img.shape):
        raise ValueError(
            f"radius {radius_px} does not fit an image of shape {img.shape}"
        )
    if radius_px == 0:
        return img.copy()
    return np.pad(img, radius_px, mode="reflect")


def window_offsets(radius_px: int, parity: str = "all") -> np.ndarray:
    """Offsets ``(di, dj)`` of the square window of the given radius.

    Offsets come out in raster order.  ``parity`` selects the checkerboard
    half of the window: "even" keeps offsets with ``di + dj`` even (this half
    contains the center), "odd" keeps the complement, "all" keeps everything.
    """
    if radius_px < 0:
        raise ValueError("radius_px must be nonnegative")
    if parity not in _PARITIES:
        raise ValueError(f"parity must be one of {_PARITIES}, got {parity!r}")
    span = np.arange(-radius_px, radius_px + 1)
    di, dj = np.meshgrid(span, span, indexing="ij")
    offsets = np.stack([di.ravel(), dj.ravel()], axis=1)
    if parity == "even":
        offsets = offsets[(offsets.sum(axis=1) % 2) == 0]
    elif parity == "odd":
        offsets = offsets[(offsets.sum(axis=1) % 2) != 0]
    return offsets


def window_pixels(
    center: tuple[int, int], radius_px: int, parity: str = "all"
) -> np.ndarray:
    """Absolute pixel coordinates of the window centered at ``center``.

    Coordinates may stick out of the image; callers read them through
    :func:`extend_boundary` / :func:`mirror_index`.
    """
    r, c = center
    return window_offsets(radius_px, parity) + np.array([r, c])


def translate(y: tuple[int, int], x0: tuple[int, int], x: tuple[int, int]) -> tuple[int, int]:
    """Carry the offset of ``y`` relative to ``x0`` over to ``x``.

    This is the patch-comparison map: pixel ``y`` in the patch around ``x0``
    corresponds to ``x + (y - x0)`` in the patch around ``x``.
    """
    return (x[0] + y[0] - x0[0], x[1] + y[1] - x0[1])
