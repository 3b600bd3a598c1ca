"""Synthetic scenes and reproducible Poisson count sampling.

Sampling scheme
---------------
Counts are drawn with a counter-based generator: pixel ``(r, c)`` owns a
splitmix64 substream whose starting state is a hash of ``(seed, r, c)``, and
every uniform draw advances that substream alone.  Consequences:

* the draw at a pixel never depends on evaluation order or thread count;
* rerunning with the same seed reproduces counts bit-for-bit;
* the same seed on images of different sizes agrees on the overlap.

Low-mean pixels (``lambda < 30``) are sampled by inversion (sequential
search through the CDF); larger means use Hormann's transformed rejection
with squeeze (PTRS).  Both are exact samplers — no normal approximation
anywhere.  Draws are reproducible across runs of this implementation;
bit-equality with other Poisson samplers is not promised.

Scenes
------
All scenes are renderings of fixed continuous layouts, so the same scene at
two resolutions depicts the same object.  ``spots`` is a 5x5 grid of
rim-tapered disks whose radii grow geometrically down the rows and whose
amplitudes sweep the requested range linearly across the grid, on a faint
background.
``ridges`` is nine vertical smooth ridges with equally spaced peak heights
plus one inclined ridge crossing them.  ``constant`` and ``gradient`` are
what their names say.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _engine

_MASK64 = (1 << 64) - 1

SCENE_KINDS = ("constant", "gradient", "spots", "ridges")


def _first_bad_pixel(mask: np.ndarray) -> tuple[int, int]:
    flat = int(np.flatnonzero(mask)[0])
    return flat // mask.shape[1], flat % mask.shape[1]


def validate_intensity(intensity: np.ndarray) -> np.ndarray:
    """Check an intensity image is 2-D, finite and nonnegative.

    Raises ``ValueError`` naming the first offending pixel in raster order.
    """
    intensity = np.asarray(intensity, dtype=np.float64)
    if intensity.ndim != 2:
        raise ValueError(f"expected a 2-D intensity image, got shape {intensity.shape}")
    bad = ~np.isfinite(intensity)
    if bad.any():
        r, c = _first_bad_pixel(bad)
        raise ValueError(f"non-finite intensity at pixel ({r}, {c})")
    bad = intensity < 0
    if bad.any():
        r, c = _first_bad_pixel(bad)
        raise ValueError(
            f"negative intensity {intensity[r, c]:g} at pixel ({r}, {c})"
        )
    return intensity


def sample_poisson(intensity: np.ndarray, seed: int) -> np.ndarray:
    """Poisson counts with per-pixel mean ``intensity[r, c]``.

    Deterministic in ``(intensity, seed)``; see the module docstring for the
    substream scheme.
    """
    intensity = validate_intensity(intensity)
    seed64 = np.uint64(int(seed) & _MASK64)
    return _engine.poisson_image(np.ascontiguousarray(intensity), seed64)


def pixel_uniforms(seed: int, r: int, c: int, n: int) -> np.ndarray:
    """First ``n`` uniforms of pixel ``(r, c)``'s substream (test hook)."""
    seed64 = np.uint64(int(seed) & _MASK64)
    return _engine.uniform_stream(seed64, r, c, n)


# ---------------------------------------------------------------------------
# scene generators

def constant_scene(rows: int, cols: int, level: float) -> np.ndarray:
    if level < 0:
        raise ValueError("intensity level must be nonnegative")
    return np.full((rows, cols), float(level))


def gradient_scene(rows: int, cols: int, low: float, high: float) -> np.ndarray:
    """Horizontal linear ramp from ``low`` (left edge) to ``high`` (right)."""
    if low < 0 or high < 0:
        raise ValueError("gradient endpoints must be nonnegative")
    if cols == 1:
        ramp = np.full(1, float(low))
    else:
        ramp = low + (high - low) * (np.arange(cols) / (cols - 1))
    return np.tile(ramp, (rows, 1))


def spots_scene(
    rows: int,
    cols: int,
    amp_min: float = 0.08,
    amp_max: float = 4.99,
    background: float = 0.03,
) -> np.ndarray:
    """Grid of compact disk sources: geometric radii, linear amplitudes.

    A 5x5 grid of disks whose radii grow geometrically down the rows (from
    about 2 to 7 px at 256x256, scaling with the image) and whose
    amplitudes sweep ``amp_min..amp_max`` linearly across the grid.  Each
    disk plateaus at its amplitude and falls to the background over a short
    cosine rim, the way a point source looks through real optics.  The
    image minimum is exactly the background and the maximum exactly
    ``amp_max``.
    """
    if background < 0 or amp_min < 0 or amp_max < amp_min:
        raise ValueError("need 0 <= background and 0 <= amp_min <= amp_max")
    grid = 5
    f = np.full((rows, cols), float(background))
    cell_r = rows / grid
    cell_c = cols / grid
    scale = min(rows, cols) / 256.0
    r_small = max(1.0, 2.0 * scale)
    r_large = max(r_small, 7.0 * scale)
    rim = max(1.0, 3.0 * scale)
    rr, cc = np.mgrid[0:rows, 0:cols]
    for i in range(grid):
        radius = r_small * (r_large / r_small) ** (i / (grid - 1))
        for j in range(grid):
            k = i * grid + j
            amp = amp_min + (amp_max - amp_min) * k / (grid * grid - 1)
            center_r = (i + 0.5) * cell_r - 0.5
            center_c = (j + 0.5) * cell_c - 0.5
            dist = np.sqrt((rr - center_r) ** 2 + (cc - center_c) ** 2)
            inside = dist <= radius
            w = min(rim, radius)
            t = np.clip((dist[inside] - (radius - w)) / w, 0.0, 1.0)
            profile = 0.5 * (1.0 + np.cos(np.pi * t))
            f[inside] = background + (amp - background) * profile
    return f


def ridges_scene(
    rows: int,
    cols: int,
    peak_min: float = 0.1,
    peak_max: float = 0.5,
    background: float = 0.05,
    incline: float = 0.3,
    include_incline: bool = True,
) -> np.ndarray:
    """Nine smooth vertical ridges plus one inclined ridge.

    Ridge ``i`` sits at column ``(i + 1) * cols / 10`` with a Gaussian
    profile of amplitude ``peak_min + i * (peak_max - peak_min) / 8`` above
    the background.  The inclined ridge has amplitude ``incline`` and runs
    corner to corner, so the brightest pixel of the default scene is about
    ``background + peak_max + incline`` where it crosses the tallest ridge.
    """
    if background < 0 or peak_min < 0 or peak_max < peak_min or incline < 0:
        raise ValueError("ridge amplitudes must be nonnegative with peak_min <= peak_max")
    f = np.full((rows, cols), float(background))
    c = np.arange(cols, dtype=np.float64)
    sigma = cols / 64.0
    for i in range(9):
        peak = peak_min + i * (peak_max - peak_min) / 8.0
        center = (i + 1) * cols / 10.0
        f += peak * np.exp(-((c - center) ** 2) / (2.0 * sigma * sigma))[None, :]
    if include_incline and incline > 0:
        r = np.arange(rows, dtype=np.float64)
        drift = 1.0 - r / (rows - 1) if rows > 1 else np.zeros(1)
        center = (cols - 1) * drift
        f += incline * np.exp(
            -((c[None, :] - center[:, None]) ** 2) / (2.0 * sigma * sigma)
        )
    return f


@dataclass(frozen=True)
class SceneSpec:
    """A named scene layout plus its numeric parameters.

    The text form understood by :meth:`parse` is ``kind[:p1:p2:...]``, e.g.
    ``constant:4``, ``gradient:0.05:5``, ``spots`` (default amplitudes
    0.08..4.99 on background 0.03) or ``ridges`` (peaks 0.1..0.5 on
    background 0.05 with a 0.3 incline).
    """

    kind: str
    params: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in SCENE_KINDS:
            raise ValueError(
                f"unknown scene {self.kind!r}; expected one of {SCENE_KINDS}"
            )
        counts = {"constant": (1,), "gradient": (2,), "spots": (0, 3), "ridges": (0, 4)}
        if len(self.params) not in counts[self.kind]:
            raise ValueError(
                f"scene {self.kind!r} takes {counts[self.kind]} parameters, "
                f"got {len(self.params)}"
            )

    @classmethod
    def parse(cls, text: str) -> "SceneSpec":
        parts = text.split(":")
        try:
            params = tuple(float(p) for p in parts[1:])
        except ValueError as exc:
            raise ValueError(f"bad scene parameter in {text!r}: {exc}") from None
        return cls(parts[0], params)

    def render(self, rows: int, cols: int) -> np.ndarray:
        if rows < 1 or cols < 1:
            raise ValueError("scene dimensions must be positive")
        if self.kind == "constant":
            return constant_scene(rows, cols, *self.params)
        if self.kind == "gradient":
            return gradient_scene(rows, cols, *self.params)
        if self.kind == "spots":
            return spots_scene(rows, cols, *self.params)
        return ridges_scene(rows, cols, *self.params)
