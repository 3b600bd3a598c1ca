"""Image file formats: FMAT/CMAT text matrices and binary PGM.

FMAT/CMAT are deliberately dumb plain-text formats so any tool can read
them: a header line ``FMAT <rows> <cols>`` (or ``CMAT`` for integer count
matrices) followed by one whitespace-separated row per line.  FMAT values
are written with 17 significant digits, which round-trips IEEE doubles
exactly; rereading a written file reproduces the array bit-for-bit.

PGM is the usual binary ``P5`` flavor, maxval 255 (one byte per sample) or
65535 (two bytes, big-endian).  Gray levels map to physical intensities
through an explicit ``scale`` factor: ``intensity = gray * scale`` on read,
``gray = round(intensity / scale)`` clipped to the maxval on write.

All writers emit bytes directly, so output files are byte-identical across
platforms and reruns.
"""

from __future__ import annotations

import numpy as np


def _format_matrix(header: str, arr: np.ndarray, fmt) -> bytes:
    rows, cols = arr.shape
    lines = [f"{header} {rows} {cols}"]
    for r in range(rows):
        lines.append(" ".join(fmt(v) for v in arr[r]))
    return ("\n".join(lines) + "\n").encode("ascii")


def write_fmat(path, arr: np.ndarray) -> None:
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"FMAT stores 2-D matrices, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("FMAT cannot store non-finite values")
    data = _format_matrix("FMAT", arr, lambda v: f"{v:.17g}")
    with open(path, "wb") as fh:
        fh.write(data)


def write_cmat(path, arr: np.ndarray) -> None:
    arr = np.asarray(arr)
    if arr.ndim != 2:
        raise ValueError(f"CMAT stores 2-D matrices, got shape {arr.shape}")
    as_int = np.asarray(arr, dtype=np.int64)
    if np.any(as_int != arr):
        raise ValueError("CMAT stores integers; matrix has fractional values")
    data = _format_matrix("CMAT", as_int, lambda v: str(int(v)))
    with open(path, "wb") as fh:
        fh.write(data)


def _read_matrix(path, magic: str) -> np.ndarray:
    with open(path, "rb") as fh:
        tokens = fh.read().decode("ascii").split()
    if len(tokens) < 3 or tokens[0] != magic:
        raise ValueError(f"{path}: not a {magic} file")
    try:
        rows, cols = int(tokens[1]), int(tokens[2])
    except ValueError:
        raise ValueError(f"{path}: malformed {magic} header") from None
    if rows < 1 or cols < 1:
        raise ValueError(f"{path}: bad dimensions {rows} x {cols}")
    body = tokens[3:]
    if len(body) != rows * cols:
        raise ValueError(
            f"{path}: expected {rows * cols} values, found {len(body)}"
        )
    try:
        flat = np.array([float(t) for t in body], dtype=np.float64)
    except ValueError as exc:
        raise ValueError(f"{path}: bad value: {exc}") from None
    return flat.reshape(rows, cols)


def read_fmat(path) -> np.ndarray:
    return _read_matrix(path, "FMAT")


def read_cmat(path) -> np.ndarray:
    flat = _read_matrix(path, "CMAT")
    as_int = flat.astype(np.int64)
    if np.any(as_int != flat):
        raise ValueError(f"{path}: CMAT file contains non-integer values")
    return as_int


def read_pgm(path) -> tuple[np.ndarray, int]:
    """Read binary PGM; returns ``(gray levels, maxval)``."""
    with open(path, "rb") as fh:
        data = fh.read()
    pos = 0

    def token():
        nonlocal pos
        while pos < len(data):
            ch = data[pos : pos + 1]
            if ch == b"#":
                while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            elif ch.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        return data[start:pos]

    if token() != b"P5":
        raise ValueError(f"{path}: not a binary (P5) PGM file")
    try:
        width = int(token())
        height = int(token())
        maxval = int(token())
    except ValueError:
        raise ValueError(f"{path}: malformed PGM header") from None
    if maxval not in (255, 65535):
        raise ValueError(f"{path}: unsupported maxval {maxval} (need 255 or 65535)")
    pos += 1  # single whitespace byte after the header
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    need = width * height * dtype.itemsize
    raster = data[pos : pos + need]
    if len(raster) != need:
        raise ValueError(f"{path}: truncated PGM raster")
    gray = np.frombuffer(raster, dtype=dtype).reshape(height, width)
    return gray.astype(np.int64), maxval


def write_pgm(path, gray: np.ndarray, maxval: int = 255) -> None:
    if maxval not in (255, 65535):
        raise ValueError(f"unsupported maxval {maxval} (need 255 or 65535)")
    gray = np.asarray(gray)
    if gray.ndim != 2:
        raise ValueError(f"PGM stores 2-D images, got shape {gray.shape}")
    if np.any(gray < 0) or np.any(gray > maxval):
        raise ValueError(f"gray levels out of range 0..{maxval}")
    height, width = gray.shape
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n{maxval}\n".encode("ascii"))
        fh.write(np.ascontiguousarray(gray.astype(dtype)).tobytes())


# ---------------------------------------------------------------------------
# extension-dispatched loading and saving, as used by the command line

def _ext(path) -> str:
    name = str(path).lower()
    return name.rsplit(".", 1)[-1] if "." in name else ""


def load_intensity(path, scale: float = 1.0) -> np.ndarray:
    """Load a real-valued intensity image (.fmat or .pgm)."""
    ext = _ext(path)
    if ext == "fmat":
        return read_fmat(path)
    if ext == "cmat":
        return read_cmat(path).astype(np.float64)
    if ext == "pgm":
        gray, _ = read_pgm(path)
        return gray.astype(np.float64) * scale
    raise ValueError(f"{path}: cannot load intensity from a .{ext} file")


def load_counts(path, scale: float = 1.0) -> np.ndarray:
    """Load a count image (.cmat, .pgm, or integer-valued .fmat)."""
    ext = _ext(path)
    if ext == "cmat":
        counts = read_cmat(path)
    elif ext == "pgm":
        gray, _ = read_pgm(path)
        counts = np.rint(gray.astype(np.float64) * scale).astype(np.int64)
    elif ext == "fmat":
        flat = read_fmat(path)
        counts = np.rint(flat).astype(np.int64)
        if np.any(counts != flat):
            raise ValueError(f"{path}: counts must be integers")
    else:
        raise ValueError(f"{path}: cannot load counts from a .{ext} file")
    if np.any(counts < 0):
        bad = np.argwhere(counts < 0)[0]
        raise ValueError(f"{path}: negative count at pixel ({bad[0]}, {bad[1]})")
    return counts


def save_image(path, arr: np.ndarray, scale: float = 1.0, maxval: int = 255) -> None:
    """Save by extension: .fmat / .cmat exact, .pgm quantized via ``scale``."""
    ext = _ext(path)
    if ext == "fmat":
        write_fmat(path, arr)
    elif ext == "cmat":
        write_cmat(path, arr)
    elif ext == "pgm":
        gray = np.clip(np.rint(np.asarray(arr, dtype=np.float64) / scale), 0, maxval)
        write_pgm(path, gray.astype(np.int64), maxval)
    else:
        raise ValueError(f"{path}: cannot save to a .{ext} file")
