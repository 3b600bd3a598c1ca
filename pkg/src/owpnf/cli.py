"""Command-line interface.

Five subcommands cover the simulation-to-report loop:

* ``simulate``  — render a scene (or load an intensity image) and draw
  Poisson counts from it.
* ``denoise``   — run the two-step count-only filter.
* ``oracle``    — run the true-intensity-weighted filter, optionally
  sweeping the window size into a CSV.
* ``evaluate``  — compare an estimate against the truth.
* ``benchmark`` — scenes x seeds from a JSON manifest into a CSV table.

Option values resolve as: explicit flag, then ``--config`` file (flat
``key = value`` lines), then built-in defaults.  ``--threads`` additionally
falls back to the ``OWPNF_THREADS`` environment variable.  Every command
prints its fully resolved configuration, so a run can be reproduced from
its log alone.  Output files never embed timing, so identical inputs give
byte-identical files regardless of thread count.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from .filters import FilterParams, oracle_filter, owpnf, set_threads
from .imgio import load_counts, load_intensity, save_image
from .metrics import nmise
from .noise import SceneSpec, sample_poisson, validate_intensity

DEFAULTS = {
    "M": 15,
    "m": 9,
    "kernel": "k0",
    "d": 2,
    "H": 1.0,
    "gamma_threshold": 5.0,
    "split": False,
    "delta": 0.0,
    "seed": 0,
    "scale": 1.0,
    "maxval": 255,
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` lines; blank lines and ``#`` comments ignored."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


class _Resolver:
    """Flag > config file > default, remembering what was decided."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = read_config(args.config) if getattr(args, "config", None) else {}
        self.resolved: dict[str, object] = {}

    def get(self, key: str, cast):
        flag = getattr(self.args, key, None)
        if flag is not None:
            value = flag
        elif key in self.config:
            value = cast(self.config[key])
        else:
            value = DEFAULTS[key]
        self.resolved[key] = value
        return value

    def threads(self) -> int | None:
        flag = getattr(self.args, "threads", None)
        if flag is not None:
            value = flag
        elif "threads" in self.config:
            value = int(self.config["threads"])
        elif os.environ.get("OWPNF_THREADS"):
            value = int(os.environ["OWPNF_THREADS"])
        else:
            value = None
        self.resolved["threads"] = "auto" if value is None else value
        return value

    def echo(self, command: str) -> None:
        pairs = " ".join(f"{k}={v}" for k, v in sorted(self.resolved.items()))
        print(f"owpnf {__version__} {command} {pairs}")


def parse_kernel(text: str) -> tuple[str, float]:
    """``k0``, ``rect``, ``gauss`` or ``gauss:<width>``."""
    kind, _, width = text.partition(":")
    if kind in ("k0", "rect"):
        if width:
            raise ValueError(f"kernel {kind!r} takes no parameter")
        return kind, 1.0
    if kind == "gauss":
        return kind, float(width) if width else 1.0
    raise ValueError(f"unknown kernel {text!r} (expected gauss[:h], k0 or rect)")


def parse_size(text: str) -> tuple[int, int]:
    part = text.lower().split("x")
    if len(part) == 1:
        rows = cols = int(part[0])
    elif len(part) == 2:
        rows, cols = int(part[0]), int(part[1])
    else:
        raise ValueError(f"bad size {text!r} (expected ROWSxCOLS)")
    if rows < 1 or cols < 1:
        raise ValueError("size must be positive")
    return rows, cols


def parse_window_sweep(text: str) -> list[int]:
    """``19`` for one window side, ``7..19`` or ``7..19:2`` for a sweep."""
    if ".." not in text:
        return [int(text)]
    span, _, step_txt = text.partition(":")
    start_txt, _, stop_txt = span.partition("..")
    start, stop = int(start_txt), int(stop_txt)
    step = int(step_txt) if step_txt else 2
    if step < 1 or stop < start:
        raise ValueError(f"bad window sweep {text!r}")
    return list(range(start, stop + 1, step))


def _filter_params(res: _Resolver, with_delta: bool = False) -> FilterParams:
    kind, width = parse_kernel(res.get("kernel", str))
    return FilterParams.from_sides(
        res.get("M", int),
        res.get("m", int),
        kernel=kind,
        kernel_h=width,
        gamma_threshold=res.get("gamma_threshold", float),
        smooth_radius_px=res.get("d", int),
        smooth_bandwidth=res.get("H", float),
        split=res.get("split", _parse_bool),
        delta=res.get("delta", float) if with_delta else 0.0,
    )


def _apply_threads(res: _Resolver) -> None:
    set_threads(res.threads())


# ---------------------------------------------------------------------------
# subcommands

def cmd_simulate(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    seed = res.get("seed", int)
    scale = res.get("scale", float)
    maxval = res.get("maxval", int)
    _apply_threads(res)
    if (args.scene is None) == (args.image is None):
        raise ValueError("give exactly one of --scene or --image")
    if args.scene is not None:
        if args.size is None:
            raise ValueError("--scene needs --size")
        rows, cols = parse_size(args.size)
        intensity = SceneSpec.parse(args.scene).render(rows, cols)
        res.resolved["scene"] = args.scene
        res.resolved["size"] = f"{rows}x{cols}"
    else:
        intensity = validate_intensity(load_intensity(args.image, scale))
        res.resolved["image"] = args.image
    res.echo("simulate")
    counts = sample_poisson(intensity, seed)
    save_image(args.out, counts, scale, maxval)
    if args.truth_out:
        save_image(args.truth_out, intensity, scale, maxval)
    print(f"wrote {args.out}: {counts.shape[0]}x{counts.shape[1]} counts, "
          f"mean {counts.mean():.6g}")
    return 0


def cmd_denoise(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    params = _filter_params(res)
    scale = res.get("scale", float)
    maxval = res.get("maxval", int)
    _apply_threads(res)
    res.echo("denoise")
    counts = load_counts(args.infile, scale).astype(np.float64)
    report = owpnf(counts, params)
    save_image(args.out, report.output, scale, maxval)
    if args.emit_step1:
        save_image(args.emit_step1, report.step1, scale, maxval)
    if args.truth:
        truth = validate_intensity(load_intensity(args.truth, scale))
        raw = nmise(counts, truth)
        final = nmise(report.output, truth)
        print(f"nmise raw={raw.nmise:.6g} owpnf={final.nmise:.6g} "
              f"(n*={final.n_star})")
    print(f"wrote {args.out} in {report.seconds:.2f} s")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    if args.M is not None:
        m_text = args.M
    else:
        m_text = res.config.get("M", str(DEFAULTS["M"]))
    sweep = parse_window_sweep(str(m_text))
    delta = res.get("delta", float)
    scale = res.get("scale", float)
    maxval = res.get("maxval", int)
    _apply_threads(res)
    res.resolved["M"] = ",".join(str(m) for m in sweep)
    res.echo("oracle")
    truth = validate_intensity(load_intensity(args.truth, scale))
    counts = load_counts(args.counts, scale).astype(np.float64)
    if truth.shape != counts.shape:
        raise ValueError(
            f"truth shape {truth.shape} does not match counts {counts.shape}"
        )
    if len(sweep) > 1 and not args.csv:
        raise ValueError("a window sweep needs --csv for its table")
    rows = []
    last = None
    for side in sweep:
        params = FilterParams.from_sides(side, 1, delta=delta)
        report = oracle_filter(truth, counts, params)
        result = nmise(report.output, truth)
        rows.append((side, result.nmise, result.mse))
        last = report
        print(f"M={side}x{side} nmise={result.nmise:.6g} mse={result.mse:.6g}")
    if args.out:
        save_image(args.out, last.output, scale, maxval)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["M", "nmise", "mse"])
            for side, nm, ms in rows:
                writer.writerow([side, f"{nm:.10g}", f"{ms:.10g}"])
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    scale = res.get("scale", float)
    res.echo("evaluate")
    estimate = load_intensity(args.estimate, scale)
    truth = validate_intensity(load_intensity(args.truth, scale))
    result = nmise(estimate, truth)
    print(f"nmise={result.nmise:.10g} mse={result.mse:.10g} n*={result.n_star}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["nmise", "mse", "n_star", "version"])
            writer.writerow(
                [f"{result.nmise:.10g}", f"{result.mse:.10g}", result.n_star,
                 __version__]
            )
    return 0


def _benchmark_jobs(manifest: dict) -> list[dict]:
    scenes = manifest.get("scenes", [])
    seeds = manifest.get("seeds", [])
    if not scenes or not seeds:
        raise ValueError("manifest needs non-empty 'scenes' and 'seeds' lists")
    base = dict(manifest.get("params", {}))
    size = manifest.get("size", "128x128")
    jobs = []
    for entry in scenes:
        if isinstance(entry, str):
            entry = {"scene": entry}
        if "scene" not in entry:
            raise ValueError("each manifest scene needs a 'scene' key")
        merged = dict(base)
        merged.update({k: v for k, v in entry.items() if k != "scene"})
        jobs.append(
            {"scene": entry["scene"], "size": merged.pop("size", size), "params": merged}
        )
    return [dict(job, seed=int(seed)) for job in jobs for seed in seeds]


def cmd_benchmark(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    _apply_threads(res)
    res.echo("benchmark")
    with open(args.manifest, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    jobs = _benchmark_jobs(manifest)
    header = [
        "scene", "rows", "cols", "seed", "M", "m", "kernel", "d", "H",
        "gamma_threshold", "split", "delta", "nmise_raw", "nmise", "mse",
        "version",
    ]
    rows_out = []
    by_scene: dict[str, list[float]] = {}
    for job in jobs:
        p = dict(DEFAULTS, **job["params"])
        kind, width = parse_kernel(str(p["kernel"]))
        params = FilterParams.from_sides(
            int(p["M"]), int(p["m"]), kernel=kind, kernel_h=width,
            gamma_threshold=float(p["gamma_threshold"]),
            smooth_radius_px=int(p["d"]), smooth_bandwidth=float(p["H"]),
            split=bool(p["split"]),
        )
        rows, cols = parse_size(str(job["size"]))
        truth = SceneSpec.parse(job["scene"]).render(rows, cols)
        counts = sample_poisson(truth, job["seed"]).astype(np.float64)
        report = owpnf(counts, params)
        raw = nmise(counts, truth).nmise
        result = nmise(report.output, truth)
        kernel_txt = p["kernel"]
        rows_out.append([
            job["scene"], rows, cols, job["seed"], int(p["M"]), int(p["m"]),
            kernel_txt, int(p["d"]), f"{float(p['H']):g}",
            f"{float(p['gamma_threshold']):g}",
            "on" if p["split"] else "off", f"{float(p.get('delta', 0.0)):g}",
            f"{raw:.10g}", f"{result.nmise:.10g}", f"{result.mse:.10g}",
            __version__,
        ])
        by_scene.setdefault(job["scene"], []).append(result.nmise)
        print(f"{job['scene']} seed={job['seed']} nmise={result.nmise:.6g} "
              f"(raw {raw:.6g})")
    summary = []
    for scene, values in by_scene.items():
        arr = np.array(values)
        sd = arr.std(ddof=1) if arr.size > 1 else 0.0
        summary.append([scene, "", "", "mean", "", "", "", "", "", "", "", "",
                        "", f"{arr.mean():.10g}", "", __version__])
        summary.append([scene, "", "", "stddev", "", "", "", "", "", "", "", "",
                        "", f"{sd:.10g}", "", __version__])
    with open(args.csv, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows_out)
        writer.writerows(summary)
    if args.markdown:
        lines = ["| scene | seed | nmise_raw | nmise | mse |",
                 "| --- | --- | --- | --- | --- |"]
        for row in rows_out:
            lines.append(f"| {row[0]} | {row[3]} | {row[12]} | {row[13]} | {row[14]} |")
        for row in summary:
            lines.append(f"| {row[0]} | {row[3]} |  | {row[13]} |  |")
        with open(args.markdown, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser plumbing

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key = value file; flags win over it")
    sub.add_argument("--threads", type=int,
                     help="worker threads (default: all cores, or OWPNF_THREADS)")
    sub.add_argument("--scale", type=float,
                     help="gray-level to intensity factor for PGM files")
    sub.add_argument("--maxval", type=int, choices=(255, 65535),
                     help="maxval for PGM output")


def _add_params(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--M", type=int, help="search window side (odd)")
    sub.add_argument("--m", type=int, help="patch side (odd)")
    sub.add_argument("--kernel", help="patch kernel: gauss[:h], k0 or rect")
    sub.add_argument("--d", type=int, help="smoothing radius of the second step")
    sub.add_argument("--H", type=float, help="smoothing bandwidth of the second step")
    sub.add_argument("--gamma-threshold", dest="gamma_threshold", type=float,
                     help="mean level below which the second step smooths")
    sub.add_argument("--split", action="store_const", const=True, default=None,
                     help="checkerboard-split windows and patches")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="owpnf",
        description="Optimal-weights Poisson noise filtering for low-count images",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="draw Poisson counts from a scene or image")
    p.add_argument("--scene", help="scene spec, e.g. spots, ridges, constant:4")
    p.add_argument("--size", help="ROWSxCOLS for --scene")
    p.add_argument("--image", help="intensity image to sample from (.fmat/.pgm)")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p.add_argument("--out", required=True, help="counts output (.cmat/.fmat/.pgm)")
    p.add_argument("--truth-out", help="also write the rendered intensity")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = subs.add_parser("denoise", help="two-step count-only filter")
    p.add_argument("--in", dest="infile", required=True, help="counts input")
    p.add_argument("--out", required=True, help="denoised output")
    p.add_argument("--emit-step1", help="also write the first-step image")
    p.add_argument("--truth", help="truth image; log NMISE against it")
    _add_params(p)
    _add_common(p)
    p.set_defaults(func=cmd_denoise)

    p = subs.add_parser("oracle", help="true-intensity-weighted filter")
    p.add_argument("--truth", required=True, help="true intensity image")
    p.add_argument("--counts", required=True, help="counts input")
    p.add_argument("--M", help="window side, or sweep like 7..19:2")
    p.add_argument("--delta", type=float, help="additive similarity offset")
    p.add_argument("--out", help="denoised output (single window size)")
    p.add_argument("--csv", help="sweep table output")
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    p = subs.add_parser("evaluate", help="NMISE / MSE of an estimate")
    p.add_argument("--estimate", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--csv", help="single-row metrics CSV")
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = subs.add_parser("benchmark", help="scenes x seeds from a JSON manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--csv", required=True)
    p.add_argument("--markdown", help="also write a markdown table")
    _add_common(p)
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
