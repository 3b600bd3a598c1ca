"""Command line: flows, option resolution, reproducibility, error exits."""

import json
import subprocess
import sys

import numpy as np
import pytest

from owpnf import __version__
from owpnf.cli import (
    main,
    parse_kernel,
    parse_size,
    parse_window_sweep,
    read_config,
)
from owpnf.imgio import read_cmat, read_fmat, write_fmat, write_pgm


def echo_line(capsys):
    out = capsys.readouterr().out
    for line in out.splitlines():
        if line.startswith("owpnf "):
            return line
    raise AssertionError(f"no echo line in output:\n{out}")


class TestParsers:
    def test_kernel_forms(self):
        assert parse_kernel("k0") == ("k0", 1.0)
        assert parse_kernel("rect") == ("rect", 1.0)
        assert parse_kernel("gauss") == ("gauss", 1.0)
        assert parse_kernel("gauss:2.5") == ("gauss", 2.5)

    def test_kernel_errors(self):
        with pytest.raises(ValueError):
            parse_kernel("k0:3")
        with pytest.raises(ValueError):
            parse_kernel("box")

    def test_size_forms(self):
        assert parse_size("64") == (64, 64)
        assert parse_size("48x64") == (48, 64)
        assert parse_size("48X64") == (48, 64)

    def test_size_errors(self):
        with pytest.raises(ValueError):
            parse_size("0x5")
        with pytest.raises(ValueError):
            parse_size("4x5x6")

    def test_window_sweep_forms(self):
        assert parse_window_sweep("19") == [19]
        assert parse_window_sweep("7..13") == [7, 9, 11, 13]
        assert parse_window_sweep("7..19:4") == [7, 11, 15, 19]

    def test_window_sweep_errors(self):
        with pytest.raises(ValueError):
            parse_window_sweep("19..7")
        with pytest.raises(ValueError):
            parse_window_sweep("7..9:0")

    def test_read_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\nM = 11\n\ngamma-threshold = 4\n")
        assert read_config(cfg) == {"M": "11", "gamma_threshold": "4"}

    def test_read_config_rejects_bare_words(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("verbose\n")
        with pytest.raises(ValueError, match="key = value"):
            read_config(cfg)


class TestSimulate:
    def test_constant_scene_counts(self, tmp_path, capsys):
        out = tmp_path / "y.cmat"
        rc = main(["simulate", "--scene", "constant:4", "--size", "64",
                   "--seed", "7", "--out", str(out)])
        assert rc == 0
        counts = read_cmat(out)
        assert counts.shape == (64, 64)
        assert abs(counts.mean() - 4.0) < 0.2
        line = echo_line(capsys)
        assert "seed=7" in line and "scene=constant:4" in line

    def test_rerun_writes_identical_bytes(self, tmp_path):
        a, b = tmp_path / "a.cmat", tmp_path / "b.cmat"
        argv = ["simulate", "--scene", "spots", "--size", "32", "--seed", "1"]
        main(argv + ["--out", str(a)])
        main(argv + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_truth_out(self, tmp_path):
        out = tmp_path / "y.cmat"
        truth = tmp_path / "f.fmat"
        main(["simulate", "--scene", "gradient:0.1:3", "--size", "8x16",
              "--seed", "0", "--out", str(out), "--truth-out", str(truth)])
        f = read_fmat(truth)
        assert f.shape == (8, 16)
        assert f[0, 0] == pytest.approx(0.1)

    def test_from_intensity_image_with_scale(self, tmp_path):
        src = tmp_path / "f.pgm"
        write_pgm(src, np.full((6, 6), 40))
        out = tmp_path / "y.cmat"
        rc = main(["simulate", "--image", str(src), "--scale", "0.1",
                   "--seed", "2", "--out", str(out)])
        assert rc == 0
        counts = read_cmat(out)  # intensity 4.0 everywhere
        assert 2.0 < counts.mean() < 6.0

    def test_scene_and_image_together_fail(self, tmp_path, capsys):
        rc = main(["simulate", "--scene", "spots", "--size", "8",
                   "--image", "x.fmat", "--out", str(tmp_path / "y.cmat")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_scene_without_size_fails(self, tmp_path, capsys):
        rc = main(["simulate", "--scene", "spots", "--out", str(tmp_path / "y.cmat")])
        assert rc == 1
        assert "--size" in capsys.readouterr().err

    def test_bad_scene_spec_fails(self, tmp_path, capsys):
        rc = main(["simulate", "--scene", "blob", "--size", "8",
                   "--out", str(tmp_path / "y.cmat")])
        assert rc == 1
        assert "unknown scene" in capsys.readouterr().err


@pytest.fixture()
def spots_files(tmp_path):
    """A small simulated scene: (counts path, truth path)."""
    counts = tmp_path / "y.cmat"
    truth = tmp_path / "f.fmat"
    rc = main(["simulate", "--scene", "spots:0.1:4:0.05", "--size", "24",
               "--seed", "5", "--out", str(counts), "--truth-out", str(truth)])
    assert rc == 0
    return counts, truth


class TestDenoise:
    def test_basic_run_logs_nmise(self, spots_files, tmp_path, capsys):
        counts, truth = spots_files
        out = tmp_path / "est.fmat"
        rc = main(["denoise", "--in", str(counts), "--out", str(out),
                   "--M", "7", "--m", "3", "--truth", str(truth)])
        assert rc == 0
        est = read_fmat(out)
        assert est.shape == (24, 24)
        assert np.all(np.isfinite(est))
        assert "nmise raw=" in capsys.readouterr().out

    def test_zero_smoothing_radius_reproduces_step_one(self, spots_files, tmp_path):
        counts, _ = spots_files
        out = tmp_path / "est.fmat"
        step1 = tmp_path / "step1.fmat"
        main(["denoise", "--in", str(counts), "--out", str(out),
              "--M", "7", "--m", "3", "--d", "0", "--emit-step1", str(step1)])
        assert out.read_bytes() == step1.read_bytes()

    def test_single_pixel_window_with_no_smoothing_is_identity(
        self, spots_files, tmp_path
    ):
        counts, _ = spots_files
        out = tmp_path / "est.fmat"
        main(["denoise", "--in", str(counts), "--out", str(out),
              "--M", "1", "--m", "3", "--d", "0"])
        np.testing.assert_array_equal(read_fmat(out), read_cmat(counts))

    def test_even_window_side_fails(self, spots_files, tmp_path, capsys):
        counts, _ = spots_files
        rc = main(["denoise", "--in", str(counts), "--out",
                   str(tmp_path / "e.fmat"), "--M", "8"])
        assert rc == 1
        assert "odd" in capsys.readouterr().err

    def test_missing_input_fails(self, tmp_path, capsys):
        rc = main(["denoise", "--in", str(tmp_path / "absent.cmat"),
                   "--out", str(tmp_path / "e.fmat")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestOracle:
    def test_single_window(self, spots_files, tmp_path, capsys):
        counts, truth = spots_files
        out = tmp_path / "est.fmat"
        rc = main(["oracle", "--truth", str(truth), "--counts", str(counts),
                   "--M", "7", "--out", str(out)])
        assert rc == 0
        assert "M=7x7 nmise=" in capsys.readouterr().out
        assert read_fmat(out).shape == (24, 24)

    def test_window_sweep_writes_a_table(self, spots_files, tmp_path):
        counts, truth = spots_files
        csv_path = tmp_path / "sweep.csv"
        rc = main(["oracle", "--truth", str(truth), "--counts", str(counts),
                   "--M", "3..7:2", "--csv", str(csv_path)])
        assert rc == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "M,nmise,mse"
        assert [ln.split(",")[0] for ln in lines[1:]] == ["3", "5", "7"]
        assert all(float(ln.split(",")[1]) >= 0 for ln in lines[1:])

    def test_sweep_without_csv_fails(self, spots_files, tmp_path, capsys):
        counts, truth = spots_files
        rc = main(["oracle", "--truth", str(truth), "--counts", str(counts),
                   "--M", "3..7"])
        assert rc == 1
        assert "--csv" in capsys.readouterr().err

    def test_window_side_from_config_file(self, spots_files, tmp_path, capsys):
        counts, truth = spots_files
        cfg = tmp_path / "run.cfg"
        cfg.write_text("M = 5\n")
        rc = main(["oracle", "--truth", str(truth), "--counts", str(counts),
                   "--config", str(cfg)])
        assert rc == 0
        assert "M=5x5" in capsys.readouterr().out

    def test_shape_mismatch_fails(self, spots_files, tmp_path, capsys):
        counts, _ = spots_files
        other = tmp_path / "other.fmat"
        write_fmat(other, np.ones((4, 4)))
        rc = main(["oracle", "--truth", str(other), "--counts", str(counts)])
        assert rc == 1
        assert "does not match" in capsys.readouterr().err


class TestEvaluate:
    def test_identical_files_score_zero(self, spots_files, tmp_path, capsys):
        _, truth = spots_files
        rc = main(["evaluate", "--estimate", str(truth), "--truth", str(truth)])
        assert rc == 0
        assert "nmise=0 " in capsys.readouterr().out

    def test_csv_row_records_the_version(self, spots_files, tmp_path):
        counts, truth = spots_files
        csv_path = tmp_path / "m.csv"
        main(["evaluate", "--estimate", str(counts), "--truth", str(truth),
              "--csv", str(csv_path)])
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "nmise,mse,n_star,version"
        assert lines[1].endswith(__version__)

    def test_dimension_mismatch_fails(self, spots_files, tmp_path, capsys):
        _, truth = spots_files
        small = tmp_path / "small.fmat"
        write_fmat(small, np.ones((3, 3)))
        rc = main(["evaluate", "--estimate", str(small), "--truth", str(truth)])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestBenchmark:
    def manifest(self, tmp_path, **extra):
        body = {
            "scenes": ["constant:4", {"scene": "gradient:0.1:3", "M": 7}],
            "seeds": [1, 2],
            "size": "24x24",
            "params": {"M": 9, "m": 5, "d": 1},
        }
        body.update(extra)
        path = tmp_path / "bench.json"
        path.write_text(json.dumps(body))
        return path

    def test_scenes_by_seeds_with_summary(self, tmp_path):
        csv_path = tmp_path / "bench.csv"
        rc = main(["benchmark", "--manifest", str(self.manifest(tmp_path)),
                   "--csv", str(csv_path)])
        assert rc == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0].startswith("scene,rows,cols,seed,")
        assert len(lines) == 1 + 4 + 4  # header, 2x2 jobs, mean+stddev per scene
        assert sum(",mean," in ln for ln in lines) == 2
        assert sum(",stddev," in ln for ln in lines) == 2

    def test_rerun_is_byte_identical(self, tmp_path):
        m = self.manifest(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["benchmark", "--manifest", str(m), "--csv", str(a)])
        main(["benchmark", "--manifest", str(m), "--csv", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_markdown_rendering(self, tmp_path):
        md = tmp_path / "bench.md"
        main(["benchmark", "--manifest", str(self.manifest(tmp_path)),
              "--csv", str(tmp_path / "b.csv"), "--markdown", str(md)])
        text = md.read_text()
        assert text.startswith("| scene | seed |")
        assert "| constant:4 | mean |" in text

    def test_empty_manifest_fails(self, tmp_path, capsys):
        rc = main(["benchmark", "--manifest", str(self.manifest(tmp_path, scenes=[])),
                   "--csv", str(tmp_path / "b.csv")])
        assert rc == 1
        assert "non-empty" in capsys.readouterr().err

    def test_malformed_json_fails(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        rc = main(["benchmark", "--manifest", str(bad), "--csv", str(tmp_path / "b.csv")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestOptionResolution:
    def test_flag_beats_config_beats_default(self, spots_files, tmp_path, capsys):
        counts, _ = spots_files
        cfg = tmp_path / "run.cfg"
        cfg.write_text("M = 11\nm = 5\n")
        out = tmp_path / "e.fmat"

        main(["denoise", "--in", str(counts), "--out", str(out),
              "--config", str(cfg), "--M", "7"])
        line = echo_line(capsys)
        assert "M=7" in line and "m=5" in line  # flag wins, config fills

        main(["denoise", "--in", str(counts), "--out", str(out),
              "--config", str(cfg)])
        assert "M=11" in echo_line(capsys)

        main(["denoise", "--in", str(counts), "--out", str(out), "--m", "3"])
        line = echo_line(capsys)
        assert "M=15" in line and "kernel=k0" in line  # defaults

    def test_threads_env_fallback(self, spots_files, tmp_path, capsys, monkeypatch):
        counts, _ = spots_files
        out = tmp_path / "e.fmat"
        base = ["denoise", "--in", str(counts), "--out", str(out), "--M", "5", "--m", "3"]

        monkeypatch.delenv("OWPNF_THREADS", raising=False)
        main(base)
        assert "threads=auto" in echo_line(capsys)

        monkeypatch.setenv("OWPNF_THREADS", "3")
        main(base)
        assert "threads=3" in echo_line(capsys)

        main(base + ["--threads", "2"])
        assert "threads=2" in echo_line(capsys)

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "owpnf", "--version"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == __version__
