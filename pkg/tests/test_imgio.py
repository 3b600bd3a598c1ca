"""Text matrix formats and binary PGM."""

import math

import numpy as np
import pytest

from owpnf.imgio import (
    load_counts,
    load_intensity,
    read_cmat,
    read_fmat,
    read_pgm,
    save_image,
    write_cmat,
    write_fmat,
    write_pgm,
)


def awkward_doubles():
    return np.array(
        [
            [0.1, 1 / 3, math.pi],
            [1e-300, 1e300, 5e-324],
            [np.nextafter(1.0, 2.0), -0.0, 123456789.123456789],
        ]
    )


class TestFmat:
    def test_round_trip_is_bit_exact(self, tmp_path):
        path = tmp_path / "m.fmat"
        arr = awkward_doubles()
        write_fmat(path, arr)
        back = read_fmat(path)
        np.testing.assert_array_equal(back, arr)

    def test_header_and_layout(self, tmp_path):
        path = tmp_path / "m.fmat"
        write_fmat(path, np.array([[1.5, 2.0], [3.0, 4.0]]))
        text = path.read_text()
        lines = text.splitlines()
        assert lines[0] == "FMAT 2 2"
        assert lines[1].split() == ["1.5", "2"]
        assert text.endswith("\n")

    def test_rewrites_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.fmat", tmp_path / "b.fmat"
        arr = awkward_doubles()
        write_fmat(a, arr)
        write_fmat(b, arr)
        assert a.read_bytes() == b.read_bytes()

    def test_non_finite_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_fmat(tmp_path / "x.fmat", np.array([[np.inf]]))

    def test_non_2d_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_fmat(tmp_path / "x.fmat", np.ones(3))

    def test_wrong_magic_rejected(self, tmp_path):
        path = tmp_path / "x.fmat"
        path.write_text("XMAT 1 1\n0\n")
        with pytest.raises(ValueError, match="not a FMAT"):
            read_fmat(path)

    def test_value_count_mismatch_rejected(self, tmp_path):
        path = tmp_path / "x.fmat"
        path.write_text("FMAT 2 2\n1 2 3\n")
        with pytest.raises(ValueError, match="expected 4 values"):
            read_fmat(path)

    def test_bad_dimensions_rejected(self, tmp_path):
        path = tmp_path / "x.fmat"
        path.write_text("FMAT 0 3\n")
        with pytest.raises(ValueError, match="bad dimensions"):
            read_fmat(path)

    def test_unparseable_value_rejected(self, tmp_path):
        path = tmp_path / "x.fmat"
        path.write_text("FMAT 1 2\n1.0 xyz\n")
        with pytest.raises(ValueError, match="bad value"):
            read_fmat(path)


class TestCmat:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "c.cmat"
        arr = np.array([[0, 3], [41, 7]])
        write_cmat(path, arr)
        back = read_cmat(path)
        assert back.dtype == np.int64
        np.testing.assert_array_equal(back, arr)

    def test_header(self, tmp_path):
        path = tmp_path / "c.cmat"
        write_cmat(path, np.array([[5]]))
        assert path.read_text() == "CMAT 1 1\n5\n"

    def test_integer_valued_floats_accepted(self, tmp_path):
        path = tmp_path / "c.cmat"
        write_cmat(path, np.array([[2.0, 3.0]]))
        np.testing.assert_array_equal(read_cmat(path), [[2, 3]])

    def test_fractional_write_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="integers"):
            write_cmat(tmp_path / "c.cmat", np.array([[1.5]]))

    def test_fractional_file_rejected(self, tmp_path):
        path = tmp_path / "c.cmat"
        path.write_text("CMAT 1 1\n2.5\n")
        with pytest.raises(ValueError, match="non-integer"):
            read_cmat(path)


class TestPgm:
    def test_eight_bit_round_trip(self, tmp_path):
        path = tmp_path / "g.pgm"
        gray = np.array([[0, 128], [255, 7]])
        write_pgm(path, gray)
        back, maxval = read_pgm(path)
        assert maxval == 255
        np.testing.assert_array_equal(back, gray)

    def test_sixteen_bit_round_trip(self, tmp_path):
        path = tmp_path / "g.pgm"
        gray = np.array([[0, 256], [65535, 300]])
        write_pgm(path, gray, maxval=65535)
        back, maxval = read_pgm(path)
        assert maxval == 65535
        np.testing.assert_array_equal(back, gray)

    def test_sixteen_bit_raster_is_big_endian(self, tmp_path):
        path = tmp_path / "g.pgm"
        write_pgm(path, np.array([[256]]), maxval=65535)
        raw = path.read_bytes()
        assert raw.endswith(b"\x01\x00")

    def test_header_comments_are_skipped(self, tmp_path):
        path = tmp_path / "g.pgm"
        path.write_bytes(b"P5\n# a comment\n2 1\n# another\n255\n\x05\x09")
        gray, maxval = read_pgm(path)
        np.testing.assert_array_equal(gray, [[5, 9]])
        assert maxval == 255

    def test_truncated_raster_rejected(self, tmp_path):
        path = tmp_path / "g.pgm"
        path.write_bytes(b"P5\n2 2\n255\n\x00\x00\x00")
        with pytest.raises(ValueError, match="truncated"):
            read_pgm(path)

    def test_ascii_variant_rejected(self, tmp_path):
        path = tmp_path / "g.pgm"
        path.write_bytes(b"P2\n1 1\n255\n0\n")
        with pytest.raises(ValueError, match="P5"):
            read_pgm(path)

    @pytest.mark.parametrize("maxval", [0, 16, 1023])
    def test_odd_maxval_rejected(self, tmp_path, maxval):
        path = tmp_path / "g.pgm"
        path.write_bytes(f"P5\n1 1\n{maxval}\n\x00".encode())
        with pytest.raises(ValueError, match="maxval"):
            read_pgm(path)
        with pytest.raises(ValueError, match="maxval"):
            write_pgm(path, np.array([[0]]), maxval=maxval)

    def test_out_of_range_gray_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="range"):
            write_pgm(tmp_path / "g.pgm", np.array([[300]]), maxval=255)


class TestDispatch:
    def test_intensity_from_fmat(self, tmp_path):
        path = tmp_path / "f.fmat"
        write_fmat(path, np.array([[1.25]]))
        np.testing.assert_array_equal(load_intensity(path), [[1.25]])

    def test_intensity_from_pgm_applies_scale(self, tmp_path):
        path = tmp_path / "f.pgm"
        write_pgm(path, np.array([[10, 200]]))
        np.testing.assert_allclose(load_intensity(path, scale=0.05), [[0.5, 10.0]])

    def test_counts_from_cmat(self, tmp_path):
        path = tmp_path / "y.cmat"
        write_cmat(path, np.array([[3, 0]]))
        np.testing.assert_array_equal(load_counts(path), [[3, 0]])

    def test_counts_from_integer_fmat(self, tmp_path):
        path = tmp_path / "y.fmat"
        write_fmat(path, np.array([[4.0, 9.0]]))
        out = load_counts(path)
        assert out.dtype == np.int64
        np.testing.assert_array_equal(out, [[4, 9]])

    def test_counts_from_fractional_fmat_rejected(self, tmp_path):
        path = tmp_path / "y.fmat"
        write_fmat(path, np.array([[4.5]]))
        with pytest.raises(ValueError, match="integers"):
            load_counts(path)

    def test_negative_count_names_the_pixel(self, tmp_path):
        path = tmp_path / "y.cmat"
        path.write_text("CMAT 2 2\n0 1\n2 -3\n")
        with pytest.raises(ValueError, match=r"\(1, 1\)"):
            load_counts(path)

    def test_save_dispatches_on_extension(self, tmp_path):
        arr = np.array([[2.0, 6.0]])
        save_image(tmp_path / "o.fmat", arr)
        np.testing.assert_array_equal(read_fmat(tmp_path / "o.fmat"), arr)
        save_image(tmp_path / "o.cmat", arr)
        np.testing.assert_array_equal(read_cmat(tmp_path / "o.cmat"), [[2, 6]])
        save_image(tmp_path / "o.pgm", arr, scale=2.0)
        gray, _ = read_pgm(tmp_path / "o.pgm")
        np.testing.assert_array_equal(gray, [[1, 3]])

    def test_pgm_save_rounds_and_clips(self, tmp_path):
        save_image(tmp_path / "o.pgm", np.array([[0.4, 0.6, 900.0]]))
        gray, _ = read_pgm(tmp_path / "o.pgm")
        np.testing.assert_array_equal(gray, [[0, 1, 255]])

    def test_unknown_extension_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="cannot save"):
            save_image(tmp_path / "o.tiff", np.ones((1, 1)))
        with pytest.raises(ValueError, match="cannot load"):
            load_intensity(tmp_path / "o.tiff")
        with pytest.raises(ValueError, match="cannot load"):
            load_counts(tmp_path / "o.xyz")

    def test_missing_file_raises_oserror(self, tmp_path):
        with pytest.raises(OSError):
            load_intensity(tmp_path / "absent.fmat")
