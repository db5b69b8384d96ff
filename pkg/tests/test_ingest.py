import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from PIL import Image

from speckledist import (
    AmplitudeSample,
    DataError,
    PixelMatrix,
    RAYLEIGH_SIGMA,
    RoiSpec,
    extract_roi,
    inverse_log_transform,
    load_image,
    mle_fit,
    normalize_rms,
    sample_rayleigh,
)
from conftest import write_pgm_ascii, write_pgm_binary


class TestLoadImage:
    def test_pgm_binary(self, tmp_path):
        path = tmp_path / "img.pgm"
        write_pgm_binary(path, np.array([[0, 128], [255, 64]]), maxval=255)
        pm = load_image(path)
        assert np.array_equal(pm.values, [[0, 128], [255, 64]])
        assert pm.depth == 255

    def test_pgm_ascii(self, tmp_path):
        path = tmp_path / "img.pgm"
        write_pgm_ascii(path, np.array([[0, 128], [255, 64]]), maxval=255)
        pm = load_image(path, "pgm")
        assert np.array_equal(pm.values, [[0, 128], [255, 64]])
        assert pm.depth == 255

    def test_pgm_16bit(self, tmp_path):
        path = tmp_path / "img.pgm"
        write_pgm_binary(path, np.array([[0, 60000], [1234, 65535]]), maxval=65535)
        pm = load_image(path)
        assert np.array_equal(pm.values, [[0, 60000], [1234, 65535]])
        assert pm.depth == 65535

    def test_pgm_truncated(self, tmp_path):
        path = tmp_path / "img.pgm"
        write_pgm_binary(path, np.array([[0, 128], [255, 64]]), maxval=255)
        path.write_bytes(path.read_bytes()[:-2])
        with pytest.raises(DataError, match="corrupt image"):
            load_image(path)

    def test_pgm_ascii_count_mismatch(self, tmp_path):
        path = tmp_path / "img.pgm"
        path.write_text("P2\n2 2\n255\n1 2 3\n")
        with pytest.raises(DataError, match="dimension mismatch"):
            load_image(path)

    def test_csv_matrix(self, tmp_path):
        path = tmp_path / "img.csv"
        path.write_text("1,2\n3,4\n")
        pm = load_image(path)
        assert np.array_equal(pm.values, [[1, 2], [3, 4]])
        assert pm.depth == 4

    def test_csv_rejects_negative(self, tmp_path):
        path = tmp_path / "img.csv"
        path.write_text("1,-2\n3,4\n")
        with pytest.raises(DataError):
            load_image(path)

    def test_png_8bit_roundtrip(self, tmp_path):
        path = tmp_path / "img.png"
        data = np.array([[0, 128], [255, 64]], dtype=np.uint8)
        Image.fromarray(data, mode="L").save(path)
        pm = load_image(path)
        assert np.array_equal(pm.values, data)
        assert pm.depth == 255

    def test_png_16bit_roundtrip(self, tmp_path):
        path = tmp_path / "img16.png"
        data = np.array([[0, 40000], [65535, 7]], dtype=np.uint16)
        Image.fromarray(data).save(path)  # uint16 maps to 16-bit grayscale
        pm = load_image(path, "grayscale-png-16")
        assert np.array_equal(pm.values, data)
        assert pm.depth == 65535

    def test_png_truncated(self, tmp_path):
        path = tmp_path / "img.png"
        data = np.zeros((64, 64), dtype=np.uint8)
        Image.fromarray(data, mode="L").save(path)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) // 2])
        with pytest.raises(DataError, match="corrupt image"):
            load_image(path)

    def test_png_non_grayscale(self, tmp_path):
        path = tmp_path / "rgb.png"
        Image.fromarray(np.zeros((4, 4, 3), dtype=np.uint8), mode="RGB").save(path)
        with pytest.raises(DataError, match="non-grayscale"):
            load_image(path)

    def test_png_declared_depth_mismatch(self, tmp_path):
        path = tmp_path / "img.png"
        Image.fromarray(np.zeros((4, 4), dtype=np.uint8), mode="L").save(path)
        with pytest.raises(DataError):
            load_image(path, "grayscale-png-16")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="unreadable"):
            load_image(tmp_path / "nope.pgm")

    def test_unknown_format(self, tmp_path):
        path = tmp_path / "img.dat"
        path.write_text("junk")
        with pytest.raises(DataError):
            load_image(path)
        with pytest.raises(ValueError):
            load_image(path, "tiff")


class TestInverseLogTransform:
    def test_endpoints(self):
        pm = PixelMatrix(np.array([[0.0, 255.0], [127.5, 255.0]]), depth=255)
        out = inverse_log_transform(pm, 2.0)
        assert out.values[0, 0] == 1.0
        assert out.values[0, 1] == pytest.approx(100.0, rel=1e-12)
        assert out.values[1, 0] == pytest.approx(10.0, rel=1e-12)

    def test_monotone(self, rng):
        pm = PixelMatrix(rng.integers(0, 256, size=(20, 20)).astype(float), depth=255)
        out = inverse_log_transform(pm, 2.0)
        flat_p = pm.values.ravel()
        flat_a = out.values.ravel()
        order = np.argsort(flat_p)
        assert np.all(np.diff(flat_a[order]) >= 0)

    def test_rejects_nonpositive_range(self):
        pm = PixelMatrix(np.ones((2, 2)), depth=255)
        with pytest.raises(ValueError):
            inverse_log_transform(pm, 0.0)


class TestExtractRoi:
    def test_central_block(self):
        pm = PixelMatrix(np.arange(16, dtype=float).reshape(4, 4) + 1.0, depth=16)
        s = extract_roi(pm, RoiSpec(1, 1, 2, 2))
        assert np.array_equal(s.values, [6.0, 7.0, 10.0, 11.0])  # row-major
        assert not s.normalized

    def test_full_image(self):
        pm = PixelMatrix(np.arange(12, dtype=float).reshape(3, 4) + 1.0, depth=12)
        s = extract_roi(pm, RoiSpec(0, 0, 4, 3))
        assert np.array_equal(s.values, np.arange(12, dtype=float) + 1.0)

    def test_out_of_bounds(self):
        pm = PixelMatrix(np.ones((1, 4)), depth=1)
        with pytest.raises(DataError, match="bounds"):
            extract_roi(pm, RoiSpec(3, 0, 2, 1))

    def test_multiset_preserved(self, rng):
        pm = PixelMatrix(rng.random((30, 40)) + 0.1, depth=2.0)
        roi = RoiSpec(5, 7, 21, 13)
        s = extract_roi(pm, roi)
        direct_sum = 0.0
        direct_sq = 0.0
        for r in range(roi.y0, roi.y0 + roi.height):
            for c in range(roi.x0, roi.x0 + roi.width):
                direct_sum += pm.values[r, c]
                direct_sq += pm.values[r, c] ** 2
        assert float(s.values.sum()) == pytest.approx(direct_sum, rel=1e-12)
        assert float((s.values**2).sum()) == pytest.approx(direct_sq, rel=1e-12)


class TestNormalizeRms:
    def test_hand_values(self):
        out = normalize_rms(AmplitudeSample([3.0, 4.0]))
        assert out.normalized
        assert out.values[0] == pytest.approx(0.848528, abs=1e-6)
        assert out.values[1] == pytest.approx(1.131371, abs=1e-6)

    def test_constant_becomes_ones(self):
        out = normalize_rms(AmplitudeSample([2.5, 2.5, 2.5]))
        assert np.array_equal(out.values, np.ones(3))

    def test_idempotent(self):
        s = normalize_rms(sample_rayleigh(1000, 0.4, seed=1))
        again = normalize_rms(s)
        assert np.allclose(again.values, s.values, rtol=1e-12, atol=0)

    @given(st.floats(min_value=0.001, max_value=1000.0))
    def test_scale_invariant(self, k):
        values = np.array([0.5, 1.25, 2.0, 0.75])
        a = normalize_rms(AmplitudeSample(values))
        b = normalize_rms(AmplitudeSample(values * k))
        assert np.allclose(a.values, b.values, rtol=1e-12, atol=0)

    def test_all_zero_rejected(self):
        with pytest.raises(DataError):
            normalize_rms(AmplitudeSample([0.0, 0.0]))

    def test_rayleigh_mle_lands_on_constant(self):
        # cross-module: the Rayleigh MLE of any normalized sample is sqrt(2)/2
        s = normalize_rms(sample_rayleigh(5000, 1.7, seed=2))
        assert abs(mle_fit("rayleigh", s).params["sigma"] - RAYLEIGH_SIGMA) < 1e-12
