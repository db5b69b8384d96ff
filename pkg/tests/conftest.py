"""Shared fixtures and synthetic-input builders."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")


def write_pgm_binary(path, matrix: np.ndarray, maxval: int = 255) -> None:
    matrix = np.asarray(matrix)
    h, w = matrix.shape
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    path.write_bytes(header + matrix.astype(dtype).tobytes())


def write_pgm_ascii(path, matrix: np.ndarray, maxval: int = 255) -> None:
    matrix = np.asarray(matrix)
    h, w = matrix.shape
    rows = "\n".join(" ".join(str(int(v)) for v in row) for row in matrix)
    path.write_text(f"P2\n# test image\n{w} {h}\n{maxval}\n{rows}\n")


def write_log_image_csv(path, amplitudes: np.ndarray) -> float:
    """Store strictly positive amplitudes as a log-compressed CSV image.

    Pixel values are log10(a / a_min) >= 0, so the CSV depth (observed max)
    equals the dynamic range in decades; inverting with that dynamic range
    recovers the amplitudes up to one global scale factor, which the RMS
    normalization cancels.  Returns the decades to pass to --dynamic-range.
    """
    amplitudes = np.asarray(amplitudes, dtype=np.float64)
    assert np.all(amplitudes > 0)
    q = np.log10(amplitudes / amplitudes.min())
    decades = float(q.max())
    lines = [",".join(repr(float(v)) for v in row) for row in q]
    path.write_text("\n".join(lines) + "\n")
    return decades


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
