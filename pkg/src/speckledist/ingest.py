"""Image loading, inverse log transform, ROI extraction, RMS normalization.

Device B-scans store log-compressed intensity; the pipeline undoes that
compression (decade-exponential with a configurable dynamic range), pulls
the pixels of a rectangular ROI in row-major order, and rescales the values
to unit root mean square.  Any multiplicative calibration constant cancels
under the RMS normalization, so only the exponent slope matters.
"""

from __future__ import annotations

import io
import re
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DataError
from .types import AmplitudeSample, PixelMatrix, RoiSpec

IMAGE_FORMATS = ("grayscale-png-8", "grayscale-png-16", "pgm", "csv-matrix")

DEFAULT_DYNAMIC_RANGE = 2.0

_PNG_8_MODES = ("L",)
_PNG_16_MODES = ("I;16", "I;16B", "I;16L", "I")


def _infer_format(path: Path) -> str | None:
    suffix = path.suffix.lower()
    if suffix == ".png":
        return "png"  # 8 vs 16 resolved from the file itself
    if suffix == ".pgm":
        return "pgm"
    if suffix in (".csv", ".txt"):
        return "csv-matrix"
    return None


def _load_png(path: Path, expected: str | None) -> PixelMatrix:
    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            if mode in _PNG_8_MODES:
                depth, fmt = 255.0, "grayscale-png-8"
            elif mode in _PNG_16_MODES:
                depth, fmt = 65535.0, "grayscale-png-16"
            else:
                raise DataError(f"non-grayscale input: PNG mode {mode!r} in {path}")
            values = np.asarray(img, dtype=np.float64)
    except UnidentifiedImageError as exc:
        raise DataError(f"corrupt image: {path}") from exc
    except (OSError, SyntaxError) as exc:
        raise DataError(f"corrupt image: {path}: {exc}") from exc
    if expected is not None and expected != fmt:
        raise DataError(f"{path} is {fmt}, not the declared {expected}")
    return PixelMatrix(values, depth)


def _load_pgm(path: Path) -> PixelMatrix:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DataError(f"unreadable file: {path}: {exc}") from exc
    # header = magic, width, height, maxval, with '#' comments allowed
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4 and pos < len(raw):
        m = re.compile(rb"\s*(#[^\n]*\n|\S+)").match(raw, pos)
        if m is None:
            break
        pos = m.end()
        tok = m.group(1)
        if not tok.startswith(b"#"):
            tokens.append(tok)
    if len(tokens) < 4:
        raise DataError(f"corrupt image: truncated PGM header in {path}")
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise DataError(f"{path} is not a PGM file (magic {magic!r})")
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise DataError(f"corrupt image: bad PGM header in {path}") from exc
    if width < 1 or height < 1 or not (0 < maxval < 65536):
        raise DataError(f"corrupt image: bad PGM dimensions in {path}")

    count = width * height
    if magic == b"P5":
        body = raw[pos + 1 :] if pos < len(raw) else b""  # single whitespace after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        expected = count * dtype.itemsize
        if len(body) < expected:
            raise DataError(f"corrupt image: truncated PGM data in {path}")
        values = np.frombuffer(body[:expected], dtype=dtype).astype(np.float64)
    else:
        try:
            values = np.loadtxt(io.BytesIO(raw[pos:]), dtype=np.float64).ravel()
        except ValueError as exc:
            raise DataError(f"corrupt image: bad PGM data in {path}") from exc
        if values.size != count:
            raise DataError(
                f"dimension mismatch: PGM declares {count} pixels, found {values.size} in {path}"
            )
    if np.any(values > maxval):
        raise DataError(f"corrupt image: PGM values exceed maxval in {path}")
    return PixelMatrix(values.reshape(height, width), float(maxval))


def _load_csv_matrix(path: Path) -> PixelMatrix:
    try:
        values = np.loadtxt(path, delimiter=",", comments="#", ndmin=2, dtype=np.float64)
    except OSError as exc:
        raise DataError(f"unreadable file: {path}: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"corrupt image: cannot parse CSV matrix {path}: {exc}") from exc
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise DataError(f"CSV matrix {path} must contain finite nonnegative values")
    depth = float(values.max())
    if depth <= 0:
        raise DataError(f"CSV matrix {path} is all zero; no usable bit depth")
    return PixelMatrix(values, depth)


def load_image(path, image_format: str | None = None) -> PixelMatrix:
    """Load a grayscale image as a PixelMatrix with its bit-depth maximum.

    Formats: 8/16-bit grayscale PNG, ASCII/binary PGM, and comma-separated
    numeric matrices (depth = observed maximum).  The format is inferred
    from the extension when not given explicitly.
    """
    path = Path(path)
    if image_format is not None and image_format not in IMAGE_FORMATS:
        raise ValueError(
            f"unknown image format {image_format!r}; expected one of {IMAGE_FORMATS}"
        )
    if not path.is_file():
        raise DataError(f"unreadable file: {path} does not exist")

    if image_format in ("grayscale-png-8", "grayscale-png-16"):
        return _load_png(path, image_format)
    if image_format == "pgm":
        return _load_pgm(path)
    if image_format == "csv-matrix":
        return _load_csv_matrix(path)

    inferred = _infer_format(path)
    if inferred == "png":
        return _load_png(path, None)
    if inferred == "pgm":
        return _load_pgm(path)
    if inferred == "csv-matrix":
        return _load_csv_matrix(path)
    raise DataError(f"cannot infer image format of {path}; pass image_format explicitly")


def inverse_log_transform(
    pixels: PixelMatrix, dynamic_range_decades: float = DEFAULT_DYNAMIC_RANGE
) -> PixelMatrix:
    """Undo the acquisition log compression: amplitude = 10**(p/p_max * d).

    Monotone in p, with p=0 mapping to amplitude 1 and p=p_max to 10**d.
    """
    if not (dynamic_range_decades > 0):
        raise ValueError("dynamic range must be a positive number of decades")
    amplitudes = np.power(10.0, pixels.values / pixels.depth * dynamic_range_decades)
    return PixelMatrix(amplitudes, 10.0**dynamic_range_decades)


def extract_roi(pixels: PixelMatrix, roi: RoiSpec) -> AmplitudeSample:
    """Pixels of `roi` flattened row-major into an unnormalized sample."""
    rows, cols = pixels.shape
    if roi.x0 + roi.width > cols or roi.y0 + roi.height > rows:
        raise DataError(
            f"ROI {roi} exceeds image bounds ({cols}x{rows} pixels)"
        )
    block = pixels.values[roi.y0 : roi.y0 + roi.height, roi.x0 : roi.x0 + roi.width]
    return AmplitudeSample(block.ravel(order="C").copy(), normalized=False)


def normalize_rms(sample: AmplitudeSample) -> AmplitudeSample:
    """Divide by the root mean square so the normalized mean square is 1.

    Idempotent and scale-invariant; rejects all-zero input.
    """
    values = sample.values
    rms = float(np.sqrt(np.mean(values * values)))
    if rms == 0.0:
        raise DataError("cannot normalize an all-zero sample")
    return AmplitudeSample(values / rms, normalized=True)
