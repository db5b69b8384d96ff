"""Command-line interface.

Subcommands: simulate | distances | fit | batch | roi-sweep | correlate.
Outputs are machine-readable (JSON by default, CSV on request) and embed the
resolved configuration plus toolkit version, so a rerun with the same flags
reproduces the output byte for byte.  A `key=value` config file may stand in
for flags; explicit flags win.

Exit codes: 0 success, 1 usage error, 2 data error, 3 partial batch failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent import futures
from pathlib import Path

import numpy as np

from ._version import __version__
from .distances import distance_report
from .distfit import FAMILY_TAGS, gof_mse, mle_fit, rank_families
from .errors import DataError, SpeckledistError, UsageError
from .estimators import default_amplitude_grid, default_frequency_grid
from .ingest import (
    DEFAULT_DYNAMIC_RANGE,
    extract_roi,
    inverse_log_transform,
    load_image,
    normalize_rms,
)
from .simulate import sample_phasor_sum
from .stats import fisher_compare, linear_regression
from .types import (
    AmplitudeSample,
    FixedScatterers,
    KdeSettings,
    NegBinomialScatterers,
    RoiSpec,
    SimConfig,
)

_IMAGE_SUFFIXES = (".png", ".pgm")

DEFAULT_FRACTIONS = "1/64,1/32,1/16,1/8,1/4,1/2,1"
MIN_SWEEP_PIXELS = 100

_REPORT_COLUMNS = ("d_ks", "d_mse", "d_mmd", "d_cr", "n")


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as UsageError (exit code 1)."""

    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# input helpers


def _read_amplitude_csv(path: Path) -> AmplitudeSample:
    values = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if line.lower() == "amplitude":
                    continue
                if "," in line:
                    raise DataError(
                        f"{path} has multiple columns; for a CSV-matrix image pass --roi"
                    )
                try:
                    values.append(float(line))
                except ValueError as exc:
                    shown = line if len(line) <= 40 else line[:40] + "..."
                    raise DataError(f"bad amplitude value {shown!r} in {path}") from exc
    except OSError as exc:
        raise DataError(f"unreadable file: {path}: {exc}") from exc
    if not values:
        raise DataError(f"no amplitude values found in {path}")
    return AmplitudeSample(np.asarray(values, dtype=np.float64))


def _load_normalized_sample(args) -> AmplitudeSample:
    if args.input is None:
        raise UsageError("--input is required")
    path = Path(args.input)
    roi = RoiSpec.parse(args.roi) if args.roi else None
    if roi is None:
        if path.suffix.lower() in _IMAGE_SUFFIXES:
            raise UsageError("--roi is required for image inputs")
        return normalize_rms(_read_amplitude_csv(path))
    pixels = load_image(path, args.image_format)
    amplitudes = inverse_log_transform(pixels, args.dynamic_range)
    return normalize_rms(extract_roi(amplitudes, roi))


def _grids_for(sample: AmplitudeSample, args):
    settings = KdeSettings(bandwidth=args.bandwidth, boundary_cutoff=args.cutoff)
    grid = default_amplitude_grid(sample, settings, n_points=args.grid_n)
    freq_grid = default_frequency_grid(n_points=args.freq_n, t_max=args.freq_max)
    return grid, freq_grid, settings


# ---------------------------------------------------------------------------
# output helpers


def _config_echo(args, keys) -> dict:
    out = {}
    for key in keys:
        val = getattr(args, key)
        if val is not None:
            out[key.replace("_", "-")] = val
    return out


def _emit(text: str, out_path) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(command: str, config: dict, payload: dict, out_path) -> None:
    doc = {"command": command, "version": __version__, "config": config}
    doc.update(payload)
    _emit(json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n", out_path)


def _csv_comments(command: str, config: dict) -> list[str]:
    pairs = " ".join(f"{k}={config[k]}" for k in sorted(config))
    return [f"# speckledist {__version__}", f"# {command} {pairs}".rstrip()]


def _emit_csv(command: str, config: dict, header: list[str], rows: list[list], out_path) -> None:
    lines = _csv_comments(command, config)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join("" if v is None else str(v) for v in row))
    _emit("\n".join(lines) + "\n", out_path)


def _report_row(report) -> list:
    return [repr(report.d_ks), repr(report.d_mse), repr(report.d_mmd), repr(report.d_cr), report.n]


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_simulate(args) -> int:
    if args.n is None:
        raise UsageError("--n is required")
    if args.model == "fixed":
        if args.alpha is not None or args.mean is not None:
            raise UsageError("--alpha/--mean apply to the negbin model only")
        if args.scatterers is None:
            raise UsageError("--scatterers is required for the fixed model")
        model = FixedScatterers(args.scatterers)
    elif args.model == "negbin":
        if args.scatterers is not None:
            raise UsageError("--scatterers applies to the fixed model only")
        if args.mean is None or args.alpha is None:
            raise UsageError("--mean and --alpha are required for the negbin model")
        model = NegBinomialScatterers(args.mean, args.alpha)
    else:
        raise UsageError(f"unknown model {args.model!r}")

    sample = sample_phasor_sum(SimConfig(args.n, model, args.seed))
    config = _config_echo(args, ("model", "n", "scatterers", "mean", "alpha", "seed"))
    lines = _csv_comments("simulate", config)
    lines.append("amplitude")
    lines.extend(repr(float(v)) for v in sample.values)
    _emit("\n".join(lines) + "\n", args.out)
    return 0


_DISTANCE_KEYS = (
    "input", "roi", "image_format", "dynamic_range",
    "grid_n", "cutoff", "bandwidth", "freq_n", "freq_max",
)


def _cmd_distances(args) -> int:
    sample = _load_normalized_sample(args)
    grid, freq_grid, settings = _grids_for(sample, args)
    report = distance_report(sample, grid, freq_grid, settings)
    config = _config_echo(args, _DISTANCE_KEYS)
    if args.format == "json":
        _emit_json("distances", config, {"result": report.to_dict()}, args.out)
    else:
        _emit_csv("distances", config, list(_REPORT_COLUMNS), [_report_row(report)], args.out)
    return 0


def _cmd_fit(args) -> int:
    family = args.family
    if family != "all" and family not in FAMILY_TAGS:
        raise UsageError(
            f"unknown family {family!r}; valid: all, {', '.join(FAMILY_TAGS)}"
        )
    sample = _load_normalized_sample(args)
    grid, _, settings = _grids_for(sample, args)
    if family == "all":
        results = rank_families(sample, None, grid, settings)
    else:
        fit = mle_fit(family, sample)
        if fit.converged:
            gof_mse(fit, sample, grid, settings)
        results = [fit]

    config = _config_echo(args, _DISTANCE_KEYS + ("family",))
    if args.format == "json":
        _emit_json("fit", config, {"results": [f.to_dict() for f in results]}, args.out)
    else:
        header = ["family", "params", "log_likelihood", "gof", "converged", "iterations", "n_zeros_dropped"]
        rows = []
        for f in results:
            params = ";".join(f"{k}={repr(v)}" for k, v in f.params.items())
            rows.append([
                f.family, params, repr(f.log_likelihood),
                None if f.gof is None else repr(f.gof),
                f.converged, f.iterations, f.n_zeros_dropped,
            ])
        _emit_csv("fit", config, header, rows, args.out)
    return 0


def _read_manifest(path: Path) -> list[dict]:
    import csv as _csv

    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = _csv.DictReader(fh)
            if reader.fieldnames is None or not {"path", "roi", "label"} <= set(reader.fieldnames):
                raise DataError(f"manifest {path} must have columns path,roi,label")
            return list(reader)
    except OSError as exc:
        raise DataError(f"unreadable manifest: {path}: {exc}") from exc


def _cmd_batch(args) -> int:
    if args.manifest is None:
        raise UsageError("--manifest is required")
    manifest_path = Path(args.manifest)
    rows = _read_manifest(manifest_path)
    if not rows:
        raise DataError(f"manifest {manifest_path} has no entries")

    def process(row: dict) -> dict:
        label = row.get("label", "")
        rel = row.get("path", "")
        entry = {"label": label, "path": rel}
        try:
            item = argparse.Namespace(**vars(args))
            item.input = str((manifest_path.parent / rel) if not Path(rel).is_absolute() else rel)
            item.roi = row.get("roi") or None
            sample = _load_normalized_sample(item)
            grid, freq_grid, settings = _grids_for(sample, args)
            report = distance_report(sample, grid, freq_grid, settings)
            entry.update(status="ok", error=None, **report.to_dict())
        except (SpeckledistError, ValueError) as exc:
            entry.update(status="error", error=str(exc))
        return entry

    if args.jobs > 1:
        with futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(process, rows))
    else:
        results = [process(row) for row in rows]

    config = _config_echo(args, ("manifest", "jobs") + _DISTANCE_KEYS[2:])
    if args.format == "json":
        _emit_json("batch", config, {"results": results}, args.out)
    else:
        header = ["label", "path", "status", *_REPORT_COLUMNS, "error"]
        out_rows = []
        for e in results:
            if e["status"] == "ok":
                out_rows.append([e["label"], e["path"], "ok",
                                 repr(e["d_ks"]), repr(e["d_mse"]), repr(e["d_mmd"]),
                                 repr(e["d_cr"]), e["n"], None])
            else:
                out_rows.append([e["label"], e["path"], "error",
                                 None, None, None, None, None, e["error"]])
        _emit_csv("batch", config, header, out_rows, args.out)

    n_failed = sum(1 for e in results if e["status"] != "ok")
    if n_failed == 0:
        return 0
    return 3 if n_failed < len(results) else 2


def _parse_fractions(text: str) -> list[float]:
    out = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            if "/" in token:
                num, den = token.split("/")
                val = float(num) / float(den)
            else:
                val = float(token)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad area fraction {token!r}") from exc
        if not (0 < val <= 1):
            raise UsageError(f"area fraction must be in (0, 1], got {token!r}")
        out.append(val)
    if not out:
        raise UsageError("no area fractions given")
    return out


def sweep_rois(base: RoiSpec, fractions: list[float]) -> list[tuple[float, RoiSpec | None]]:
    """Centered sub-ROIs at the given area fractions of `base`.

    Fractions whose sub-ROI would fall below MIN_SWEEP_PIXELS pixels map
    to None (reported as skipped).
    """
    out = []
    for frac in fractions:
        scale = np.sqrt(frac)
        w = max(1, round(base.width * scale))
        h = max(1, round(base.height * scale))
        if w * h < MIN_SWEEP_PIXELS:
            out.append((frac, None))
            continue
        x0 = base.x0 + (base.width - w) // 2
        y0 = base.y0 + (base.height - h) // 2
        out.append((frac, RoiSpec(x0, y0, w, h)))
    return out


def _cmd_roi_sweep(args) -> int:
    if args.input is None:
        raise UsageError("--input is required")
    if args.roi is None:
        raise UsageError("--roi (the base ROI) is required for roi-sweep")
    base = RoiSpec.parse(args.roi)
    fractions = _parse_fractions(args.fractions)

    pixels = load_image(Path(args.input), args.image_format)
    amplitudes = inverse_log_transform(pixels, args.dynamic_range)

    results = []
    for frac, roi in sweep_rois(base, fractions):
        entry = {"fraction": frac}
        if roi is None:
            entry.update(status="skipped", area_px=None, error="sub-ROI below 100 pixels")
            results.append(entry)
            continue
        sample = normalize_rms(extract_roi(amplitudes, roi))
        grid, freq_grid, settings = _grids_for(sample, args)
        report = distance_report(sample, grid, freq_grid, settings)
        entry.update(status="ok", area_px=roi.area, error=None, **report.to_dict())
        results.append(entry)

    config = _config_echo(args, _DISTANCE_KEYS + ("fractions",))
    if args.format == "json":
        _emit_json("roi-sweep", config, {"results": results}, args.out)
    else:
        header = ["fraction", "area_px", "status", *_REPORT_COLUMNS, "error"]
        rows = []
        for e in results:
            if e["status"] == "ok":
                rows.append([repr(e["fraction"]), e["area_px"], "ok",
                             repr(e["d_ks"]), repr(e["d_mse"]), repr(e["d_mmd"]),
                             repr(e["d_cr"]), e["n"], None])
            else:
                rows.append([repr(e["fraction"]), None, "skipped",
                             None, None, None, None, None, e["error"]])
        _emit_csv("roi-sweep", config, header, rows, args.out)
    return 0


def _read_xy_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = [], []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split(",")
                if len(parts) != 2:
                    raise DataError(f"expected two columns in {path}, got {line!r}")
                try:
                    xs.append(float(parts[0]))
                    ys.append(float(parts[1]))
                except ValueError:
                    if not xs:  # header line
                        continue
                    raise DataError(f"bad numeric row {line!r} in {path}") from None
    except OSError as exc:
        raise DataError(f"unreadable file: {path}: {exc}") from exc
    if len(xs) < 3:
        raise DataError(f"correlate needs at least three rows in {path}")
    return np.asarray(xs), np.asarray(ys)


def _cmd_correlate(args) -> int:
    if args.input is None:
        raise UsageError("--input is required")
    if (args.vs_r is None) != (args.vs_n is None):
        raise UsageError("--vs-r and --vs-n must be given together")
    x, y = _read_xy_csv(Path(args.input))
    try:
        slope, intercept, r = linear_regression(x, y)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    result = {"r": r, "slope": slope, "intercept": intercept, "n": int(x.size)}
    if args.vs_r is not None:
        z, p = fisher_compare(r, int(x.size), args.vs_r, args.vs_n)
        result["z_fisher_vs"] = z
        result["p_fisher_vs"] = p

    config = _config_echo(args, ("input", "vs_r", "vs_n"))
    if args.format == "json":
        _emit_json("correlate", config, {"result": result}, args.out)
    else:
        header = sorted(result)
        _emit_csv("correlate", config, header, [[repr(result[k]) for k in header]], args.out)
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key=value file supplying defaults; flags win")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--out", help="output path (default: stdout)")


def _add_ingest_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--input", help="image (PNG/PGM/CSV matrix) or amplitude CSV")
    sub.add_argument("--roi", help="region of interest x0,y0,width,height")
    sub.add_argument("--image-format", choices=("grayscale-png-8", "grayscale-png-16", "pgm", "csv-matrix"))
    sub.add_argument("--dynamic-range", type=float, default=DEFAULT_DYNAMIC_RANGE,
                     help="decades spanned by the log compression (default 2.0)")


def _add_grid_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--grid-n", type=int, default=512, help="amplitude grid points")
    sub.add_argument("--cutoff", type=float, default=0.05, help="KDE boundary cutoff")
    sub.add_argument("--bandwidth", type=float, default=None,
                     help="fixed KDE bandwidth (default: automatic rule)")
    sub.add_argument("--freq-n", type=int, default=128, help="frequency grid points")
    sub.add_argument("--freq-max", type=float, default=20.0, help="frequency grid upper end")


def build_parser() -> _Parser:
    parser = _Parser(prog="speckledist", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"speckledist {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="generate phasor-sum speckle amplitudes")
    p.add_argument("--model", choices=("fixed", "negbin"), default="fixed")
    p.add_argument("--n", type=int, help="number of amplitude samples")
    p.add_argument("--scatterers", type=int, help="scatterer count (fixed model)")
    p.add_argument("--mean", type=float, help="mean scatterer count (negbin model)")
    p.add_argument("--alpha", type=float, help="negbin shape (negbin model)")
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(handler=_cmd_simulate)

    p = subs.add_parser("distances", help="benchmark distances of one sample")
    _add_ingest_flags(p)
    _add_grid_flags(p)
    _add_common(p)
    p.set_defaults(handler=_cmd_distances)

    p = subs.add_parser("fit", help="maximum-likelihood distribution fits")
    p.add_argument("--family", default="all",
                   help=f"one of {', '.join(FAMILY_TAGS)}, or all")
    _add_ingest_flags(p)
    _add_grid_flags(p)
    _add_common(p)
    p.set_defaults(handler=_cmd_fit)

    p = subs.add_parser("batch", help="distances for every manifest entry")
    p.add_argument("--manifest", help="CSV with columns path,roi,label")
    p.add_argument("--jobs", type=int, default=1, help="concurrent workers")
    _add_ingest_flags(p)
    _add_grid_flags(p)
    _add_common(p)
    p.set_defaults(handler=_cmd_batch)

    p = subs.add_parser("roi-sweep", help="distances over nested centered sub-ROIs")
    p.add_argument("--fractions", default=DEFAULT_FRACTIONS,
                   help=f"comma-separated area fractions (default {DEFAULT_FRACTIONS})")
    _add_ingest_flags(p)
    _add_grid_flags(p)
    _add_common(p)
    p.set_defaults(handler=_cmd_roi_sweep)

    p = subs.add_parser("correlate", help="correlation / regression of a two-column CSV")
    p.add_argument("--input", help="two-column CSV (x, y)")
    p.add_argument("--vs-r", type=float, help="reference correlation for a Fisher test")
    p.add_argument("--vs-n", type=int, help="sample size behind --vs-r")
    _add_common(p)
    p.set_defaults(handler=_cmd_correlate)

    return parser


def _load_config_file(path: str) -> dict[str, str]:
    cfg = {}
    try:
        for ln, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config {path}:{ln}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            cfg[key.strip()] = value.strip()
    except OSError as exc:
        raise DataError(f"unreadable config file: {path}: {exc}") from exc
    return cfg


def _apply_config(parser: _Parser, argv: list[str], args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the config file; explicitly passed flags win."""
    if not getattr(args, "config", None):
        return args
    cfg = _load_config_file(args.config)

    sub_actions = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    subparser = sub_actions.choices[args.command]
    actions = {a.dest: a for a in subparser._actions}

    explicit = set()
    for token in argv:
        if token.startswith("--"):
            explicit.add(token[2:].split("=", 1)[0].replace("-", "_"))

    for key, raw in cfg.items():
        dest = key.replace("-", "_")
        if dest not in actions or dest == "config":
            raise UsageError(f"config key {key!r} is not a flag of {args.command!r}")
        if dest in explicit:
            continue
        action = actions[dest]
        if isinstance(action, argparse._StoreConstAction):
            value = raw.lower() in ("1", "true", "yes")
        elif action.choices is not None and raw not in action.choices:
            raise UsageError(f"config key {key!r}: invalid value {raw!r}")
        else:
            value = action.type(raw) if action.type else raw
        setattr(args, dest, value)
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config(parser, argv, args)
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
