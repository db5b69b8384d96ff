import json

import numpy as np
import pytest

from speckledist import RAYLEIGH_SIGMA, sample_rayleigh
from speckledist.cli import main
from conftest import write_log_image_csv, write_pgm_binary


def run(args) -> int:
    return main([str(a) for a in args])


def read_csv_table(path):
    lines = [l for l in path.read_text().splitlines() if l and not l.startswith("#")]
    header = lines[0].split(",")
    rows = [l.split(",") for l in lines[1:]]
    return header, rows


@pytest.fixture
def bench_csv(tmp_path):
    """Amplitude CSV of benchmark draws."""
    path = tmp_path / "bench.csv"
    values = sample_rayleigh(20_000, RAYLEIGH_SIGMA, seed=5).values
    path.write_text("amplitude\n" + "\n".join(repr(float(v)) for v in values) + "\n")
    return path


@pytest.fixture
def log_image(tmp_path):
    """600x40 log-compressed synthetic image of fully developed speckle."""
    amps = sample_rayleigh(600 * 40, RAYLEIGH_SIGMA, seed=6).values.reshape(40, 600)
    path = tmp_path / "scan.csv"
    decades = write_log_image_csv(path, amps)
    return path, decades, amps


class TestSimulate:
    def test_single_phasor_rows(self, tmp_path):
        out = tmp_path / "s.csv"
        assert run(["simulate", "--model", "fixed", "--scatterers", 1,
                    "--n", 5, "--seed", 7, "--out", out]) == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "amplitude"
        values = [float(v) for v in lines[1:]]
        assert len(values) == 5
        assert np.allclose(values, 1.0, rtol=0, atol=5e-16)

    def test_byte_identical_rerun(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--model", "negbin", "--mean", 20, "--alpha", 1.5,
                "--n", 200, "--seed", 3]
        assert run(args + ["--out", a]) == 0
        assert run(args + ["--out", b]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_conflicting_flags_usage_error(self, capsys):
        assert run(["simulate", "--model", "fixed", "--alpha", 2, "--n", 5]) == 1
        assert "usage error" in capsys.readouterr().err

    def test_missing_n_usage_error(self):
        assert run(["simulate", "--model", "fixed", "--scatterers", 3]) == 1


class TestDistances:
    def test_csv_shape(self, bench_csv, tmp_path, capsys):
        assert run(["distances", "--input", bench_csv, "--format", "csv"]) == 0
        out = capsys.readouterr().out
        lines = [l for l in out.splitlines() if not l.startswith("#")]
        assert lines[0] == "d_ks,d_mse,d_mmd,d_cr,n"
        assert len(lines) == 2
        fields = lines[1].split(",")
        assert int(fields[4]) == 20_000
        assert float(fields[0]) < 0.02

    def test_json_embeds_config_and_version(self, bench_csv, tmp_path):
        out = tmp_path / "rep.json"
        assert run(["distances", "--input", bench_csv, "--out", out]) == 0
        doc = json.loads(out.read_text())
        assert doc["command"] == "distances"
        assert doc["version"]
        assert doc["config"]["input"] == str(bench_csv)
        assert set(doc["result"]) == {"d_ks", "d_mse", "d_mmd", "d_cr", "n", "settings"}

    def test_image_without_roi_is_usage_error(self, tmp_path):
        img = tmp_path / "img.pgm"
        write_pgm_binary(img, np.full((10, 10), 7), maxval=255)
        assert run(["distances", "--input", img]) == 1

    def test_image_pipeline_matches_direct(self, log_image, tmp_path):
        from speckledist import AmplitudeSample, distance_report, normalize_rms

        path, decades, amps = log_image
        out = tmp_path / "rep.json"
        assert run(["distances", "--input", path, "--roi", "0,0,600,40",
                    "--dynamic-range", repr(decades), "--out", out]) == 0
        got = json.loads(out.read_text())["result"]
        expect = distance_report(normalize_rms(AmplitudeSample(amps.ravel())))
        assert got["d_ks"] == pytest.approx(expect.d_ks, abs=1e-9)
        assert got["d_mse"] == pytest.approx(expect.d_mse, abs=1e-9)
        assert got["d_mmd"] == pytest.approx(expect.d_mmd, abs=1e-9)
        assert got["d_cr"] == pytest.approx(expect.d_cr, abs=1e-9)

    def test_missing_input_file(self, tmp_path):
        assert run(["distances", "--input", tmp_path / "nothing.csv"]) == 2

    def test_rerun_byte_identical(self, bench_csv, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run(["distances", "--input", bench_csv, "--out", a]) == 0
        assert run(["distances", "--input", bench_csv, "--out", b]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestFit:
    def test_rayleigh_sigma(self, bench_csv, tmp_path):
        out = tmp_path / "fit.json"
        assert run(["fit", "--input", bench_csv, "--family", "rayleigh", "--out", out]) == 0
        doc = json.loads(out.read_text())
        assert len(doc["results"]) == 1
        assert doc["results"][0]["params"]["sigma"] == pytest.approx(0.7071, abs=1e-4)

    def test_all_families_sorted(self, bench_csv, tmp_path):
        out = tmp_path / "fit.csv"
        assert run(["fit", "--input", bench_csv, "--family", "all",
                    "--format", "csv", "--out", out]) == 0
        header, rows = read_csv_table(out)
        assert len(rows) == 7
        gofs = [float(r[header.index("gof")]) for r in rows]
        assert gofs == sorted(gofs)

    def test_unknown_family(self, bench_csv, capsys):
        assert run(["fit", "--input", bench_csv, "--family", "lognormal"]) == 1
        err = capsys.readouterr().err
        assert "rayleigh" in err  # lists valid tags


class TestBatch:
    @pytest.fixture
    def manifest(self, tmp_path):
        for i, seed in enumerate((1, 2)):
            amps = sample_rayleigh(3000, RAYLEIGH_SIGMA, seed=seed).values
            (tmp_path / f"s{i}.csv").write_text(
                "amplitude\n" + "\n".join(repr(float(v)) for v in amps) + "\n"
            )
        (tmp_path / "bad.csv").write_text("amplitude\nnot-a-number\n")
        path = tmp_path / "manifest.csv"
        path.write_text(
            "path,roi,label\n"
            "s0.csv,,first\n"
            "s1.csv,,second\n"
            "bad.csv,,third\n"
        )
        return path

    def test_partial_failure(self, manifest, tmp_path):
        out = tmp_path / "batch.csv"
        rc = run(["batch", "--manifest", manifest, "--format", "csv", "--out", out])
        assert rc == 3
        header, rows = read_csv_table(out)
        assert [r[header.index("label")] for r in rows] == ["first", "second", "third"]
        statuses = [r[header.index("status")] for r in rows]
        assert statuses == ["ok", "ok", "error"]

    def test_all_ok_with_jobs(self, manifest, tmp_path):
        good = tmp_path / "good.csv"
        good.write_text("path,roi,label\ns0.csv,,a\ns1.csv,,b\n")
        out = tmp_path / "batch.json"
        assert run(["batch", "--manifest", good, "--jobs", 4, "--out", out]) == 0
        doc = json.loads(out.read_text())
        assert [e["label"] for e in doc["results"]] == ["a", "b"]
        assert all(e["status"] == "ok" for e in doc["results"])

    def test_unreadable_manifest(self, tmp_path):
        assert run(["batch", "--manifest", tmp_path / "none.csv"]) == 2

    @pytest.mark.slow
    def test_density_sweep_table(self, tmp_path):
        # batch over simulated density levels reproduces the monotone layout
        counts = (1, 2, 5, 15, 50, 500)
        lines = ["path,roi,label"]
        for count in counts:
            name = f"c{count}.csv"
            assert run(["simulate", "--model", "fixed", "--scatterers", count,
                        "--n", 20_000, "--seed", 4, "--out", tmp_path / name]) == 0
            lines.append(f"{name},,N{count}")
        manifest = tmp_path / "densities.csv"
        manifest.write_text("\n".join(lines) + "\n")
        out = tmp_path / "table.csv"
        assert run(["batch", "--manifest", manifest, "--format", "csv",
                    "--out", out]) == 0
        header, rows = read_csv_table(out)
        assert [r[header.index("label")] for r in rows] == [f"N{c}" for c in counts]
        d_ks = [float(r[header.index("d_ks")]) for r in rows]
        assert all(a >= b - 0.005 for a, b in zip(d_ks, d_ks[1:]))


class TestRoiSweep:
    def test_full_fraction_matches_distances(self, log_image, tmp_path):
        path, decades, _ = log_image
        sweep_out = tmp_path / "sweep.json"
        dist_out = tmp_path / "dist.json"
        common = ["--input", path, "--roi", "0,0,600,40", "--dynamic-range", repr(decades)]
        assert run(["roi-sweep", *common, "--fractions", "1/4,1", "--out", sweep_out]) == 0
        assert run(["distances", *common, "--out", dist_out]) == 0
        sweep = json.loads(sweep_out.read_text())["results"]
        dist = json.loads(dist_out.read_text())["result"]
        full = next(e for e in sweep if e["fraction"] == 1.0)
        for key in ("d_ks", "d_mse", "d_mmd", "d_cr", "n"):
            assert full[key] == dist[key]

    def test_tiny_fraction_skipped(self, log_image, tmp_path):
        path, decades, _ = log_image
        out = tmp_path / "sweep.json"
        assert run(["roi-sweep", "--input", path, "--roi", "0,0,600,40",
                    "--dynamic-range", repr(decades),
                    "--fractions", "0.001,1", "--out", out]) == 0
        rows = json.loads(out.read_text())["results"]
        assert rows[0]["status"] == "skipped"
        assert rows[1]["status"] == "ok"

    def test_requires_roi(self, log_image):
        path, _, _ = log_image
        assert run(["roi-sweep", "--input", path]) == 1

    def test_bad_fraction(self, log_image):
        path, decades, _ = log_image
        assert run(["roi-sweep", "--input", path, "--roi", "0,0,600,40",
                    "--fractions", "2.0"]) == 1


class TestCorrelate:
    def test_exact_line(self, tmp_path):
        data = tmp_path / "xy.csv"
        data.write_text("x,y\n0,1\n1,3\n2,5\n3,7\n")
        out = tmp_path / "corr.json"
        assert run(["correlate", "--input", data, "--out", out]) == 0
        res = json.loads(out.read_text())["result"]
        assert res["r"] == pytest.approx(1.0, abs=1e-12)
        assert res["slope"] == pytest.approx(2.0, abs=1e-12)
        assert res["intercept"] == pytest.approx(1.0, abs=1e-12)
        assert res["n"] == 4

    def test_fisher_comparison(self, tmp_path, rng):
        data = tmp_path / "xy.csv"
        x = np.arange(60.0)
        y = x + rng.normal(0, 20, size=60)
        data.write_text("\n".join(f"{a},{b}" for a, b in zip(x, y)) + "\n")
        out = tmp_path / "corr.json"
        assert run(["correlate", "--input", data, "--vs-r", 0.0, "--vs-n", 60,
                    "--out", out]) == 0
        res = json.loads(out.read_text())["result"]
        assert "p_fisher_vs" in res
        assert 0.0 < res["p_fisher_vs"] <= 1.0

    def test_vs_flags_must_pair(self, tmp_path):
        data = tmp_path / "xy.csv"
        data.write_text("1,2\n2,3\n3,4\n")
        assert run(["correlate", "--input", data, "--vs-r", 0.5]) == 1

    def test_constant_y_is_data_error(self, tmp_path):
        data = tmp_path / "xy.csv"
        data.write_text("1,2\n2,2\n3,2\n")
        assert run(["correlate", "--input", data]) == 2


class TestConfigFile:
    def test_config_supplies_defaults_flags_win(self, bench_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(f"input={bench_csv}\ngrid-n=128\nfreq-n=16\n")
        out = tmp_path / "rep.json"
        assert run(["distances", "--config", cfg, "--grid-n", 64, "--out", out]) == 0
        doc = json.loads(out.read_text())
        assert doc["result"]["settings"]["grid_n"] == 64  # flag beat config
        assert doc["result"]["settings"]["freq_n"] == 16  # config filled the rest

    def test_unknown_config_key(self, bench_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("no-such-flag=1\n")
        assert run(["distances", "--config", cfg, "--input", bench_csv]) == 1


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["--version"])
    assert exc.value.code == 0
    assert "speckledist" in capsys.readouterr().out
