"""Command-line interface: formats, determinism, and exit codes."""
import csv
import json
import math

import numpy as np
import pytest

from twophoton.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _data_lines(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def test_sweep_csv_shape(capsys):
    code, out, err = _run(
        capsys, "sweep", "--delta-min", "17", "--delta-max", "23",
        "--points", "3", "--methods", "semiclassical,exact",
    )
    assert code == 0
    assert out.startswith("# twophoton sweep\r\n# version = ")
    rows = list(csv.DictReader(_data_lines(out)))
    assert len(rows) == 3
    assert rows[0]["delta_over_eta"] == "17"
    assert float(rows[0]["exact_n"]) == pytest.approx(8.7335213468, rel=1e-9)
    assert rows[0]["exact_status"] == "ok"
    # Vacuum point: the semiclassical g2 is undefined and must be the
    # not-a-number sentinel, never a silent zero.
    assert math.isnan(float(rows[1]["semiclassical_g2"]))
    assert rows[1]["semiclassical_status"] == "ok"


def test_csv_uses_crlf_line_termination(capsys):
    code, out, _ = _run(
        capsys, "sweep", "--delta-min", "18", "--delta-max", "22",
        "--points", "2", "--methods", "exact",
    )
    assert code == 0
    body = out.rstrip("\r\n")
    assert "\r\n" in out
    assert all(ln.endswith("\r") or ln.startswith("#") is False
               for ln in body.split("\n") if ln)


def test_sweep_json_round_trip(capsys, tmp_path):
    target = tmp_path / "sweep.json"
    code, out, _ = _run(
        capsys, "sweep", "--delta-min", "19", "--delta-max", "21",
        "--points", "3", "--methods", "semiclassical,boltzmann",
        "--format", "json", "--out", str(target),
    )
    assert code == 0
    doc = json.loads(target.read_text())
    assert doc["command"] == "sweep"
    columns = doc["columns"]
    assert len(columns["delta_over_eta"]) == 3
    # JSON cannot carry NaN; undefined entries are null by policy.
    # The last sweep point sits above threshold where the
    # semiclassical g2 is undefined.
    assert columns["semiclassical_g2"][-1] is None
    assert columns["boltzmann_g2"][-1] is not None
    assert doc["config"]["seed"] == 20250814


def test_outputs_are_byte_identical_across_threads_and_backend(tmp_path):
    base = [
        "simulate", "--delta", "17", "--n-traj", "24", "--t-burn", "5",
        "--t-sample", "50", "--dt", "2e-3", "--stride", "5",
    ]
    files = []
    for tag, extra in (
        ("a", ["--threads", "1"]),
        ("b", ["--threads", "4"]),
        ("c", ["--threads", "2", "--backend", "python"]),
    ):
        path = tmp_path / f"{tag}.csv"
        assert main(base + extra + ["--out", str(path)]) == 0
        files.append(path.read_bytes())
    assert files[0] == files[1] == files[2]


def test_simulate_single_trajectory_series(capsys):
    code, out, _ = _run(
        capsys, "simulate", "--delta", "17", "--n-traj", "1",
        "--t-burn", "1", "--t-sample", "20", "--dt", "2e-3", "--stride", "1",
    )
    assert code == 0
    rows = list(csv.DictReader(_data_lines(out)))
    assert set(rows[0]) == {"time", "x", "p"}
    assert len(rows) == 10000
    times = np.array([float(r["time"]) for r in rows])
    assert np.allclose(np.diff(times), 0.002, rtol=1e-9)


def test_simulate_zero_noise_flag(capsys):
    code, out, _ = _run(
        capsys, "simulate", "--delta", "17", "--n-traj", "1",
        "--t-burn", "1", "--t-sample", "20", "--dt", "2e-3", "--stride", "1",
        "--zero-noise",
    )
    assert code == 0
    rows = list(csv.DictReader(_data_lines(out)))
    x = np.array([float(r["x"]) for r in rows])
    # The drift flow settles onto a fixed point: the late tail is flat.
    assert np.std(x[-50:]) < 1e-6


def test_simulate_ensemble_summary(capsys):
    code, out, _ = _run(
        capsys, "simulate", "--delta", "17", "--n-traj", "32",
        "--t-burn", "5", "--t-sample", "40", "--dt", "2e-3", "--stride", "5",
    )
    assert code == 0
    rows = list(csv.DictReader(_data_lines(out)))
    names = [r["observable"] for r in rows]
    assert names == sorted(names)
    for want in ("n", "x2", "p2", "xp_sym", "g2"):
        assert want in names
    x2 = next(r for r in rows if r["observable"] == "x2")
    assert float(x2["std_error"]) > 0.0
    assert int(x2["n_samples"]) > 0
    assert "# aborted-fraction = 0" in out


def test_wigner_grid_normalization_and_format(capsys):
    code, out, _ = _run(
        capsys, "wigner", "--delta", "20", "--resolution", "257",
        "--method", "exact",
    )
    assert code == 0
    rows = list(csv.DictReader(_data_lines(out)))
    assert set(rows[0]) == {"x", "p", "W"}
    assert len(rows) == 257 * 257
    assert "# normalization = 1" in out
    # The stated convention must ride along with the data.
    assert "dx dp / 2" in out


def test_wigner_reduced_profile(capsys):
    code, out, _ = _run(
        capsys, "wigner", "--delta", "17", "--resolution", "257",
        "--method", "exact", "--reduced",
    )
    assert code == 0
    rows = list(csv.DictReader(_data_lines(out)))
    assert set(rows[0]) == {"x", "w"}
    w = np.array([float(r["w"]) for r in rows])
    x = np.array([float(r["x"]) for r in rows])
    # Two-peaked marginal above threshold, symmetric to rounding.
    assert w[0] < w.max() / 100.0
    assert np.argmax(w) != len(w) // 2
    assert np.allclose(w, w[::-1], rtol=1e-8)
    assert x[0] == -x[-1]


def test_wigner_boltzmann_method(capsys):
    code, out, _ = _run(
        capsys, "wigner", "--delta", "20", "--resolution", "129",
        "--method", "boltzmann",
    )
    assert code == 0
    assert "# normalization = " in out


def test_wigner_exact_rejects_coarse_grid(capsys):
    code, _, err = _run(
        capsys, "wigner", "--delta", "20", "--resolution", "129",
        "--method", "exact",
    )
    assert code == 1
    assert "257" in err


def test_critical_fit_annotations(capsys):
    code, out, _ = _run(
        capsys, "critical", "--points", "6", "--g-min", "50",
        "--g-max", "100", "--methods", "exact",
    )
    assert code == 0
    assert "# fit_x2_slope = " in out
    assert "(ok)" in out
    slope = float(next(
        ln.split("=")[1] for ln in out.splitlines()
        if ln.startswith("# fit_x2_slope")
    ))
    assert slope == pytest.approx(2.0 / 3.0, abs=0.02)


def test_critical_flags_out_of_band_fit(capsys):
    # Fitting from g = 20 drags the vacuum offset into the window and
    # the slope verdict must say so rather than hide it.
    code, out, _ = _run(
        capsys, "critical", "--points", "5", "--g-min", "20",
        "--g-max", "100", "--methods", "exact",
    )
    assert code == 0
    assert "out_of_band" in out


def test_usage_errors_exit_one(capsys):
    code, _, err = _run(capsys, "sweep", "--points", "1")
    assert code == 1
    code, _, err = _run(capsys, "simulate", "--scheme", "rk4")
    assert code == 1
    code, _, err = _run(capsys, "nonsense")
    assert code == 1


def test_runtime_failures_exit_two(capsys):
    # Every requested cell fails (the series domain caps g/eta), which
    # is a computation error, not a usage error.
    code, _, err = _run(
        capsys, "sweep", "--g-over-eta", "150", "--delta-min", "140",
        "--delta-max", "160", "--points", "2", "--methods", "exact",
    )
    assert code == 2


def test_check_flag_runs_suite(capsys):
    code, out, _ = _run(capsys, "--check", "--threads", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert all(ln.startswith(("PASS", "FAIL", "selfcheck:")) for ln in lines)
    assert lines[-1].startswith("selfcheck:")
    assert not any(ln.startswith("FAIL") for ln in lines)


def test_config_file_supplies_defaults(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("delta-min = 18\ndelta-max = 22\npoints = 2\nmethods = exact\n")
    code, out, _ = _run(capsys, "sweep", "--config", str(cfg))
    assert code == 0
    assert "# delta-min = 18" in out
    rows = list(csv.DictReader(_data_lines(out)))
    assert len(rows) == 2


def test_command_line_overrides_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("points = 2\nmethods = exact\n")
    code, out, _ = _run(
        capsys, "sweep", "--config", str(cfg), "--points", "4",
        "--delta-min", "18", "--delta-max", "22",
    )
    assert code == 0
    rows = list(csv.DictReader(_data_lines(out)))
    assert len(rows) == 4


def test_sweep_preset_matches_explicit_flags(tmp_path):
    a = tmp_path / "preset.csv"
    b = tmp_path / "explicit.csv"
    assert main(["sweep", "--preset", "fig4a", "--out", str(a)]) == 0
    assert main([
        "sweep", "--delta-min", "14", "--delta-max", "26", "--points", "121",
        "--methods", "exact,boltzmann", "--out", str(b),
    ]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_critical_preset_runs(tmp_path):
    out = tmp_path / "crit.csv"
    assert main(["critical", "--preset", "fig6", "--out", str(out)]) == 0
    text = out.read_text()
    rows = list(csv.DictReader(_data_lines(text)))
    assert len(rows) == 9
    gs = [float(r["g_over_eta"]) for r in rows]
    assert gs[0] == pytest.approx(20.0)
    assert gs[-1] == pytest.approx(100.0)
