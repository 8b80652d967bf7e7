"""Command-line interface: exit codes, JSON schema, text output, file emission."""

import json
import math

import pytest

from snlab import __version__, bessel
from snlab.cli import main

PI2 = math.pi ** 2


def run_json(capsys, argv):
    rc = main(argv + ["--json"])
    out = capsys.readouterr().out
    assert rc == 0
    return json.loads(out)


def test_json_schema_and_triangle_ratio(capsys):
    payload = run_json(capsys, ["triangle-ratio", "--x0", "0.3"])
    assert set(payload) == {"version", "command", "seed", "parameters", "results"}
    assert payload["version"] == __version__
    assert payload["command"] == "triangle-ratio"
    assert payload["parameters"] == {"x0": 0.3}
    res = payload["results"]
    assert res["ratio"] == pytest.approx(4.0, abs=1e-12)
    assert abs(res["ratio_minus_4"]) < 1e-12
    assert res["F_tent"] == pytest.approx(2.0, abs=1e-12)


def test_symmetric_tent_closed_form(capsys):
    res = run_json(capsys, ["triangle-ratio", "--x0", "0.5"])["results"]
    j01 = bessel.j0_first_zero()
    assert res["mu1_tent"] == pytest.approx(4.0 * j01 ** 2, rel=1e-12)
    assert res["sigma1_tent"] == pytest.approx(j01 ** 2, rel=1e-12)


def test_exit_code_1_on_usage_errors(capsys):
    assert main([]) == 1                          # no subcommand: help
    assert main(["no-such-command"]) == 1
    assert main(["f1d"]) == 1                     # missing required --profile
    assert main(["bounds", "--bogus"]) == 1
    capsys.readouterr()


def test_exit_code_2_on_computation_failure(capsys):
    rc = main(["triangle-ratio", "--x0", "1.5"])
    captured = capsys.readouterr()
    assert rc == 2
    assert "computation failed" in captured.err
    assert "x0 must lie strictly between 0 and 1" in captured.err


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert f"snlab {__version__}" in capsys.readouterr().out


def test_f1d_text_output_has_stanza_and_12_digits(capsys):
    rc = main(["f1d", "--profile", "const", "--elements", "512"])
    out = capsys.readouterr().out
    assert rc == 0
    first = out.splitlines()[0]
    assert first.startswith(f"snlab {__version__} | f1d |")
    assert "profile=const" in first and "elements=512" in first
    # pi^2 printed to 12 significant digits
    assert "9.86960440109" in out


def test_f1d_parabolic_with_kernel_oracle(capsys):
    res = run_json(capsys, ["f1d", "--profile", "const",
                            "--elements", "512", "--oracle"])["results"]
    assert res["mu1"] == pytest.approx(PI2, abs=1e-3)  # raw 512-element value
    assert res["sigma1_extrapolated"] == pytest.approx(PI2, abs=1e-8)
    assert res["F_extrapolated"] == pytest.approx(1.0, abs=1e-9)
    assert res["oracle_gap"] < 1e-3


def test_f1d_parabolic_star_sigma(capsys):
    res = run_json(capsys, ["f1d", "--profile", "parabolic",
                            "--elements", "512"])["results"]
    assert res["sigma1_extrapolated"] == pytest.approx(12.0, abs=1e-3)
    assert res["integral"] == pytest.approx(1.0, rel=1e-12)


def test_bounds_values_and_csv(capsys, tmp_path):
    path = tmp_path / "grid.csv"
    res = run_json(capsys, ["bounds", "--grid", "400", "--csv", str(path)])["results"]
    assert res["K"] == pytest.approx(3.50748347059, abs=1e-6)
    assert res["upper_bound_2(1+K)"] == pytest.approx(9.01496694118, abs=1e-6)
    assert res["lower_bound_constant"] == pytest.approx(
        PI2 / (6.0 * 18.0 ** (1.0 / 3.0)), rel=1e-12)
    lines = path.read_text().splitlines()
    assert lines[0] == "tau,g,f"
    assert len(lines) == 401


def test_geom_named_shape(capsys):
    res = run_json(capsys, ["geom", "--shape", "T1"])["results"]
    assert res["vertices"] == 3
    assert res["area"] == pytest.approx(math.sqrt(3.0) / 4.0, rel=1e-12)
    assert res["perimeter"] == pytest.approx(3.0, rel=1e-12)
    assert res["per_domain_upper_bound"] > 2.0


def test_fem_square_levels(capsys):
    res = run_json(capsys, ["fem", "--shape", "square",
                            "--hmax", "0.2", "--levels", "2"])["results"]
    assert len(res["levels"]) == 2
    assert res["levels"][1]["dofs"] > res["levels"][0]["dofs"]
    assert res["mu1"] == pytest.approx(PI2, rel=1e-4)
    assert 1.0 < res["F"] < 2.0


def test_thin_sweep_tent(capsys):
    res = run_json(capsys, ["thin", "--profile", "tent:0.5",
                            "--eps", "0.2,0.1,0.05", "--dx0", "0.02"])["results"]
    j01 = bessel.j0_first_zero()
    assert res["mu1_limit"] == pytest.approx(4.0 * j01 ** 2, rel=1e-12)
    assert res["F_limit"] == pytest.approx(2.0, rel=1e-12)
    assert res["F_extrapolated"] == pytest.approx(2.0, abs=0.05)
    assert len(res["eps"]) == 3


def test_variation_check_summary(capsys):
    res = run_json(capsys, ["variation-check", "--elements", "192",
                            "--seed", "1"])["results"]
    assert res["max_first_relative_error"] < 1e-3
    assert res["max_second_relative_error"] < 1e-2
    assert max(res["eigenfunction_residuals"].values()) < 1e-10
    q = res["second_variation_quadrature"]
    assert q["mu_ddot"] == pytest.approx(q["mu_ddot_closed"], abs=1e-10)
    assert abs(res["flat_direction"]["finite_difference"]) < 1e-6
    assert len(res["first_variations"]) == 15  # (3 named + 2 random) x 3 quantities


def test_optimize_h_min_reaches_constant(capsys):
    res = run_json(capsys, ["optimize-h", "--mode", "min", "--knots", "9",
                            "--restarts", "1", "--elements", "128"])["results"]
    assert res["value"] == pytest.approx(1.0, abs=1e-4)
    assert res["mode"] == "min"
    assert len(res["knots"]) == len(res["values"])


def test_diagram_writes_files_into_output_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SNLAB_OUTPUT_DIR", str(tmp_path))
    payload = run_json(capsys, ["diagram", "--family", "named", "--n", "2",
                                "--seed", "3", "--hmax", "0.1"])
    res = payload["results"]
    csv_path = tmp_path / "diagram-named-3.csv"
    svg_path = tmp_path / "diagram-named-3.svg"
    assert res["csv"] == str(csv_path) and csv_path.exists()
    assert res["svg"] == str(svg_path) and svg_path.exists()
    assert res["evaluated"] == 2 and res["failed"] == 0
    assert res["hard_bounds"]["band_violations"] == 0
    assert payload["seed"] == 3


def test_diagram_explicit_paths_override_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SNLAB_OUTPUT_DIR", str(tmp_path / "ignored"))
    csv_path = tmp_path / "direct.csv"
    svg_path = tmp_path / "direct.svg"
    res = run_json(capsys, ["diagram", "--family", "collapsingRectangle",
                            "--n", "1", "--hmax", "0.05",
                            "--csv", str(csv_path), "--svg", str(svg_path)])["results"]
    assert csv_path.exists() and svg_path.exists()
    assert res["evaluated"] == 1
