import csv
import io
import json
import math

import pytest

from freefall.cli import FreefallCLI, main
from freefall.exprparse import format_metric_spec, parse_metric_spec
from freefall.metrics import BUILTIN_METRICS, builtin_spec_text, load_metric


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, (out.read_text(encoding="utf-8") if out.exists() else "")


def data_rows(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def tensor_blocks(text):
    blocks, current = {}, None
    for line in text.splitlines():
        if line.startswith("# tensor "):
            current = line[len("# tensor ") :].split(":")[0]
            blocks[current] = []
        elif current and line and not line.startswith("#") and not line.startswith("index1"):
            i, j, k, value = line.split(",")
            blocks[current].append((i, j, k, float(value)))
    return blocks


# frames
def test_frames_minkowski(tmp_path):
    code, text = run(tmp_path, "frames", "--metric", "minkowski", "--point", "0,0,0,0")
    assert code == 0
    blocks = tensor_blocks(text)
    assert set(blocks) == {"vierbein", "anholonomity", "spin_connection", "christoffel"}
    for name in ("anholonomity", "spin_connection", "christoffel"):
        assert len(blocks[name]) == 64
        assert all(value == 0.0 for *_, value in blocks[name])
    assert "# tetrad_postulate_residual 0.0" in text
    assert text.endswith("\n") and "\r" not in text


def test_frames_schwarzschild(tmp_path):
    code, text = run(tmp_path, "frames", "--metric", "schwarzschild", "--set", "rs=1", "--point", "0,2,1.5708,0")
    assert code == 0
    blocks = tensor_blocks(text)
    vierbein = {(i, j): v for i, j, _, v in blocks["vierbein"]}
    assert vierbein[("0", "0")] == pytest.approx(math.sqrt(0.5), rel=1e-12)
    assert vierbein[("3", "3")] == pytest.approx(2.0, rel=1e-7)
    spin = {(i, j, k): v for i, j, k, v in blocks["spin_connection"]}
    assert spin[("0", "0", "1")] == pytest.approx(-0.125, abs=1e-7)
    christoffel = {(i, j, k): v for i, j, k, v in blocks["christoffel"]}
    assert christoffel[("1", "0", "0")] == pytest.approx(0.0625, abs=1e-7)


def test_frames_accepts_constant_expressions(tmp_path):
    code, text = run(tmp_path, "frames", "--metric", "spherical-minkowski", "--point", "0,2,pi/2,0")
    assert code == 0
    assert f"point 0.0,2.0,{math.pi / 2!r},0.0" in text


def test_frames_inside_horizon_exits_3(tmp_path, capsys):
    code, _ = run(tmp_path, "frames", "--metric", "schwarzschild", "--set", "rs=1", "--point", "0,0.5,1.5708,0")
    assert code == 3
    assert "not Lorentzian" in capsys.readouterr().err


def test_frames_parse_errors_exit_2(tmp_path, capsys):
    code, _ = run(tmp_path, "frames", "--metric", "minkowski", "--point", "0,0,0,1 +")
    assert code == 2
    spec = tmp_path / "bad.metric"
    spec.write_text("coords = t,x,y,z\ng[0][0] = 1\ng[0][0] = 2\n", encoding="utf-8")
    code, _ = run(tmp_path, "frames", "--metric", str(spec), "--point", "0,0,0,0")
    assert code == 2
    assert "line 3" in capsys.readouterr().err
    code, _ = run(tmp_path, "frames", "--metric", "schwarzschild", "--set", "mass=1", "--point", "0,3,1,0")
    assert code == 2


def test_frames_residual_failure_exits_4(tmp_path, capsys):
    code, text = run(
        tmp_path, "frames", "--metric", "schwarzschild", "--point", "0,3,1,0", "--step", "0.1", "--tolerance", "1e-12"
    )
    assert code == 4
    assert "# tensor christoffel" in text
    assert "exceeds tolerance" in capsys.readouterr().err


# spectrum
def test_spectrum(tmp_path, caplog):
    caplog.set_level("INFO")
    code, text = run(tmp_path, "spectrum", "--a", "1", "--omega", "1", "--xmin", "0.1", "--xmax", "5", "--steps", "50", "-v")
    assert code == 0
    rows = data_rows(text)
    assert len(rows) == 50
    assert list(rows[0]) == ["x", "power_numeric", "power_analytic", "planck", "rel_err_quad", "identity_err"]
    assert max(float(r["identity_err"]) for r in rows) < 1e-10
    assert "spectrum temperature" in caplog.text


def test_spectrum_natural_defaults(tmp_path):
    code, text = run(tmp_path, "spectrum", "--steps", "4")
    assert code == 0
    assert "# omega 1.0\n# a 1.0\n# c 1.0\n" in text


def test_spectrum_si_units_take_c_from_the_preset(tmp_path):
    code, text = run(tmp_path, "spectrum", "--units", "si", "--a", "9.81", "--steps", "4")
    assert code == 0
    assert "# c 299792458.0\n" in text


def test_spectrum_single_step_is_a_usage_error(tmp_path):
    code, _ = run(tmp_path, "spectrum", "--steps", "1")
    assert code == 2


def test_spectrum_convergence_failure_exits_5(tmp_path, capsys):
    code, text = run(tmp_path, "spectrum", "--steps", "3", "--terms", "1")
    assert code == 5
    assert len(data_rows(text)) == 3
    assert "missed its tolerance" in capsys.readouterr().err


# temps
def test_temps_solar_mass(tmp_path):
    code, text = run(tmp_path, "temps", "--mass", "1.989e30", "--rmin", "2.95e3", "--rmax", "2.95e4", "--steps", "10")
    assert code == 0
    rows = data_rows(text)
    assert len(rows) == 10
    assert list(rows[0]) == ["R_m", "T_K", "ratio_to_hawking", "interior"]
    assert float(rows[0]["ratio_to_hawking"]) == pytest.approx(1.0, rel=5e-3)
    assert rows[0]["interior"] == "1" and rows[1]["interior"] == "0"
    assert "# T_H " in text and "# r_S " in text


def test_temps_natural_units(tmp_path):
    code, text = run(tmp_path, "temps", "--units", "natural", "--mass", "1")
    assert code == 0
    header = dict(line[2:].split(" ", 1) for line in text.splitlines() if line.startswith("# "))
    assert float(header["T_H"]) == pytest.approx(1 / (8 * math.pi), rel=1e-15)
    assert float(header["r_S"]) == 2.0


def test_temps_body(tmp_path):
    code, text = run(tmp_path, "temps", "--body", "earth")
    assert code == 0
    assert "surface_T" in text


@pytest.mark.parametrize("argv", [["temps", "--mass", "0"], ["temps"], ["temps", "--units", "cgs", "--mass", "1"]])
def test_temps_usage_errors(tmp_path, argv):
    code, _ = run(tmp_path, *argv)
    assert code == 2


# gauge-check
def test_gauge_check(tmp_path):
    code, text = run(tmp_path, "gauge-check", "--trials", "1000", "--seed", "42")
    assert code == 0
    rows = data_rows(text)
    assert len(rows) == 1000
    assert list(rows[0]) == ["trial", "seed", "residual_gauge", "residual_bianchi", "pass"]
    assert all(r["pass"] == "1" for r in rows)


def test_gauge_check_zero_trials(tmp_path):
    code, _ = run(tmp_path, "gauge-check", "--trials", "0")
    assert code == 2


def test_gauge_check_failure_exits_6_with_seed(tmp_path, capsys, monkeypatch):
    import freefall.lingrav as lingrav

    monkeypatch.setattr(lingrav, "GAUGE_TOLERANCE", -1.0)
    code, text = run(tmp_path, "gauge-check", "--trials", "3", "--seed", "5")
    assert code == 6
    first_seed = data_rows(text)[0]["seed"]
    err = capsys.readouterr().err
    assert f"(seed {first_seed})" in err
    assert "A=[[" in err and "k=[" in err and "xi=[" in err


# determinism and plumbing
@pytest.mark.parametrize(
    "argv",
    [
        ["frames", "--metric", "gullstrand-painleve", "--point", "0,3,1,0.5"],
        ["spectrum", "--steps", "8", "--workers", "3"],
        ["temps", "--mass", "1.989e30", "--steps", "7"],
        ["gauge-check", "--trials", "50", "--seed", "9", "--workers", "4"],
    ],
)
def test_outputs_are_byte_identical(tmp_path, argv):
    first = run(tmp_path, *argv, name="a.csv")
    second = run(tmp_path, *argv, name="b.csv")
    assert first[0] == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_stdout_is_the_default_output(capsys):
    assert main(["metric", "print", "--metric", "schwarzschild"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# Schwarzschild exterior")
    assert out == format_metric_spec(load_metric("schwarzschild"), [out.splitlines()[0][2:]])


@pytest.mark.parametrize("name", sorted(BUILTIN_METRICS))
def test_metric_print_round_trips(tmp_path, name):
    code, text = run(tmp_path, "metric", "print", "--metric", name)
    assert code == 0
    assert parse_metric_spec(text) == parse_metric_spec(builtin_spec_text(name))


def test_config_file_supplies_defaults(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"units": "natural", "mass": 2.0, "steps": 3}), encoding="utf-8")
    code, text = run(tmp_path, "--config", str(config), "temps")
    assert code == 0
    assert len(data_rows(text)) == 3
    code, text = run(tmp_path, "--config", str(config), "temps", "--steps", "5", name="explicit.csv")
    assert len(data_rows(text)) == 5


def test_bad_config_is_a_usage_error(tmp_path):
    config = tmp_path / "run.json"
    config.write_text("[1, 2]", encoding="utf-8")
    assert main(["--config", str(config), "temps", "--mass", "1"]) == 2


def test_unknown_subcommand_and_help():
    assert main(["warp"]) == 2
    assert main(["--help"]) == 0
    assert isinstance(FreefallCLI().parser.format_help(), str)
