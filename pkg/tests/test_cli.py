import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest

from isocurve import cli
from isocurve.scene import load_scene

from conftest import GOLDEN, REGEN, SCENES

SUITE = os.path.join(SCENES, "suite.scene")
VIOLATIONS = os.path.join(SCENES, "violations.scene")


def invoke(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def assert_close(got, ref, path="$"):
    """Structural equality with a relative tolerance on floats."""
    if isinstance(ref, float) or isinstance(got, float):
        assert isinstance(got, (int, float)) and isinstance(ref, (int, float)), path
        assert math.isclose(got, ref, rel_tol=1e-9, abs_tol=1e-12), (path, got, ref)
    elif isinstance(ref, dict):
        assert isinstance(got, dict) and got.keys() == ref.keys(), path
        for k in ref:
            assert_close(got[k], ref[k], f"{path}.{k}")
    elif isinstance(ref, list):
        assert isinstance(got, list) and len(got) == len(ref), path
        for i, (a, b) in enumerate(zip(got, ref)):
            assert_close(a, b, f"{path}[{i}]")
    else:
        assert got == ref, (path, got, ref)


@pytest.fixture(scope="module")
def suite_json():
    return cli.to_json(cli.run(load_scene(SUITE), "run"))


def test_suite_golden(suite_json):
    path = os.path.join(GOLDEN, "suite_run.json")
    if REGEN or not os.path.exists(path):
        with open(path, "w") as fh:
            fh.write(suite_json)
    with open(path) as fh:
        ref = json.load(fh)
    got = json.loads(suite_json)
    assert got["pass"] is True
    assert_close(got, ref)


def test_output_is_byte_identical_across_processes(suite_json, tmp_path):
    out = tmp_path / "run.json"
    proc = subprocess.run([sys.executable, "-m", "isocurve", "run", "--scene", SUITE,
                           "--output", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.read_bytes() == suite_json.encode()


def test_csv_is_deterministic():
    scene = load_scene(SUITE)
    a = cli.to_csv(cli.run(scene, "theorem-verify", {}, "t35-circle"))
    b = cli.to_csv(cli.run(scene, "theorem-verify", {}, "t35-circle"))
    assert a == b
    path = os.path.join(GOLDEN, "t35_circle.csv")
    if REGEN or not os.path.exists(path):
        with open(path, "w", newline="\n") as fh:
            fh.write(a)
    with open(path) as fh:
        ref = list(csv.reader(l for l in fh if not l.startswith("#")))
    got = list(csv.reader(l for l in io.StringIO(a) if not l.startswith("#")))
    assert len(got) == len(ref) and got[0] == ref[0]
    for row, rrow in zip(got[1:], ref[1:]):
        assert row[:2] == rrow[:2]
        assert_close([float(x) for x in row[2:]], [float(x) for x in rrow[2:]])


def test_isometry_check_plane_cylinder(capsys):
    code, out, _ = invoke(capsys, "isometry-check", "--scene", SUITE, "--task", "iso-pc")
    assert code == 0
    rep = json.loads(out)
    iso = rep["tasks"][0]["result"]["isometry"]
    assert max(iso["max_form"].values()) < 1e-12 and iso["pass"] is True
    assert rep["tool"] == "isocurve" and len(rep["scene_sha256"]) == 64


def test_theorem_csv_per_mode(capsys):
    code, out, _ = invoke(capsys, "theorem-verify", "--scene", SUITE, "--task", "t35-circle",
                          "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# task t35-circle (theorem-verify) pass"
    assert lines[1] == "theorem,mode,s,lhs,rhs,residual"
    modes = {l.split(",")[1] for l in lines[2:]}
    assert modes == {"paper_expansion", "direct_transport"}
    assert len(lines) == 2 + 2 * 13


def test_mode_flag_restricts_modes(capsys):
    code, out, _ = invoke(capsys, "theorem-verify", "--scene", SUITE, "--task", "t35-circle",
                          "--mode", "direct")
    res = json.loads(out)["tasks"][0]
    assert code == 0 and res["pass"] is None
    assert [r["mode"] for r in res["result"]["reports"]] == ["direct_transport"]
    assert res["params"]["mode"] == "direct"


def test_classify_translated_circle(capsys):
    code, out, _ = invoke(capsys, "classify", "--scene", SUITE, "--task", "classify-translated",
                          "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(l for l in out.splitlines() if not l.startswith("#")))
    # the origin lies in the plane of the circle, so mu = 0 wherever delta != 0
    off = [r for r in rows if abs(float(r["delta"])) > 1e-9]
    assert off and {r["kind"] for r in off} == {"osculating"}


def test_plot_data_text(capsys, tmp_path):
    target = tmp_path / "plot.txt"
    code, out, _ = invoke(capsys, "plot-data", "--scene", SUITE, "--output", str(target))
    assert code == 0 and out == ""
    lines = target.read_text().splitlines()
    assert lines[1] == "# s x y z u v kappa tau kappa_n kappa_g"
    assert len(lines[2].split()) == 10


def test_adhoc_task(capsys):
    code, out, _ = invoke(capsys, "theorem-verify", "--scene", SUITE, "--pair", "pc",
                          "--curve", "circle", "--theorem", "geodesic", "--samples", "5")
    assert code == 0
    task = json.loads(out)["tasks"][0]
    assert task["name"] == "theorem-verify:cli" and len(task["result"]["samples"]) == 5


def test_orientation_and_literal_flags(capsys):
    code, out, _ = invoke(capsys, "isometry-check", "--scene", SUITE, "--task", "iso-pc",
                          "--orientation", "flip", "--grid", "5x5", "--paper-literal")
    task = json.loads(out)["tasks"][0]
    assert code == 0
    assert task["result"]["isometry"]["orientation_sign"] == -1
    assert task["params"]["grid"] == [5, 5] and task["params"]["paper_literal"] is True


def test_violations_exit_one_with_partial_results(capsys):
    code, out, _ = invoke(capsys, "run", "--scene", VIOLATIONS)
    assert code == 1
    rep = json.loads(out)
    verdicts = {t["name"]: t["pass"] for t in rep["tasks"]}
    assert verdicts == {"iso-ps": False, "t32-printed-b": False, "asymptotic-line": False}
    assert "hypothesis_not_met" in rep["tasks"][2]["result"]


def test_rhs_flag_repairs_violation(capsys):
    code, _, _ = invoke(capsys, "theorem-verify", "--scene", VIOLATIONS, "--task", "t32-printed-b",
                        "--rhs", "corrected")
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["run", "--scene", "/nonexistent.scene"],
    ["run", "--scene", SUITE, "--task", "no-such-task"],
    ["surface-report", "--scene", SUITE, "--surface", "torus"],
])
def test_input_errors_exit_two(capsys, argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 2 and out == "" and err.startswith("isocurve: error:")


def test_bad_scene_exit_two(capsys, tmp_path):
    p = tmp_path / "bad.scene"
    p.write_text("[surface M]\nbuiltin = torus\n")
    code, _, err = invoke(capsys, "run", "--scene", str(p))
    assert code == 2 and "bad.scene:2:11" in err


@pytest.mark.parametrize("flag", [["--grid", "1x3"], ["--samples", "0"], ["--tol", "-1"],
                                  ["--mode", "exact"]])
def test_bad_flags_exit_two(flag):
    with pytest.raises(SystemExit) as err:
        cli.main(["run", "--scene", SUITE, *flag])
    assert err.value.code == 2


def test_fmt():
    assert cli.fmt(0.1 + 0.2) == "0.3"
    assert cli.fmt(float("nan")) == "nan" and cli.fmt(None) == "" and cli.fmt(True) == "true"
    assert cli.normalize({"x": float("inf"), "y": [1e-20]}) == {"x": "inf", "y": [1e-20]}
