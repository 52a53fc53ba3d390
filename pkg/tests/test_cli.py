import json
import re
import subprocess
import sys

import numpy as np
import pytest

from opmetric.checks import property_names, run_suite
from opmetric.chk import ClosedOperator
from opmetric.cli import main
from opmetric.dynamics import HBiholomorphicMap
from opmetric.fileio import parse_operator_file, write_generator_file, write_operator_file


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, mat in {"one": [[1.0]], "zero": [[0.0]], "two": [[2.0]], "wide": [[1.0, 0.0]]}.items():
        paths[name] = str(tmp_path / f"{name}.json")
        write_operator_file(paths[name], ClosedOperator(mat))
    paths["trans"] = str(tmp_path / "trans.json")
    write_generator_file(paths["trans"], HBiholomorphicMap.from_params([[0.5]], [[1.0]], [[1.0]]))
    paths["rot"] = str(tmp_path / "rot.json")
    write_generator_file(paths["rot"], HBiholomorphicMap.from_params([[0.0]], [[1j]], [[1.0]]))
    paths["out"] = str(tmp_path / "out.json")
    paths["nan"] = str(tmp_path / "nan.json")
    with open(paths["nan"], "w") as fh:
        fh.write('{"rows": 1, "cols": 1, "dimH": 1, "dimK": 1, "data": [[NaN, 0]]}')
    return paths


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_dist(files, capsys):
    code, doc = _run(capsys, "dist", files["one"], files["zero"])
    assert code == 0 and abs(doc["value"] - 0.88137358701954294) <= 1e-10
    code, doc = _run(capsys, "dist", files["one"], files["one"])
    assert code == 0 and doc["value"] == 0


def test_value_printed_with_17_digits(files, capsys):
    main(["dist", files["one"], files["zero"]])
    text = capsys.readouterr().out
    assert re.search(r'"value": 0\.\d{17}\n', text)


def test_midpoint_and_geodesic(files, capsys):
    code, doc = _run(capsys, "midpoint", files["zero"], files["one"], "-o", files["out"])
    assert code == 0
    assert parse_operator_file(files["out"]).mat[0, 0] == pytest.approx(0.45508986056222733)
    assert doc["value"]["data"][0][0] == pytest.approx(0.45508986056222733)
    code, doc = _run(capsys, "geodesic", files["zero"], files["one"], "--t", "0.5")
    assert code == 0 and doc["value"]["data"][0][0] == pytest.approx(0.45508986056222733)
    code, _ = _run(capsys, "geodesic", files["zero"], files["one"], "--t", "2")
    assert code == 1


def test_barycenter_and_center(files, capsys):
    code, doc = _run(capsys, "barycenter", files["zero"], files["one"], files["two"])
    assert code == 0 and doc["value"]["rows"] == 1
    code, doc = _run(capsys, "center", files["zero"], files["one"], "--tol", "1e-6", "-o", files["out"])
    assert code == 0 and doc["value"] == pytest.approx(0.88137358701954303 / 2, abs=1e-6)


def test_center_no_convergence(files, capsys):
    code, _ = _run(
        capsys, "center", files["zero"], files["one"], files["two"], "--tol", "1e-14", "--max-iter", "2"
    )
    assert code == 3


def test_fixed_point(files, capsys):
    code, doc = _run(capsys, "fixed-point", "--gen", files["rot"], "--start", files["one"], "-o", files["out"])
    assert code == 0 and doc["converged"] and doc["value"] <= 1e-6
    code, doc = _run(capsys, "fixed-point", "--gen", files["trans"], "--start", files["zero"], "--max-iter", "3")
    assert code == 3 and not doc["orbit_bounded"]


def test_orbit(files, capsys):
    code, doc = _run(capsys, "orbit", "--gen", files["trans"], "--start", files["zero"], "--depth", "4")
    assert code == 0 and doc["points"] == 9
    assert doc["growth_per_step"] == pytest.approx(0.54930614433405485, abs=1e-9)


def test_input_errors(files, capsys):
    assert main(["dist", files["one"], files["nan"]]) == 1
    assert main(["dist", files["one"], files["wide"]]) == 1
    assert main(["dist", files["one"], files["one"] + ".missing"]) == 1
    assert main(["orbit", "--gen", files["trans"], "--start", files["zero"], "--depth", "0"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["dist", files["one"]])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
    capsys.readouterr()


def test_numerical_error_exit_code(files, tmp_path, capsys):
    big = str(tmp_path / "big.json")
    write_operator_file(big, ClosedOperator([[1e9]]))
    assert main(["dist", files["zero"], big]) in (0, 2)
    assert main(["midpoint", files["zero"], big]) == 2
    capsys.readouterr()


def test_check_small(capsys):
    code, doc = _run(capsys, "check", "--suite", "metric", "--samples", "3", "--seed", "1")
    assert code == 0 and doc["passed"] and doc["value"] == 0
    assert [p["name"] for p in doc["properties"]] == ["metric." + n for n in property_names("metric")]


def test_run_suite_validation():
    with pytest.raises(ValueError):
        run_suite("nope", 3, 0)
    with pytest.raises(ValueError):
        run_suite("metric", 0, 0)


def test_module_entry_point(files):
    out = subprocess.run(
        [sys.executable, "-m", "opmetric", "dist", files["one"], files["zero"]],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(out.stdout)["value"] == pytest.approx(0.88137358701954294, abs=1e-10)
    np.testing.assert_equal(out.returncode, 0)
