import json
import math
import subprocess
import sys

import pytest

from confeig.cli import EXIT_AUDIT_FAIL, EXIT_INVALID, EXIT_OK, EXIT_PARTIAL, main, parse_domain, read_results
from confeig.conformal import ConformalMap, DomainFileError, save_domain


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_disk_round_trip(tmp_path, capsys):
    out = tmp_path / "d.json"
    code, _, err = run(
        ["solve", "--domain", "disk", "--bc", "dirichlet", "--basis", 8, "--order", 18,
         "--window", "1:4", "--steps", 120, "--out", out, "--no-cache"],
        capsys,
    )
    assert code == EXIT_OK
    data, results = read_results(out)
    assert data["area"] == pytest.approx(3.141592653589793)
    assert [round(r.omega, 5) for r in results] == [2.40483, 3.83171]
    assert [r.multiplicity_flag for r in results] == [False, True]
    assert "lambda=" in err
    data2 = json.loads(out.read_text())
    assert data2["eigenvalues"][0]["lambda"] == pytest.approx(results[0].lam)


def test_scan_outputs_brackets_and_curve(tmp_path, capsys):
    curve = tmp_path / "c.csv"
    code, out, _ = run(
        ["scan", "--domain", "ellipse:0.2", "--bc", "neumann", "--basis", 8, "--order", 10,
         "--window", "1:3", "--steps", 100, "--curve", curve, "--no-cache"],
        capsys,
    )
    assert code == EXIT_OK
    assert len(json.loads(out)["brackets"]) == 3
    assert curve.read_text().startswith("omega,neg_log_cond\n")


def test_domain_file_and_grunsky_dump(tmp_path, capsys):
    dom = tmp_path / "dom.toml"
    save_domain(ConformalMap.ellipse(0.2), dom)
    gcsv = tmp_path / "g.csv"
    code, out, _ = run(
        ["scan", "--domain", dom, "--bc", "neumann", "--basis", 4, "--order", 4,
         "--window", "1:2", "--steps", 10, "--grunsky-csv", gcsv, "--cache-dir", tmp_path / "cache"],
        capsys,
    )
    assert code == EXIT_OK
    assert gcsv.read_text().splitlines()[1] == "1,1,0.2,0.0"
    assert list((tmp_path / "cache").glob("*.npz"))


def test_weak_results_give_partial_exit(capsys):
    code, _, _ = run(
        ["solve", "--domain", "disk", "--bc", "dirichlet", "--basis", 6, "--order", 10,
         "--window", "2.2:2.6", "--steps", 30, "--cond-min", 1e30, "--no-cache"],
        capsys,
    )
    assert code == EXIT_PARTIAL


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--domain", "nowhere.json", "--bc", "neumann", "--window", "1:2"],
        ["solve", "--domain", "ellipse:abc", "--bc", "neumann", "--window", "1:2"],
        ["solve", "--domain", "disk", "--bc", "neumann", "--window", "0.01:2"],
        ["solve", "--domain", "disk", "--bc", "neumann", "--window", "2"],
        ["solve", "--domain", "disk", "--bc", "robin", "--window", "1:2"],
        ["solve", "--domain", "disk", "--bc", "neumann", "--window", "1:2", "--basis", 0],
        ["perturb", "--bc", "dirichlet", "--j", "0"],
        ["audit"],
        ["frobnicate"],
    ],
)
def test_invalid_input_exit_code(argv):
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    assert code == EXIT_INVALID


def test_disk_reference(capsys):
    code, out, _ = run(["disk-reference", "--bc", "neumann", "--count", 3], capsys)
    assert code == EXIT_OK
    ev = json.loads(out)["eigenvalues"]
    assert ev[0]["omega"] == 0.0 and ev[1]["multiplicity"] == 2


def _results_file(path, bc, lams, area, flags=None):
    flags = flags or [False] * len(lams)
    path.write_text(json.dumps({
        "bc": bc, "N": 10, "K": 10, "area": area,
        "eigenvalues": [
            {"omega": lam ** 0.5, "lambda": lam, "cond": 1e12, "iterations": 5,
             "multiplicity_flag": f, "converged": True, "weak": False}
            for lam, f in zip(lams, flags)
        ],
    }))
    return path


def test_audit_exit_codes(tmp_path, capsys):
    d = _results_file(tmp_path / "d.json", "dirichlet", [2.404825557695773**2], math.pi)
    n = _results_file(tmp_path / "n.json", "neumann", [1.841183781340659**2], math.pi, [True])
    code, out, _ = run(["audit", "--dirichlet", d, "--neumann", n, "--out", tmp_path / "a.json"], capsys)
    assert code == EXIT_OK
    assert all(line.startswith("PASS") for line in out.splitlines())
    assert json.loads((tmp_path / "a.json").read_text())["checks"]
    bad = _results_file(tmp_path / "bad.json", "dirichlet", [5.0], math.pi)
    code, out, _ = run(["audit", "--dirichlet", bad], capsys)
    assert code == EXIT_AUDIT_FAIL and "FAIL faber-krahn" in out
    code, _, _ = run(["audit", "--neumann", d], capsys)
    assert code == EXIT_INVALID


def test_parse_domain_shorthands():
    assert parse_domain("disk:2").r == 2.0
    assert parse_domain("hourglass").coeffs == ConformalMap.hourglass(1.0).coeffs
    with pytest.raises(DomainFileError):
        parse_domain("ellipse")


def test_console_script_version():
    out = subprocess.run([sys.executable, "-m", "confeig.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "0.1.0" in out.stdout
