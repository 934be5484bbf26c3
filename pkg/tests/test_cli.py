import json
import subprocess
import sys

import pytest

from pearson_chaos.cli import main

GAUSS = '{"family": "gaussian", "mu": 0, "sigma": 1}'
STUDENT9 = '{"family": "student_t", "tau": 9}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_moments(capsys):
    assert run(capsys, "moments", "--params", GAUSS, "--pmax", "4")[:2] == (0, "1, 0, 1, 0, 3\n")
    code, out, _ = run(capsys, "moments", "--params", STUDENT9, "--pmax", "4")
    assert code == 0 and out.strip().endswith("243/35")
    code, out, _ = run(capsys, "moments", "--params", STUDENT9, "--pmax", "4", "--float")
    assert float(out.split(",")[-1]) == pytest.approx(243 / 35)


def test_moments_missing(capsys):
    code, _, err = run(capsys, "moments", "--params", '{"family": "student_t", "tau": 3}', "--pmax", "4")
    assert code == 2 and "moment does not exist" in err


@pytest.mark.parametrize(
    "params, n, key, want",
    [
        ('{"family": "gaussian"}', 5, "eta_n", "2"),
        ('{"family": "beta", "alpha": 1, "beta": 1}', 1, "eta_n", "3"),
        ('{"m": 0, "b0": 1, "b1": 0, "b2": "1/8"}', 3, "eta_n", "not chaotic"),
        ('{"m": 0, "b0": 1, "b1": 0, "b2": "1/8"}', 3, "chaotic", False),
        (STUDENT9, 1, "eta_tilde", "7/4"),
    ],
)
def test_grade(capsys, params, n, key, want):
    code, out, _ = run(capsys, "grade", "--params", params, "--n", str(n))
    assert code == 0 and json.loads(out)[key] == want


def test_bound(capsys, tmp_path):
    chaos = '{"kind": "homogeneous_sum", "base": {"family": "gaussian"}, "p": 2, "pattern": "chain"}'
    code, out, _ = run(capsys, "bound", "--params", GAUSS, "--chaos", chaos, "--n", "10")
    d = json.loads(out)
    assert code == 0 and d["U_int"] == "50/81" and d["lhs_exact"] == "25/81" and d["regime"] == "low-grade"
    code, out, _ = run(capsys, "bound", "--params", STUDENT9)
    assert json.loads(out)["rhs_sq"] == "0"


def test_params_from_file(capsys, tmp_path):
    f = tmp_path / "p.json"
    f.write_text(GAUSS)
    assert run(capsys, "moments", "--params", str(f), "--pmax", "2")[1] == "1, 0, 1\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["moments", "--params", "{bad json"],
        ["moments", "--params", "/nonexistent/file.json"],
        ["moments", "--params", '{"family": "nope"}'],
        ["converge", "{not json"],
        ["converge", '{"target": {"family": "gaussian"}, "chaos": {"kind": "first_chaos"}, "k_grid": [2, 1], '
                     '"mc_n": 1000}'],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 2


@pytest.mark.parametrize("suite", ["identities", "grades", "hermite"])
def test_verify_passing_suites(capsys, suite):
    code, out, _ = run(capsys, "verify", suite)
    assert code == 0 and "FAIL" not in out


def test_verify_reports_tabulated_discrepancies(capsys):
    code, out, _ = run(capsys, "verify", "table1")
    assert code == 1
    fails = [line for line in out.splitlines() if line.startswith("FAIL")]
    assert len(fails) == 1 and "d2" in fails[0]
    assert "PASS  all coefficients with d2 sign fixed" in out


def test_verify_stein_small_grid(capsys):
    code, out, _ = run(capsys, "verify", "stein", "--n", "5")
    assert code == 0 and out.count("PASS") == 7


def test_converge_bundled_and_deterministic(capsys, tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["converge", "student_t_self", "--n", "5000", "--out", str(out1)]) == 0
    assert main(["converge", "student_t_self", "--n", "5000", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    header, row = out1.read_text().splitlines()
    assert header.startswith("k,m1,m2,m3,m4,U_value")
    assert row.split(",")[11] == "0"  # exact U integral


def test_converge_chain_decreasing_U(capsys):
    code, out, _ = run(capsys, "converge", "gaussian_chain", "--n", "20000", "--float")
    lines = out.splitlines()[1:]
    u_int = [float(line.split(",")[11]) for line in lines]
    assert code == 0 and u_int[0] > u_int[1] > u_int[2] > 0


def test_simulate(capsys, tmp_path):
    f = tmp_path / "x.txt"
    code, out, _ = run(capsys, "simulate", "--params", '{"family": "gamma", "alpha": 2}', "--n", "3000",
                       "--out", str(f))
    d = json.loads(out)
    assert code == 0 and d["exact_moments"][:2] == ["2", "6"] and len(f.read_text().splitlines()) == 3000


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "pearson_chaos.cli", "moments", "--params", GAUSS],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout == "1, 0, 1, 0, 3\n"
