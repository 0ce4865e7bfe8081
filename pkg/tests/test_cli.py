import json
import subprocess
import sys

import pytest

from liebialg.cli import main, run
from liebialg.fields import TowerElem, TowerSpec
from liebialg.matrices import MatK


def cli(*args):
    proc = subprocess.run([sys.executable, "-m", "liebialg.cli", *args], capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def test_verify_rmatrix_trivial():
    report, code = run(["verify-rmatrix", "--n", "3", "--triple", "trivial"])
    assert code == 0
    assert report["cyb_zero"] and report["r_plus_r21_equals_omega"]


def test_verify_rmatrix_with_triple_file(tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"n": 3, "gamma1": [1], "gamma2": [2], "tau": {"1": 2}}))
    report, code = run(["verify-rmatrix", "--triple", str(path)])
    assert code == 0 and report["triple"]["gamma1"] == [1]


def test_verify_rmatrix_with_params():
    report, code = run(["verify-rmatrix", "--n", "3", "--params", "1/2"])
    assert code == 0


def test_invalid_triple_exit_2():
    _, code = run(["verify-rmatrix", "--triple", '{"n": 3, "gamma1": [1], "gamma2": [1], "tau": {"1": 1}}'])
    assert code == 2
    _, code = run(["verify-rmatrix", "--triple", "/nonexistent/file.json"])
    assert code == 2


def test_verify_bialgebra():
    report, code = run(["verify-bialgebra", "--n", "2"])
    assert code == 0 and report["passed"]


def test_manin_check_reports_reconstruction_mismatch():
    report, code = run(["manin-check", "--n", "2", "--d", "-1"])
    assert report["dual"] and report["isotropic_plus"]
    assert report["r_equals_sqrt_d_over_n_rdj21"]
    assert code == 1


def test_construct_cocycle():
    report, code = run(["construct-cocycle", "--d", "-1", "--diag", "2,5,13,10"])
    assert code == 0 and report["verified"]
    X = MatK.from_json(report["cocycle"]["X"])
    assert X.star() @ X == MatK.diag([2, 5, 13, 10], X.spec)


def test_construct_cocycle_not_closed():
    report, code = run(["construct-cocycle", "--d", "5", "--diag", "2"])
    assert code == 1 and report["error"] == "NotClosed"


def test_cohomologous_verdict():
    report, code = run(["cohomologous", "--d", "5", "--A", "2,2", "--B", "1,4"])
    assert code == 0 and report["verdict"] is False
    report, code = run(["cohomologous", "--d", "-1", "--A", "2,5", "--B", "1,10"])
    assert code == 0 and report["verdict"] is True


def test_classify_with_product():
    report, code = run(["classify", "--d", "5", "--diag", "2,2", "--times", "2,1"])
    assert code == 0
    assert report["class_vector"] == ["2"]
    assert report["product_class_vector"] == ["1"]
    assert report["quaternions"][0]["split"] is False


def test_lambda():
    assert run(["lambda", "--d", "5", "--lambda-square", "2"])[0]["kind"] == "twisted"
    assert run(["lambda", "--d", "5", "--lambda-square", "20"])[0]["kind"] == "quadratic"
    assert run(["lambda", "--d", "5", "--lambda-square", "9"])[0]["kind"] == "basic"
    assert run(["lambda", "--d", "5", "--lambda-square", "0"])[1] == 2


def test_antidiag_example():
    report, code = run(["antidiag", "--n", "3"])
    assert code == 0 and report["accepted"]


def test_antidiag_matrix_file(tmp_path):
    K5 = TowerSpec.quadratic(5)
    r = K5.sqrt_d()
    path = tmp_path / "x.json"
    path.write_text(json.dumps(MatK([[2 + r, 2 - r], [1, 1]], K5).to_json()))
    report, code = run(["antidiag", "--matrix", str(path)])
    assert code == 0 and "normalized" in report


def test_twisted_identity_rejected():
    report, code = run(["twisted", "--n", "2", "--d", "-1", "--dprime", "2"])
    assert code == 1 and report["accepted"] is False


def test_twisted_accepted(tmp_path):
    KI = TowerSpec.quadratic(-1)
    i = KI.sqrt_d()
    path = tmp_path / "q.json"
    path.write_text(json.dumps(MatK([[-1 - i, -1], [-1 - i, i]], KI).to_json()))
    report, code = run(["twisted", "--matrix", str(path), "--d", "-1", "--dprime", "-2"])
    assert code == 0 and report["accepted"]


def test_quat_commands():
    report, code = run(["quat", "symbol", "-a", "2", "-b", "5", "-p", "5"])
    assert code == 0 and report["symbols"] == {"5": -1}
    report, code = run(["quat", "iso", "-a", "-1", "-b", "-1", "--a2", "-1", "--b2", "-2"])
    assert code == 0 and report["isomorphic"] is True
    report, code = run(["quat", "solve-norm", "-c", "2", "-e", "2", "-d", "5"])
    assert code == 0 and report["verified"]
    u = TowerElem.from_json(report["u"])
    v = TowerElem.from_json(report["v"])
    assert u.norm() + 2 * v.norm() == 2


def test_solve_norm_obstructed_and_undecided():
    _, code = run(["quat", "solve-norm", "-c", "1", "-e", "-1", "-d", "-1"])
    assert code == 1
    report, code = run(["quat", "solve-norm", "-c", "7", "-e", "3", "-d", "5", "--budget-height", "0"])
    assert code in (0, 3)
    if code == 3:
        assert report["status"] == "undecided"


@pytest.mark.parametrize(
    "argv",
    [
        ["construct-cocycle", "--d", "4", "--diag", "1"],
        ["construct-cocycle", "--d", "5"],
        ["construct-cocycle", "--d", "abc", "--diag", "1"],
        ["cohomologous", "--d", "5", "--A", "1,2", "--B", "1"],
        ["manin-check", "--n", "2"],
        ["twisted", "--n", "2", "--d", "5", "--dprime", "5"],
        ["quat", "symbol", "-a", "0", "-b", "1"],
        ["quat", "symbol", "-a", "1", "-b", "1", "-p", "4"],
        ["no-such-command"],
    ],
)
def test_invalid_input_exit_2(argv):
    _, code = run(argv)
    assert code == 2


def test_negative_diag_over_gaussian_field():
    report, code = run(["construct-cocycle", "--d", "-1", "--diag=-1,-1"])
    assert code == 1 and report["error"] == "NotPositive"


def test_json_output_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["cohomologous", "--d", "5", "--A", "2,2", "--B", "1,4", "--json", str(out)]) == 0
    assert json.loads(out.read_text())["verdict"] is False


def test_byte_identical_output():
    args = ["construct-cocycle", "--d", "5", "--diag", "2,3,6"]
    first = cli(*args)
    second = cli(*args)
    assert first[0] == 0
    assert first[1] == second[1]
    assert json.loads(first[1])["verified"] is True
    assert "liebialg: ok" in first[2]


def test_help_exits_zero():
    code, out, _ = cli("--help")
    assert code == 0 and "construct-cocycle" in out
