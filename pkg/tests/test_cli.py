import json
import math
import subprocess
import sys

import pytest

from starban import cli
from starban.errors import NumericalFailure


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(out):
    data = json.loads(out)
    assert set(data["header"]) == {"command", "seed", "version"}
    return data["report"]


def test_laws_completion(capsys):
    code, out, _ = run(capsys, "laws", "--suite", "completion", "--max-dim", "5")
    assert code == 0
    check = report(out)["suites"]["completion"]["checks"][0]
    law = next(x for x in check["details"]["laws"] if x["law"] == "star_autonomy_cardinality")
    assert law["checked"] == 343 and law["failure_count"] == 0


def test_laws_unknown_suite(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["laws", "--suite", "nosuch"])
    assert info.value.code == 2


def test_laws_text(capsys):
    code, out, _ = run(capsys, "laws", "--suite", "posreal", "--text")
    assert code == 0
    assert out.splitlines()[-1] == "all checks passed"


@pytest.mark.parametrize("n, ratio", [(2, math.sqrt(2)), (4, 2.0)])
def test_tensor_gap(capsys, n, ratio):
    code, out, _ = run(capsys, "tensor-gap", "--rows", str(n), "--cols", str(n))
    assert code == 0
    assert abs(report(out)["ratio"] - ratio) <= 1e-9


def test_tensor_gap_rank_one(capsys):
    code, _, err = run(capsys, "tensor-gap", "--rows", "1", "--cols", "3")
    assert code == 2 and "error" in err


def test_norm(capsys):
    code, out, _ = run(capsys, "norm", "--space", "sum1(C,C)", "--vector", "[(3,0),(4,0)]")
    assert code == 0 and report(out)["norm"] == 7


def test_norm_text_and_file(capsys, tmp_path):
    vec = tmp_path / "v.txt"
    vec.write_text("[3, 4j]")
    code, out, _ = run(capsys, "norm", "--space", "sum2(C,C)", "--vector", str(vec), "--text")
    assert code == 0 and float(out) == 5


def test_norm_parse_error_reports_position(capsys):
    code, _, err = run(capsys, "norm", "--space", "sum1(C,", "--vector", "[1]")
    assert code == 2 and "position 7" in err


def test_norm_bad_vector(capsys):
    code, _, _ = run(capsys, "norm", "--space", "C", "--vector", "[(1,2,3)]")
    assert code == 2


def test_opnorm(capsys):
    m = json.dumps({"rows": 2, "cols": 2, "entries": [[1, 0], [0, 0], [0, 0], [1, 0]]})
    code, out, _ = run(capsys, "opnorm", "--dom", "sup(C,C)", "--cod", "sum1(C,C)", "--map", m)
    rep = report(out)
    assert code == 0
    assert rep["estimate"] == pytest.approx(2) and not rep["is_contraction"] and not rep["exact"]


def test_opnorm_bad_json(capsys):
    code, _, err = run(capsys, "opnorm", "--dom", "C", "--cod", "C", "--map", "{oops")
    assert code == 2 and "position" in err


def test_complete_table(capsys):
    code, out, _ = run(capsys, "complete", "table", "--max", "3")
    assert code == 0 and report(out)["dual"]["Fin(0)"] == "Inf"
    code, out, _ = run(capsys, "complete", "table", "--max", "3", "--text")
    assert "Fin(0)*  Inf" in out


def test_convolve_braid(capsys):
    f = json.dumps({"support": {"1": "fin:1"}})
    code, out, _ = run(capsys, "convolve", "--profile", "braid", "--f", f, "--g", f)
    assert code == 0 and report(out)["support"] == {"2": "inf"}


def test_convolve_bad_token(capsys):
    code, _, _ = run(capsys, "convolve", "--profile", "braid", "--f", '{"support": {"1": "x"}}', "--g", "{}")
    assert code == 2


def test_numerical_failure_exits_one(capsys, monkeypatch):
    def boom(*_):
        raise NumericalFailure("forced", 1.0)

    monkeypatch.setattr(cli.tensornorms, "correction_witness", boom)
    code, _, err = run(capsys, "tensor-gap", "--rows", "2", "--cols", "2")
    assert code == 1 and "numerical failure" in err


def test_bad_tolerance(capsys):
    code, _, _ = run(capsys, "norm", "--space", "C", "--vector", "[1]", "--tol", "0")
    assert code == 2


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "complete", "table", "--max", "2", "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["header"]["command"] == "complete"


def test_seed_in_header(capsys):
    _, out, _ = run(capsys, "laws", "--suite", "completion", "--seed", "11")
    assert json.loads(out)["header"]["seed"] == 11


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "starban", "norm", "--space", "sup(C,C)", "--vector", "[3,4]",
                           "--text"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "4"
