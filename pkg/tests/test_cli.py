import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from probbell import cli
from probbell.moments import joint_moment, parse_dist
from probbell.probabilistic import prob_r_bell_poly, prob_r_stirling2


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table_stirling_csv(capsys):
    code, out, _ = run(capsys, "table", "stirling", "--n-max", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,0,1,2,3,4"
    assert lines[-1] == "4,0,1,7,6,1"
    assert all(len(line.split(",")) == 6 for line in lines)
    assert "\r" not in out


def test_table_prob_stirling_unit_variable_matches_classical(capsys):
    _, classical, _ = run(capsys, "table", "stirling", "--n-max", "6")
    _, prob, _ = run(capsys, "table", "prob-stirling", "--dist", "det:1", "--n-max", "6")
    assert prob == classical


def test_table_bell(capsys):
    code, out, _ = run(capsys, "table", "bell", "--n-max", "3")
    assert code == 0
    assert out == "n,value\n0,1\n1,1\n2,2\n3,5\n"
    _, plain, _ = run(capsys, "table", "bell", "--n-max", "3", "--format", "plain")
    assert [line.split(": ")[1] for line in plain.splitlines()] == ["1", "1", "2", "5"]


def test_table_json_rationals(capsys):
    code, out, _ = run(
        capsys, "table", "prob-r-stirling", "--dist", "bernoulli:1/2", "--n-max", "3", "--r", "1", "--format", "json"
    )
    assert code == 0
    doc = json.loads(out)
    model = parse_dist("bernoulli:1/2")
    for row in doc["rows"]:
        n = row["n"]
        for k, v in enumerate(row["values"]):
            assert F(int(v["num"]), int(v["den"])) == prob_r_stirling2(model, n, k, 1)
            assert isinstance(v["num"], str)


def test_table_prob_bell_x(capsys):
    code, out, _ = run(capsys, "table", "prob-r-bell", "--dist", "poisson:2/3", "--n-max", "4", "--r", "2", "--x=-1/2")
    assert code == 0
    model = parse_dist("poisson:2/3")
    values = [F(line.split(",")[1]) for line in out.splitlines()[1:]]
    assert values == [prob_r_bell_poly(model, n, 2, F(-1, 2)) for n in range(5)]


def test_table_requires_dist_for_prob_kinds(capsys):
    code, _, err = run(capsys, "table", "prob-bell", "--n-max", "3")
    assert code == 2
    assert "--dist" in err


def test_table_bad_dist(capsys):
    code, _, err = run(capsys, "table", "prob-bell", "--dist", "bernoulli:one", "--n-max", "3")
    assert code == 2
    assert "'one'" in err


def test_table_unsupported_kind():
    with pytest.raises(SystemExit) as info:
        cli.main(["table", "lah", "--n-max", "3"])
    assert info.value.code == 2


def test_eval_examples(capsys):
    code, out, _ = run(capsys, "eval", "prob-r-bell", "--dist", "bernoulli:1/2", "--n", "3", "--r", "1", "--x", "1")
    assert code == 0
    assert F(out.strip()) == prob_r_bell_poly(parse_dist("bernoulli:1/2"), 3, 1, 1)
    code, out, _ = run(capsys, "eval", "spivey-rhs", "--dist", "det:1", "--y", "1", "--r", "0", "--n", "3", "--j", "2")
    assert (code, out) == (0, "52\n")
    code, out, _ = run(capsys, "eval", "joint-moment", "--dist", "bernoulli:1/2", "--p", "1", "--ls", "1,1")
    assert (code, out) == (0, "1/2\n")
    assert F(out.strip()) == joint_moment(parse_dist("bernoulli:1/2"), 1, (1, 1))


def test_eval_json(capsys):
    code, out, _ = run(capsys, "eval", "moment", "--dist", "geometric:1/3", "--n", "1", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"target": "moment", "value": {"num": "3", "den": "1"}}


def test_eval_missing_param(capsys):
    code, _, err = run(capsys, "eval", "spivey-rhs", "--dist", "det:1", "--n", "3")
    assert code == 2
    assert "--y" in err and "--r" in err and "--j" in err


def test_eval_bad_exponents(capsys):
    code, _, err = run(capsys, "eval", "joint-moment", "--dist", "det:1", "--p", "1", "--ls", "1,0")
    assert code == 2
    assert "positive" in err


def test_verify_eq9(capsys):
    code, out, _ = run(capsys, "verify", "EQ9", "--max-sum", "8")
    assert code == 0
    assert "cases=45" in out


def test_verify_subset_of_models(capsys):
    code, out, _ = run(capsys, "verify", "T2_7", "--dists", "det:1,bernoulli:1/2", "--max-sum", "6", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["failed"] == 0
    assert doc["reports"][0]["grid"]["models"] == ["det:1", "bernoulli:1/2"]


def test_verify_dists_with_commas(capsys):
    code, out, _ = run(
        capsys, "verify", "T2_5", "--dists", "binomial:3,1/3,finite:0:1/3,1:1/3,5:1/3", "--max-sum", "3", "--format", "json"
    )
    assert code == 0
    assert json.loads(out)["reports"][0]["grid"]["models"] == ["binomial:3,1/3", "finite:0:1/3,1:1/3,5:1/3"]


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "verify", "EQ8", "EQ9", "--max-sum", "5", "--format", "csv")
    assert code == 0
    assert out == "identity,cases,failures,status\nEQ8,6,0,pass\nEQ9,21,0,pass\n"


def test_verify_invalid_id(capsys):
    code, _, err = run(capsys, "verify", "EQ10")
    assert code == 2
    assert "EQ10" in err


def test_verify_failure_exit_code(capsys, monkeypatch):
    from probbell import harness

    def bogus(grid):
        yield harness.IdentityCase("EQ8", None, (("n", 0),)), F(1), F(2)

    monkeypatch.setitem(harness._SUITES, "EQ8", bogus)
    code, out, _ = run(capsys, "verify", "EQ8")
    assert code == 1
    assert "FAIL" in out and "1 of 1 identities FAILED" in out


def test_mc_examples(capsys):
    code, out, _ = run(capsys, "mc", "--dist", "det:1", "--n", "3", "--k", "2", "--samples", "1000", "--seed", "7")
    assert code == 0
    assert "z        0.0" in out
    code, out, _ = run(capsys, "mc", "--dist", "bernoulli:1/2", "--n", "2", "--k", "2", "--samples", "1000000", "--seed", "42", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["exact"] == "3/2" and abs(doc["z_score"]) <= 5


def test_mc_threshold_flag(capsys):
    # a zero threshold fails any run with sampling noise
    code, _, _ = run(capsys, "mc", "--dist", "poisson:1", "--n", "3", "--k", "1", "--samples", "1000", "--seed", "1", "--threshold", "0")
    assert code == 1


def test_mc_bad_spec(capsys):
    code, _, err = run(capsys, "mc", "--dist", "normal:0", "--n", "1", "--k", "1")
    assert code == 2
    assert "normal" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "probbell", "eval", "stirling", "--n", "4", "--k", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "7\n"


def test_identical_invocations_identical_output(capsys):
    argv = ["table", "prob-r-stirling", "--dist", "finite:0:1/3,1:1/3,5:1/3", "--n-max", "6", "--r", "2", "--format", "json"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
