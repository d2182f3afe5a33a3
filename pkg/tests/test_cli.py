import csv
import io
import json
import subprocess
import sys

import pytest

from derived_values import GAMMA1, LAMBDA
from limodel.cli import EXIT_CODES_HELP, build_parser, main, parse_grid, parse_n_range


@pytest.fixture
def run(capsys, zeros2000, cache_dir):
    """Run the CLI against the session cache; returns (code, stdout, stderr)."""
    def go(*argv, cache=True):
        extra = ["--cache-dir", str(cache_dir)] if cache else []
        code = main(list(argv) + extra)
        out, err = capsys.readouterr()
        return code, out, err
    return go


def test_zeros_upto_100(run):
    code, out, _ = run("zeros", "--upto", "100")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "# zeros_v1 T=100.0 count=29"
    assert len(lines) == 30
    assert abs(float(lines[1]) - GAMMA1) < 1e-8


def test_eta_max_k_8(run):
    code, out, _ = run("eta", "--max-k", "8", cache=False)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 9
    assert f"{float(rows[0]['eta']):.10f}" == "-0.5772156649"
    assert all(float(r["err_est"]) > 0 for r in rows)


def test_eta_cross_check_columns(run):
    code, out, _ = run("eta", "--max-k", "1", "--cross-check", cache=False)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert abs(float(rows[1]["eta_primes"]) - float(rows[1]["eta"])) < 3e-3


def test_eval_Gn_grid(run):
    code, out, _ = run("eval", "--fn", "Gn", "--n", "2", "--grid", "0:50:0.1")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["x", "re", "im"]
    assert len(rows) - 1 == 501
    assert all(len(r) == 3 for r in rows)
    assert float(rows[-1][0]) == pytest.approx(50.0)


@pytest.mark.parametrize("fn", ["Hn", "Mn", "Fgamma", "Theta"])
def test_eval_other_functions(run, fn):
    code, out, _ = run("eval", "--fn", fn, "--grid", "2:3:0.5", "--im", "1", "--json")
    data = json.loads(out)
    assert code == 0 and data["fn"] == fn and len(data["rows"]) == 3


def test_eval_pole_maps_to_domain_code(run):
    code, _, err = run("eval", "--fn", "Mn", "--grid", "0.5:0.5:1", "--im", f"{-GAMMA1}", "--T", "100")
    assert code == 7 and "error" in err


def test_li_arith_n1(run):
    code, out, _ = run("li", "--n", "1", "--method", "arith", cache=False)
    rep = json.loads(out)
    assert code == 0
    assert abs(rep["arithmetic"]["value"] - 0.0230957) <= 1e-6
    assert rep["schema"] == "li-report-v1"


def test_li_csv(run):
    code, out, _ = run("li", "--n", "2", "--method", "zeros", "--csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["method"] == "zeros"
    assert abs(float(rows[0]["value"]) - LAMBDA[1]) <= float(rows[0]["err"])


def test_norm_command(run):
    code, out, _ = run("norm", "--n", "1", "--span", "200", cache=False)
    data = json.loads(out)
    assert code == 0
    assert abs(data["lambda"] - LAMBDA[0]) < 0.05 * LAMBDA[0]
    assert {"core_err", "tail_value", "tail_err", "nodes_used"} <= set(data)


def test_verify_range_emits_array_and_passes(run):
    code, out, err = run("verify", "--n", "1..5")
    reports = json.loads(out)
    assert code == 0, err
    assert [r["n"] for r in reports] == [1, 2, 3, 4, 5]
    assert all(v["pass"] for r in reports for v in r["verdicts"])


def test_verify_short_span_is_a_fit_failure(run):
    code, out, err = run("verify", "--n", "1", "--span", "10")
    assert code == 5
    assert "window" in err and out == ""


def test_verify_failure_prints_budget_arithmetic(run, monkeypatch):
    import limodel.li as li
    real = li.li_arithmetic_with_err
    monkeypatch.setattr(li, "li_arithmetic_with_err", lambda n, eta: (real(n, eta)[0] + 1.0, 1e-12))
    code, out, err = run("verify", "--n", "1")
    assert code == 1
    assert "FAIL" in err and "tol" in err
    assert json.loads(out)[0]["verdicts"][0]["pass"] is False


def test_output_is_byte_deterministic(run):
    a = run("verify", "--n", "2")[1]
    b = run("verify", "--n", "2")[1]
    assert a == b
    c = run("eval", "--fn", "Theta", "--grid=-3:3:0.25", cache=False)[1]
    assert c == run("eval", "--fn", "Theta", "--grid=-3:3:0.25", cache=False)[1]


def test_workers_do_not_change_output(run):
    assert run("verify", "--n", "1..3")[1] == run("verify", "--n", "1..3", "--workers", "3")[1]


def test_corrupt_cache_exit_code(capsys, tmp_path):
    (tmp_path / "zeros_v1.csv").write_text("garbage")
    assert main(["zeros", "--upto", "50", "--cache-dir", str(tmp_path)]) == 3
    assert "error" in capsys.readouterr().err


def test_cache_dir_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("LI_CACHE_DIR", str(tmp_path))
    assert main(["zeros", "--upto", "30"]) == 0
    assert (tmp_path / "zeros_v1.csv").read_text() == capsys.readouterr().out


def test_help_documents_exit_codes(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    for code in ("0", "1", "2", "3", "4", "5", "6", "7", "8", "10"):
        assert f"\n  {code} " in out
    assert "exit codes" in EXIT_CODES_HELP


@pytest.mark.parametrize("argv", [
    [], ["li"], ["li", "--n", "0"], ["li", "--n", "1", "--method", "bogus"],
    ["verify", "--n", "5..1"], ["eval", "--fn", "Gn", "--grid", "0:1"],
    ["norm", "--n", "1", "--span", "-5"], ["eta", "--max-k", "-1"],
])
def test_bad_arguments_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_parsers():
    assert parse_n_range("1..5") == [1, 2, 3, 4, 5]
    assert parse_n_range("2,7") == [2, 7]
    assert len(parse_grid("0:50:0.1")) == 501
    assert len(parse_grid("0:1:0.3")) == 4
    assert build_parser().prog == "limodel"


def test_module_entry_point(cache_dir, zeros2000):
    proc = subprocess.run([sys.executable, "-m", "limodel", "li", "--n", "1", "--method", "zeros",
                           "--cache-dir", str(cache_dir)], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert abs(json.loads(proc.stdout)["zero_sum"]["value"] - LAMBDA[0]) < 2e-3
