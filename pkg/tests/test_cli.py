import json
import subprocess
import sys

import pytest

from crinvariants import cli
from crinvariants.crcalc.report import CaseResult


def run_main(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_reinhardt_example(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, text, _ = run_main(["verify", "--suite", "reinhardt", "--n", "2", "--sigma", "0,1", "--out", str(out)], capsys)
    assert code == 0
    assert "tr-Xi-2" in text
    d = json.loads(out.read_text(encoding="utf-8"))
    case = next(c for c in d["cases"] if c["case_id"] == "tr-Xi-2")
    assert case["status"] == "pass" and case["expected"] == "(-4/3)(-i dθ)^2"
    assert set(d) >= {"suite", "config", "cases", "summary", "version"}
    assert d["summary"]["fail"] == 0 and d["summary"]["pass"] == len(d["cases"])


def test_perturbation_symbolic_example(capsys):
    code, text, _ = run_main(["verify", "--suite", "perturbation-symbolic", "--n", "symbolic", "--kmax", "4"], capsys)
    assert code == 0
    for k in range(1, 5):
        assert f"tr-Cdot^{k} " in text


def test_totals_example(tmp_path, capsys):
    out = tmp_path / "t.json"
    code, text, _ = run_main(["totals", "--n", "2", "--sigma", "0,1", "--r", "1", "--out", str(out)], capsys)
    assert code == 0
    assert "(64/9) π^4" in text
    assert "pi/((n+1)r)" in text and "<- matches" in text
    d = json.loads(out.read_text(encoding="utf-8"))
    assert d["result"]["matches_variant"] == "pi/((n+1)r)"


def test_numeric_subcommand_has_note(tmp_path, capsys):
    out = tmp_path / "n.json"
    code, text, _ = run_main(["numeric", "--n", "2", "--resolution", "8", "--out", str(out)], capsys)
    assert code == 0
    assert "note:" in text
    assert json.loads(out.read_text(encoding="utf-8"))["notes"]


def test_n_inferred_from_sigma(capsys):
    cfg = cli.resolve(cli.SuiteConfig("reinhardt", sigma=(0, 0, 1)))
    assert cfg.n == 3 and cfg.sigma == (0, 0, 1)
    cfg = cli.resolve(cli.SuiteConfig("reinhardt", n="2", sigma=(2,)))
    assert cfg.sigma == (2, 0)


@pytest.mark.parametrize("args", [
    ["verify", "--suite", "reinhardt", "--n", "3", "--sigma", "0,1"],
    ["verify", "--suite", "reinhardt", "--n", "symbolic"],
    ["verify", "--suite", "kronecker", "--n", "1"],
    ["verify", "--suite", "theta-powers", "--kmax", "0"],
    ["verify", "--suite", "reinhardt", "--sigma", "a,b"],
    ["verify", "--suite", "reinhardt", "--sigma", "0,0"],
    ["totals", "--n", "2"],
    ["totals", "--n", "2", "--sigma", "0,1", "--r", "-1"],
])
def test_usage_errors_exit_2(args, capsys):
    code, _, err = run_main(args, capsys)
    assert code == 2
    assert "error" in err


def test_argparse_errors_exit_2():
    r = subprocess.run([sys.executable, "-m", "crinvariants", "verify", "--suite", "nope"], capture_output=True)
    assert r.returncode == 2


def test_internal_error_exit_2(monkeypatch, capsys):
    def boom(cfg):
        raise RuntimeError("boom")
    monkeypatch.setattr(cli, "run", boom)
    code, _, err = run_main(["verify", "--suite", "reinhardt", "--n", "2"], capsys)
    assert code == 2 and "boom" in err


def test_failure_exit_1(monkeypatch, capsys):
    from crinvariants.crcalc.report import SuiteReport

    def fake(cfg):
        rep = SuiteReport("reinhardt")
        rep.add(CaseResult("a", "x", "pass"))
        rep.add(CaseResult("b", "x", "fail"))
        return rep, {}
    monkeypatch.setattr(cli, "run", fake)
    code, text, _ = run_main(["verify", "--suite", "reinhardt", "--n", "2"], capsys)
    assert code == 1 and "1 failed" in text


def test_json_round_trip(tmp_path, capsys):
    out = tmp_path / "k.json"
    args = ["verify", "--suite", "kronecker", "--n", "2", "--seed", "4", "--out", str(out)]
    cli.main(args)
    capsys.readouterr()
    cfg = cli.resolve(cli.config_from_args(cli.build_parser().parse_args(args)))
    d = json.loads(out.read_text(encoding="utf-8"))
    cases = [CaseResult.from_dict(c) for c in d["cases"]]
    rep, _ = cli.run(cfg)
    strip = lambda cs: [(c.case_id, c.anchor, c.status, c.expected, c.actual, c.residual) for c in cs]
    assert strip(cases) == strip(rep.cases)
    assert d["config"] == cfg.echo()
    assert d["summary"] == rep.summary()


def test_deterministic_cases(tmp_path, capsys):
    dumps = []
    for j in range(2):
        out = tmp_path / f"{j}.json"
        cli.main(["verify", "--suite", "theta-powers", "--n", "2", "--seed", "3", "--out", str(out)])
        cases = json.loads(out.read_text(encoding="utf-8"))["cases"]
        for c in cases:
            c.pop("wall_time")
        dumps.append(json.dumps(cases))
    capsys.readouterr()
    assert dumps[0] == dumps[1]


def test_cases_ordered_by_id(capsys):
    rep, _ = cli.run(cli.resolve(cli.SuiteConfig("reinhardt", n="3")))
    ids = [c.case_id for c in rep.cases]
    assert ids == sorted(ids)
