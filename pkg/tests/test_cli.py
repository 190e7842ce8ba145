import io
import json
import subprocess
import sys

import pytest

from conjperm.cli import main, read_config
from conjperm.statistics import lis


def run(argv, stdin=None, monkeypatch=None):
    out = io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv, out=out)
    return code, out.getvalue()


def jsonl(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_stat_lis_example(monkeypatch):
    code, out = run(["stat", "--stat", "lis"], "[5,3,2,4,1]\n", monkeypatch)
    assert code == 0 and out.strip() == "2"


def test_stat_vector_output(monkeypatch):
    code, out = run(["stat", "--stat", "rsk:2"], "[5,3,2,4,1]\n\n[1,2,3]\n", monkeypatch)
    assert code == 0 and jsonl(out) == [[2, 3], [3, 3]]


def test_stat_bad_input(monkeypatch, capsys):
    code, _ = run(["stat", "--stat", "lis"], "[1,1,2]\n", monkeypatch)
    assert code == 2
    assert "error" in capsys.readouterr().err
    code, _ = run(["stat", "--stat", "nope"], "[1]\n", monkeypatch)
    assert code == 2


def test_rate_lis_half():
    code, out = run(["rate", "--fn", "lis-half", "--x", "2"])
    assert code == 0
    assert json.loads(out) == {"x": 2.0, "value": 0.0, "speed": 0.5, "scale": 0.5}


def test_rate_infinite_and_bennett():
    _, out = run(["rate", "--fn", "lis-one", "--x", "-1"])
    assert json.loads(out)["value"] == "inf"
    _, out = run(["rate", "--fn", "bennett", "--v", "1", "--t", "1"])
    assert json.loads(out)["value"] == pytest.approx(-0.386294, abs=1e-6)
    code, _ = run(["rate", "--fn", "bennett", "--v", "1"])
    assert code == 2
    code, _ = run(["rate", "--fn", "moderate", "--x", "0"])
    assert code == 2


def test_sample_reproducible_and_round_trips(monkeypatch):
    argv = ["sample", "--law", "ewens:2", "--n", "12", "--count", "5", "--seed", "9"]
    code, a = run(argv)
    _, b = run(argv)
    assert code == 0 and a == b
    perms = jsonl(a)
    assert len(perms) == 5 and all(sorted(p) == list(range(1, 13)) for p in perms)
    _, c = run(argv[:-1] + ["10"])
    assert c != a
    code, out = run(["stat", "--stat", "lis"], a, monkeypatch)
    assert code == 0 and jsonl(out) == [lis(p) for p in perms]


def test_usage_errors():
    assert run([])[0] == 2
    assert run(["bogus"])[0] == 2
    assert run(["sample", "--law", "uniform", "--n", "3", "--unknown-flag", "1"])[0] == 2
    assert run(["sample", "--law", "weird", "--n", "3"])[0] == 2


def test_verify_coupling_passes():
    code, out = run(["verify", "--check", "coupling", "--n-max", "5"])
    assert code == 0
    reports = jsonl(out)
    control = [r for r in reports if r.get("expected") == "fail"]
    assert len(control) == 1 and not control[0]["passed"]
    assert all(r["passed"] for r in reports if "expected" not in r)


def test_verify_all_and_unknown():
    code, out = run(["verify", "--check", "all", "--n-max", "4"])
    assert code == 0
    assert {r["check_name"] for r in jsonl(out)} >= {"coupling", "greene", "merge-lis", "lipschitz"}
    assert run(["verify", "--check", "nope"])[0] == 2


def test_verify_failure_exit_code(monkeypatch):
    from conjperm import oracle
    from conjperm.oracle import VerificationReport

    monkeypatch.setitem(oracle.SUITES, "broken", lambda n: [VerificationReport("broken", n, 1.0)])
    code, out = run(["verify", "--check", "broken"])
    assert code == 1 and jsonl(out)[0]["passed"] is False


def test_tail_flags_and_csv(tmp_path):
    csv_path = tmp_path / "out.csv"
    argv = ["--threads", "2", "tail", "--law", "uniform", "--stat", "lis", "--n", "9,16",
            "--samples", "3000", "--x", "1", "--direction", "<=", "--seed", "4", "--csv", str(csv_path)]
    code, out = run(argv)
    assert code == 0
    rows = jsonl(out)
    assert [r["n"] for r in rows] == [9, 16]
    assert csv_path.read_text().splitlines()[0] == "n,hits,total,pHat,ciLow,ciHigh,empiricalRate,theoryRate"
    _, again = run(["--threads", "1"] + argv[2:])
    assert again == out
    _, as_csv = run(argv[2:] + ["--format", "csv"])
    assert as_csv.splitlines()[0].startswith("n,hits")


def test_tail_config_file(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# lis upper tail\nlaw = uniform\nstat = lis\nn = 16 36\nsamples = 2000\n"
                   "x = 2.0\nalpha = 0.5\nbeta = 0.5\nrate-fn = lis-half\nseed = 1\n")
    code, out = run(["tail", "--config", str(cfg)])
    assert code == 0
    rows = jsonl(out)
    assert [r["n"] for r in rows] == [16, 36]
    assert all(r["theoryRate"] == 0.0 for r in rows)
    # flags override the file
    _, out2 = run(["tail", "--config", str(cfg), "--samples", "1000"])
    assert jsonl(out2)[0]["total"] == 1000


def test_tail_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("law = uniform\ncolour = blue\n")
    assert run(["tail", "--config", str(bad)])[0] == 2
    bad.write_text("law uniform\n")
    with pytest.raises(ValueError):
        read_config(str(bad))
    assert run(["tail", "--config", str(tmp_path / "missing.cfg")])[0] == 2
    assert run(["tail", "--x", "2", "--rate-fn", "euler"])[0] == 2


def test_diagnose_modes():
    code, out = run(["diagnose", "--law", "ewens:1", "--n", "100", "--samples", "500", "--epsilon", "1"])
    assert code == 0
    d = json.loads(out)
    assert len(d["perN"]) == 1 and len(d["bennettLogBound"]) == 1
    code, out = run(["diagnose", "--law", "uniform", "--n", "9,16", "--samples", "500", "--rows", "1.9,0.5"])
    assert code == 0 and len(jsonl(out)) == 2
    assert run(["diagnose", "--law", "uniform", "--n", "9", "--rows", "2.5"])[0] == 2


def test_console_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "conjperm", "rate", "--fn", "euler", "--x", "0.5"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["value"] == 0.0
