import json
from pathlib import Path

import pytest

from tracezero.cli import main

SETUPS = Path(__file__).resolve().parent.parent / "setups"
SEED = str(SETUPS / "seed.json")


def _records(path):
    lines = Path(path).read_text().splitlines()
    return [json.loads(x) for x in lines[:-1]], json.loads(lines[-1])["summary"]


def test_certify_small_range(tmp_path):
    out = tmp_path / "certs.jsonl"
    assert main(["certify", SEED, "--max-p", "100", "--jobs", "1", "--out", str(out)]) == 0
    recs, summary = _records(out)
    assert len(recs) == 25
    assert [int(r["p"]) for r in recs] == sorted(int(r["p"]) for r in recs)
    assert all(r["verified"] for r in recs)
    assert summary["certified"] == "25" and summary["skipped_bad_reduction"] == []
    assert not (tmp_path / "certs.jsonl.tmp").exists()
    assert main(["verify", SEED, str(out)]) == 0


def test_certify_bad_prime_only(tmp_path):
    out = tmp_path / "bad.jsonl"
    assert main(["certify", SEED, "--min-p", "5077", "--max-p", "5077", "--out", str(out)]) == 0
    recs, summary = _records(out)
    assert recs == []
    assert summary["skipped_bad_reduction"] == ["5077"]


def test_certify_empty_range(tmp_path, capsys):
    assert main(["certify", SEED, "--min-p", "24", "--max-p", "28"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 1 and "summary" in out[0]
    assert main(["certify", SEED, "--min-p", "50", "--max-p", "10"]) == 0


def test_certify_to_stdout(capsys):
    assert main(["certify", SEED, "--max-p", "10", "--jobs", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [json.loads(x)["p"] for x in lines[:-1]] == ["2", "3", "5", "7"]


def test_verify_detects_tampering(tmp_path, capsys):
    out = tmp_path / "certs.jsonl"
    main(["certify", SEED, "--max-p", "30", "--jobs", "1", "--out", str(out)])
    lines = out.read_text().splitlines()
    rec = json.loads(lines[3])
    rec["M"][0][1] = str(int(rec["M"][0][1]) + 1)
    lines[3] = json.dumps(rec, separators=(",", ":"))
    out.write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    assert main(["verify", SEED, str(out)]) == 1
    err = capsys.readouterr().err
    assert f"p={rec['p']}: FAIL matrix-" in err


def test_verify_against_wrong_setup(tmp_path):
    out = tmp_path / "certs.jsonl"
    main(["certify", SEED, "--max-p", "30", "--jobs", "1", "--out", str(out)])
    assert main(["verify", str(SETUPS / "doubled.json"), str(out)]) == 1


def test_resume_reuses_and_extends(tmp_path):
    out = tmp_path / "certs.jsonl"
    assert main(["certify", SEED, "--max-p", "50", "--jobs", "1", "--out", str(out)]) == 0
    assert main(["certify", SEED, "--max-p", "200", "--jobs", "1", "--out", str(out), "--resume"]) == 0
    resumed = out.read_text()
    fresh = tmp_path / "fresh.jsonl"
    main(["certify", SEED, "--max-p", "200", "--jobs", "1", "--out", str(fresh)])
    assert resumed == fresh.read_text()


def test_jobs_do_not_change_output(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    main(["certify", SEED, "--max-p", "600", "--jobs", "1", "--out", str(a)])
    main(["certify", SEED, "--max-p", "600", "--jobs", "3", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_independence_commands(capsys):
    assert main(["independence", SEED, "--coeff-bound", "0"]) == 2
    assert main(["independence", str(SETUPS / "duplicated.json"), "--prime-bound", "100",
                 "--coeff-bound", "50"]) == 0
    out = capsys.readouterr().out
    assert "(1, -1, 0)" in out and "verified exactly" in out
    assert main(["independence", SEED, "--prime-bound", "200", "--coeff-bound", "100"]) == 0
    assert "no relation with |c|_inf <= 100 survives primes <= 200" in capsys.readouterr().out


def test_structure_command(capsys):
    assert main(["structure", SEED, "5"]) == 0
    out = capsys.readouterr().out
    assert "N = 10" in out and "(n1, n2) = (1, 10)" in out and "gcd = 1" in out
    assert main(["structure", SEED, "2"]) == 0
    assert main(["structure", SEED, "5077"]) == 4
    assert main(["structure", SEED, "12"]) == 2


def test_oracles_command(capsys):
    assert main(["oracles", SEED, "--max-p", "40"]) == 0
    assert "12/12 primes agree" in capsys.readouterr().out


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", str(bad), str(bad)]) == 2
    assert main(["certify", str(tmp_path / "missing.json")]) == 2
    off = tmp_path / "off.json"
    off.write_text(json.dumps({"a1": "0", "a2": "0", "a3": "1", "a4": "-7", "a6": "6",
                               "points": [["1", "1"], ["2", "0"], ["0", "2"]]}))
    assert main(["certify", str(off)]) == 2
    cm = tmp_path / "cm.json"
    cm.write_text(json.dumps({"a1": "0", "a2": "0", "a3": "0", "a4": "-1", "a6": "0",
                              "points": [["0", "0"], ["1", "0"], ["-1", "0"]]}))
    assert main(["certify", str(cm)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["certify", SEED, "--max-p", str(2**62 + 1)])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["frobnicate"])
