"""CLI behavior: commands, exit codes, output determinism."""

import io
import json

import pytest

from radimichael.cli import main
from radimichael.construct import certificate_from_line, verify_certificate


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def test_classify_85(capsys):
    code, out, _ = run_cli(capsys, "classify", "85")
    assert code == 0
    assert "radimichael=true" in out
    assert "carmichael=false" in out
    assert "lehmer_index=3" in out


def test_classify_561(capsys):
    code, out, _ = run_cli(capsys, "classify", "561")
    assert code == 0
    assert "carmichael=true" in out and "lehmer_index=2" in out


def test_classify_prime_and_unit(capsys):
    code, out, _ = run_cli(capsys, "classify", "7")
    assert code == 0 and out.strip() == "7: prime"
    code, out, _ = run_cli(capsys, "classify", "1")
    assert code == 0 and out.strip() == "1: unit"


def test_classify_bad_input(capsys):
    assert run_cli(capsys, "classify", "0")[0] == 2
    assert run_cli(capsys, "classify", str(2**70))[0] == 2
    with pytest.raises(SystemExit) as err:
        main(["classify", "pineapple"])
    assert err.value.code == 2


# ---------------------------------------------------------------------------
# survey
# ---------------------------------------------------------------------------

def test_survey_100_csv(capsys):
    code, out, _ = run_cli(capsys, "survey", "--limit", "100", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("checkpoint,composites,carmichael,radimichael")
    assert lines[-1].startswith("100,74,0,4,4,")


def test_survey_limit_1_header_only(capsys):
    code, out, _ = run_cli(capsys, "survey", "--limit", "1", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 1


def test_survey_10000_carmichael(capsys):
    code, out, _ = run_cli(capsys, "survey", "--limit", "10000", "--format", "csv")
    assert code == 0
    last = out.splitlines()[-1].split(",")
    assert last[0] == "10000" and last[2] == "7"


def test_survey_output_file_and_worker_identity(tmp_path, capsys):
    paths = []
    for i, workers in enumerate(("1", "2", "8")):
        path = tmp_path / f"report{i}.csv"
        code, _, _ = run_cli(capsys, "survey", "--limit", "10000",
                             "--format", "csv", "--workers", workers,
                             "--output", str(path))
        assert code == 0
        paths.append(path.read_bytes())
    assert paths[0] == paths[1] == paths[2]


def test_survey_memory_budget_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("RADIMICHAEL_MEMORY_BUDGET", "1000")
    code, _, err = run_cli(capsys, "survey", "--limit", "1000000")
    assert code == 3
    assert "budget" in err


# ---------------------------------------------------------------------------
# construct / theorem2
# ---------------------------------------------------------------------------

def test_construct_emits_15(capsys):
    code, out, err = run_cli(capsys, "construct", "--a", "2", "--b", "0",
                             "--s", "4", "--m", "2", "--n-max", "20")
    assert code == 0
    certs = [certificate_from_line(line) for line in out.splitlines()]
    assert any(c.N == 15 for c in certs)
    assert all(verify_certificate(c) for c in certs)
    assert "certificates" in err


def test_construct_invalid_parameters(capsys):
    code, _, err = run_cli(capsys, "construct", "--a", "2", "--b", "0",
                           "--s", "3", "--m", "6", "--n-max", "10")
    assert code == 2 and "error" in err


def test_construct_zero_hits_is_success(capsys):
    code, out, err = run_cli(capsys, "construct", "--a", "2", "--b", "0",
                             "--s", "2", "--m", "2",
                             "--n-min", "31", "--n-max", "31")
    assert code == 0
    assert out == ""
    assert "no certificates" in err


def test_theorem2_emits_4369(capsys):
    code, out, _ = run_cli(capsys, "theorem2", "--a", "2", "--k", "3",
                           "--s", "10", "--n-max", "100")
    assert code == 0
    certs = [certificate_from_line(line) for line in out.splitlines()]
    assert any(c.N == 4369 for c in certs)
    assert all(c.lehmer_index == 3 and len(c.primes) == 2 for c in certs)


def test_theorem2_rejects_k2(capsys):
    code, _, err = run_cli(capsys, "theorem2", "--a", "2", "--k", "2",
                           "--s", "10", "--n-max", "100")
    assert code == 2 and "k >= 3" in err


def test_streams_are_deterministic(capsys):
    args = ("theorem2", "--a", "2", "--k", "3", "--s", "8", "--n-max", "40")
    first = run_cli(capsys, *args)
    second = run_cli(capsys, *args)
    parallel = run_cli(capsys, *args, "--workers", "3")
    assert first == second == parallel


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _write_certs(capsys, tmp_path, name="certs.jsonl"):
    path = tmp_path / name
    code, _, _ = run_cli(capsys, "construct", "--a", "2", "--b", "0", "--s", "8",
                         "--m", "2", "--n-max", "30", "--output", str(path))
    assert code == 0
    return path


def test_verify_round_trip(tmp_path, capsys):
    path = _write_certs(capsys, tmp_path)
    code, out, _ = run_cli(capsys, "verify", str(path))
    assert code == 0
    assert "records passed" in out


def test_verify_accepts_theorem2_output(tmp_path, capsys):
    path = tmp_path / "t2.jsonl"
    code, _, _ = run_cli(capsys, "theorem2", "--a", "3", "--k", "3", "--s", "8",
                         "--n-max", "40", "--output", str(path))
    assert code == 0
    assert path.read_text().strip()
    code, out, _ = run_cli(capsys, "verify", str(path))
    assert code == 0 and "records passed" in out


def test_verify_tampered_file(tmp_path, capsys):
    path = _write_certs(capsys, tmp_path)
    lines = path.read_text().splitlines()
    record = json.loads(lines[0])
    record["N"] += 2
    lines[0] = json.dumps(record)
    path.write_text("\n".join(lines) + "\n")
    code, out, _ = run_cli(capsys, "verify", str(path))
    assert code == 1
    assert "record 1: FAIL" in out


def test_verify_empty_file(tmp_path, capsys):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    code, out, _ = run_cli(capsys, "verify", str(path))
    assert code == 0 and "0 records" in out


def test_verify_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.jsonl"
    path.write_text("this is not a certificate\n")
    code, _, err = run_cli(capsys, "verify", str(path))
    assert code == 2 and "error" in err


def test_verify_missing_file(capsys):
    code, _, err = run_cli(capsys, "verify", "/nonexistent/certs.jsonl")
    assert code == 2
