import json
from importlib import resources

import pytest

from rhdecode import cli
from rhdecode.decoders import DecodeResult, receding_horizon_decode
from rhdecode.io import format_sequence, parse_sequence
from rhdecode.system import SymbolSeq

SCENARIO = str(resources.files("rhdecode").joinpath("data").joinpath("f2_tie_scenario.seq"))


def run(capsys, *argv):
    status = cli.main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def test_analyze_f5(capsys):
    status, out, _ = run(capsys, "analyze", "bundled:f5_example", "--N", "2", "--L", "1", "--format", "structured")
    doc = json.loads(out)
    assert status == 0
    assert doc["window"]["H_N"] == [[1, 0, 1, 3, 4, 3], [0, 1, 0, 0, 1, 3]]
    assert doc["window"]["d_N"] == 2
    assert doc["admissible"]["protected"] == [2, 5, 6] and doc["admissible"]["d_prime"] == 2
    assert doc["code"]["generator_verified"]


def test_analyze_f2(capsys):
    status, out, _ = run(
        capsys, "analyze", "bundled:f2_example", "--N", "1", "--L", "1", "--T", "4", "--M", "2", "--Delta", "1", "--format", "structured"
    )
    doc = json.loads(out)
    assert doc["window"]["B_N"] == [[0, 1], [1, 1], [1, 0], [0, 1]]
    assert doc["window"]["d_N"] == 2 and doc["window"]["rho_N"] == 1
    assert doc["multiplicity_bound"]["exact"] == "3/16"
    assert doc["cost_bound"]["value"] == 4


@pytest.mark.parametrize("fmt", ["text", "csv"])
def test_analyze_formats(capsys, fmt):
    status, out, _ = run(capsys, "analyze", "bundled:f5_example", "--N", "2", "--L", "1", "--format", fmt)
    assert status == 0 and ("2, 5, 6" in out or "2 5 6" in out)


def test_analyze_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["analyze", "bundled:f5_example", "--N", "0", "--L", "1"])
    assert exc.value.code == 2


def test_parse_diagnostics(capsys, tmp_path):
    bad = tmp_path / "bad.code"
    bad.write_text('{"field_p": 5,\n "A": [[0]]\n "B": 1}')
    status, _, err = run(capsys, "analyze", str(bad), "--N", "1", "--L", "1")
    assert status == 1 and "line 3" in err
    bad.write_text('{"field_p": 6, "A": [], "B": [], "C": [], "D": [[1]]}')
    status, _, err = run(capsys, "analyze", str(bad), "--N", "1", "--L", "1")
    assert status == 1 and "field_p" in err
    bad.write_text('{"field_p": 5, "A": [[0]], "B": [[1, 2]], "C": [[4]], "D": [[1, "x"]]}')
    status, _, err = run(capsys, "analyze", str(bad), "--N", "1", "--L", "1")
    assert status == 1 and "D[0][1]" in err


def test_generator_mismatch(capsys, tmp_path):
    spec = json.loads(resources.files("rhdecode").joinpath("data").joinpath("f5_example.code").read_text())
    spec["generator"]["P"] = [[[2], [4, 1]]]
    path = tmp_path / "mismatch.code"
    path.write_text(json.dumps(spec))
    status, _, err = run(capsys, "analyze", str(path), "--N", "1", "--L", "1")
    assert status == 1 and "generator" in err


def test_budget_env(capsys, monkeypatch):
    monkeypatch.setenv("RHDECODE_BUDGET", "4")
    status, _, err = run(capsys, "analyze", "bundled:f5_example", "--N", "2", "--L", "1")
    assert status == 1 and "budget" in err


def test_encode_decode_roundtrip(capsys, tmp_path):
    msg = tmp_path / "msg.txt"
    msg.write_text("5 2 3\n1 2\n3 4\n0 1\n2 2\n")
    enc = tmp_path / "enc.seq"
    assert run(capsys, "encode", "bundled:f5_example", str(msg), "-o", str(enc))[0] == 0
    seq, r = parse_sequence(enc.read_text())
    assert parse_sequence(format_sequence(seq))[0] == seq
    status, out, _ = run(capsys, "decode", "bundled:f5_example", str(enc), "--N", "2", "--L", "1", "--exact", "--format", "structured")
    doc = json.loads(out)
    assert status == 0 and doc["cost"] == 0 and doc["exact"]["cost"] == 0
    assert doc["codeword"] == [list(s) for s in seq.symbols()]
    assert doc["u"][:4] == [[1, 2], [3, 4], [0, 1], [2, 2]]


def test_decode_tie_scenario(capsys):
    status, out, _ = run(capsys, "decode", "bundled:f2_example", SCENARIO, "--N", "1", "--L", "1", "--format", "structured")
    doc = json.loads(out)
    assert doc["u"][1] == [1, 0]
    assert {"t": 1, "count": 2} in doc["tie_events"]
    status, out, _ = run(capsys, "decode", "bundled:f2_example", SCENARIO, "--N", "2", "--L", "1", "--format", "structured")
    doc = json.loads(out)
    assert doc["u"][1] == [1, 0]
    assert all(e["t"] != 1 for e in doc["tie_events"])
    status, out, _ = run(capsys, "decode", "bundled:f2_example", SCENARIO, "--N", "1", "--L", "1")
    assert "t=1 (2 nearest)" in out


def test_decode_corrupted_frame(capsys, tmp_path):
    msg = tmp_path / "msg.txt"
    msg.write_text("5 2 4\n1 2\n3 4\n0 1\n2 2\n4 4\n")
    enc = tmp_path / "enc.seq"
    run(capsys, "encode", "bundled:f5_example", str(msg), "-o", str(enc))
    seq, _ = parse_sequence(enc.read_text())
    rows = [list(s) for s in seq.symbols()]
    rows[0][1] = (rows[0][1] + 3) % 5
    rows[2][0] = (rows[2][0] + 1) % 5
    rows[4][2] = (rows[4][2] + 2) % 5
    bad = tmp_path / "bad.seq"
    bad.write_text(format_sequence(SymbolSeq.from_symbols(seq.field, rows, 1)))
    status, out, _ = run(capsys, "decode", "bundled:f5_example", str(bad), "--N", "2", "--L", "1", "--format", "structured")
    assert json.loads(out)["codeword"] == [list(s) for s in seq.symbols()]


def test_decode_field_mismatch(capsys):
    status, _, err = run(capsys, "decode", "bundled:f5_example", SCENARIO, "--N", "1", "--L", "1")
    assert status == 1 and "GF(2)" in err


def test_sequence_row_count(capsys, tmp_path):
    bad = tmp_path / "short.seq"
    bad.write_text("2 4 2 2\n0 0 0 0\n")
    status, _, err = run(capsys, "decode", "bundled:f2_example", str(bad), "--N", "1", "--L", "1")
    assert status == 1 and "rows" in err


def write_config(tmp_path, **over):
    cfg = {"code": "bundled:f5_example", "N": 2, "L": 1, "T": 10, "trials": 100, "seed": 4,
           "channel": {"kind": "q_symmetric", "p_err": 0.0}}
    cfg.update(over)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def test_simulate_noiseless(capsys, tmp_path):
    status, out, _ = run(capsys, "simulate", str(write_config(tmp_path)), "--format", "structured")
    s = json.loads(out)["summary"]
    assert status == 0 and s["frame_error_count"] == 0 and s["avg_cost"] == 0


def test_simulate_guaranteed_regime(capsys, tmp_path):
    cfg = write_config(tmp_path, channel={"kind": "per_window_weight", "weight": 1, "window": 2, "stride": 1}, exact=True)
    status, out, _ = run(capsys, "simulate", str(cfg), "--format", "structured")
    s = json.loads(out)["summary"]
    assert status == 0 and s["frame_error_count"] == 0


def corrupt(code, received, params, window=None, budget=None):
    good = receding_horizon_decode(code, received, params, window, budget)
    F = received.field
    bad = SymbolSeq(tuple(tuple((v + 1) % F.p for v in y) for y in good.codeword.y), good.codeword.u, F)
    return DecodeResult(good.u_seq, bad, good.cost, good.tau)


def test_simulate_violation_exit(capsys, tmp_path, monkeypatch):
    monkeypatch.setattr("rhdecode.channel.receding_horizon_decode", corrupt)
    status, _, err = run(capsys, "simulate", str(write_config(tmp_path, trials=5)))
    assert status == cli.EXIT_VIOLATION and "invariant" in err


def test_simulate_replay_from_manifest(capsys, tmp_path):
    cfg = write_config(tmp_path, trials=30, exact=True, channel={"kind": "q_symmetric", "p_err": 0.15})
    first, second, third = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    run(capsys, "simulate", str(cfg), "--csv", str(first))
    run(capsys, "simulate", str(first), "--csv", str(second))
    run(capsys, "simulate", str(second), "--csv", str(third), "--workers", "2")
    assert first.read_bytes() == second.read_bytes() == third.read_bytes()
    report = tmp_path / "r.json"
    run(capsys, "simulate", str(first), "--format", "structured", "-o", str(report))
    fourth = tmp_path / "d.csv"
    run(capsys, "simulate", str(report), "--csv", str(fourth))
    assert fourth.read_bytes() == first.read_bytes()


def test_simulate_bad_config(capsys, tmp_path):
    status, _, err = run(capsys, "simulate", str(write_config(tmp_path, trials=0)))
    assert status == 1
    path = tmp_path / "missing.json"
    path.write_text('{"code": "bundled:f5_example"}')
    status, _, err = run(capsys, "simulate", str(path))
    assert status == 1 and "missing" in err


def test_bench_static_code(capsys, tmp_path):
    path = tmp_path / "static.code"
    path.write_text('{"field_p": 2, "A": [], "B": [], "C": [], "D": [[1], [1]]}')
    status, out, _ = run(capsys, "bench", str(path), "--N", "1", "--L", "1", "--T", "5", "--trials", "5", "--format", "csv")
    lines = out.splitlines()
    assert status == 0 and lines[1] == "decoder,median_s,p10_s,p90_s,frames,skipped"
    assert len(lines) == 4


def test_bench_skips_exact_over_budget(capsys):
    status, out, _ = run(capsys, "bench", "bundled:f2_example", "--N", "1", "--L", "1", "--T", "5",
                         "--trials", "3", "--budget", "8", "--format", "structured")
    rows = {r["decoder"]: r for r in json.loads(out)["rows"]}
    assert status == 0 and rows["exact_dp"]["skipped"] and not rows["receding_horizon"]["skipped"]


def test_message_file_roundtrip():
    from rhdecode.gf import Field
    from rhdecode.io import format_messages, parse_messages

    text = format_messages(Field(3), [[1, 2], [0, 0], [2, 1]], 2, manifest={"command": "x"})
    field, rows = parse_messages(text)
    assert field == Field(3) and rows == [[1, 2], [0, 0], [2, 1]]
