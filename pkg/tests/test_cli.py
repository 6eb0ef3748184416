from __future__ import annotations

import json

from omnikey import make_pin, parse_network, protocol_from_json
from omnikey.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_json_pin3(capsys):
    code, out, _ = run(capsys, "analyze", "--preset", "pin:3", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["clients"] == 3
    assert data["messages"] == 3
    assert data["min_broadcasts"] == 2
    assert data["allocation"] == [0, 1, 1]
    assert data["max_keys"] == 1
    assert data["table"] == [{"keys": 1, "cost": 1, "support": [1, 2]}]
    assert isinstance(data["seconds"], float)


def test_analyze_json_benchmark_table(capsys):
    code, out, _ = run(capsys, "analyze", "--preset", "table1", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["min_broadcasts"] == 9
    assert data["allocation"] == [0] * 6 + [1] * 9
    assert data["max_keys"] == 6
    assert [row["cost"] for row in data["table"]] == [2, 4, 4, 6, 8, 8]
    assert data["table"][0]["support"] == [1, 2, 13]


def test_analyze_all_tau_appends_an_infinite_row(capsys):
    code, out, _ = run(capsys, "analyze", "--preset", "pin:4", "--all-tau", "--json")
    assert code == 0
    data = json.loads(out)
    assert [row["keys"] for row in data["table"]] == [1, 2, 3]
    assert data["table"][-1] == {"keys": 3, "cost": None, "support": None}
    code, out, _ = run(capsys, "analyze", "--preset", "pin:4", "--all-tau")
    assert code == 0
    assert "inf" in out


def test_analyze_tau_and_all_tau_conflict(capsys):
    code, _, err = run(
        capsys, "analyze", "--preset", "pin:4", "--tau", "1", "--all-tau"
    )
    assert code == 2
    assert "mutually exclusive" in err


def test_analyze_single_tau_out_of_reach(capsys):
    code, out, _ = run(
        capsys, "analyze", "--preset", "table1", "--tau", "9", "--json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["table"] == [{"keys": 9, "cost": None, "support": None}]
    code, out, _ = run(capsys, "analyze", "--preset", "table1", "--tau", "9")
    assert code == 0
    assert "inf" in out
    assert "-" in out


def test_analyze_human_output(capsys):
    code, out, err = run(capsys, "analyze", "--preset", "cyclic15")
    assert code == 0
    assert "minimum broadcasts: 9" in out
    assert "max keys: 6" in out
    assert "completed in" in err


def test_analyze_witness_payload(capsys):
    code, out, _ = run(
        capsys, "analyze", "--preset", "pin:4", "--witness", "--json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["tight_sets"]
    conn = data["connectivity"]
    assert len(conn["induced_edges"]) == 6
    assert conn["tree_packing_number"] == 2
    assert len(conn["tree_packing"]) == 2
    v = conn["violating_partition"]
    assert v["tau"] == 3
    assert v["crossing"] == 6
    assert v["required"] == 9
    assert v["blocks"] == [[1], [2], [3], [4]]


def test_example_round_trips_through_parse(capsys):
    code, out, _ = run(capsys, "example", "--preset", "pin:3")
    assert code == 0
    fam = parse_network(out)
    assert fam.holdings == (
        frozenset({1, 2}),
        frozenset({1, 3}),
        frozenset({2, 3}),
    )


def test_example_writes_file(tmp_path, capsys):
    target = tmp_path / "fam.json"
    code, out, _ = run(capsys, "example", "--preset", "gap:4", "-o", str(target))
    assert code == 0
    assert out == ""
    fam = parse_network(target.read_text())
    assert fam.n == 7


def test_protocol_to_stdout(capsys):
    code, out, _ = run(capsys, "protocol", "--preset", "pin:3")
    assert code == 0
    proto = protocol_from_json(out)
    assert proto.kind == "omniscience"
    assert len(proto.senders) == 2


def test_protocol_forced_field(capsys):
    code, out, _ = run(
        capsys, "protocol", "--preset", "gap:4", "--kind", "secret-key",
        "--tau", "1", "--field", "11",
    )
    assert code == 0
    proto = protocol_from_json(out)
    assert proto.field.q == 11
    assert len(proto.rows) == 2

    code, _, err = run(
        capsys, "protocol", "--preset", "gap:4", "--field", "2"
    )
    assert code == 4
    assert "gave up" in err

    code, _, err = run(capsys, "protocol", "--gap", "4", "--field", "5")
    assert code == 2
    assert "chooses its own field" in err

    code, _, err = run(
        capsys, "protocol", "--preset", "pin:3", "--chain", "--field", "3"
    )
    assert code == 2
    assert "GF(2)" in err


def test_protocol_chain_shorthand(tmp_path, capsys):
    out_path = tmp_path / "chain.json"
    code, out, _ = run(
        capsys, "protocol", "--preset", "pin:4", "--chain", "--out", str(out_path)
    )
    assert code == 0
    assert out == ""
    proto = protocol_from_json(out_path.read_text())
    assert proto.kind == "secret-key"
    assert proto.field.q == 2
    assert len(proto.senders) == make_pin(4).m - 1


def test_protocol_verify_loop(tmp_path, capsys):
    pfile = tmp_path / "chain.json"
    code, _, _ = run(
        capsys,
        "protocol",
        "--preset",
        "pin:4",
        "--kind",
        "chain",
        "-o",
        str(pfile),
    )
    assert code == 0
    code, out, _ = run(
        capsys, "verify", "--protocol", str(pfile), "--preset", "pin:4"
    )
    assert code == 0
    assert "verified" in out
    assert "mutual information: 0.0 bits" in out
    assert "full mode" in out


def test_verify_catches_a_tampered_protocol(tmp_path, capsys):
    pfile = tmp_path / "sk.json"
    run(
        capsys,
        "protocol",
        "--preset",
        "pin:4",
        "--kind",
        "secret-key",
        "--tau",
        "2",
        "-o",
        str(pfile),
    )
    data = json.loads(pfile.read_text())
    # claim one of the transmissions as a key
    data["keys"][0] = data["transmissions"][0]["rows"][0]
    pfile.write_text(json.dumps(data))
    code, out, _ = run(
        capsys, "verify", "--protocol", str(pfile), "--preset", "pin:4"
    )
    assert code == 1
    assert "FAIL" in out
    assert "verification failed" in out


def test_verify_gap_protocol_json(tmp_path, capsys):
    pfile = tmp_path / "gap.json"
    code, _, _ = run(capsys, "protocol", "--gap", "4", "-o", str(pfile))
    assert code == 0
    code, out, _ = run(
        capsys, "verify", "--protocol", str(pfile), "--gap", "4", "--json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True
    assert data["mode"] == "full"
    assert data["states"] == 4**8
    assert data["mutual_information"] == 0.0
    assert data["failures"] == []


def test_reduce_emits_family(tmp_path, capsys):
    cover = tmp_path / "cover.json"
    cover.write_text(
        json.dumps({"universe": [1, 2, 3], "sets": [[1, 2], [2, 3], [3]]})
    )
    code, out, _ = run(capsys, "reduce", "--input", str(cover))
    assert code == 0
    fam = parse_network(out)
    assert fam.n == 4
    assert fam.m == 3


def test_reduce_solve(tmp_path, capsys):
    cover = tmp_path / "cover.json"
    cover.write_text(
        json.dumps({"universe": [1, 2, 3, 4], "sets": [[1, 2], [3], [3, 4], [2, 3]]})
    )
    code, out, _ = run(capsys, "reduce", "--input", str(cover), "--solve", "--json")
    assert code == 0
    data = json.loads(out)
    assert data == {"cover": [1, 3], "size": 2}
    code, out, _ = run(capsys, "reduce", "--input", str(cover), "--solve")
    assert code == 0
    assert "minimum cover: 1 3" in out


def test_reduce_uncoverable_exits_one(tmp_path, capsys):
    cover = tmp_path / "cover.json"
    cover.write_text(json.dumps({"universe": [1, 2], "sets": [[1]]}))
    code, _, err = run(capsys, "reduce", "--input", str(cover), "--solve")
    assert code == 1
    assert "infeasible" in err


def test_missing_file_exits_two(capsys):
    code, _, err = run(capsys, "analyze", "--input", "/no/such/file.json")
    assert code == 2
    assert "error" in err


def test_bad_preset_exits_two(capsys):
    code, _, err = run(capsys, "analyze", "--preset", "nonsense")
    assert code == 2
    assert "preset" in err
    code, _, _ = run(capsys, "analyze", "--preset", "pin:x")
    assert code == 2
    code, _, _ = run(capsys, "example", "--preset", "pin:1")
    assert code == 2


def test_no_family_exits_two(capsys):
    code, _, err = run(capsys, "analyze")
    assert code == 2
    assert "provide" in err


def test_infeasible_synthesis_exits_one(capsys):
    code, _, err = run(
        capsys,
        "protocol",
        "--preset",
        "pin:3",
        "--kind",
        "secret-key",
        "--tau",
        "5",
    )
    assert code == 1
    assert "infeasible" in err


def test_oversized_family_exits_three(tmp_path, capsys):
    big = {"clients": 25, "messages": 1, "holdings": [[1]] * 25}
    f = tmp_path / "big.json"
    f.write_text(json.dumps(big))
    code, _, err = run(capsys, "analyze", "--input", str(f))
    assert code == 3
    assert "too large" in err


def test_jobs_flag_is_accepted(capsys):
    code, out, _ = run(
        capsys, "analyze", "--preset", "pin:3", "--jobs", "4", "--json"
    )
    assert code == 0
    assert json.loads(out)["min_broadcasts"] == 2
