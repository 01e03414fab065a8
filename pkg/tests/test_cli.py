import json

import pytest

from netident.cli import main
from netident.network_model import parse_structure


@pytest.fixture
def three_node_file(tmp_path, three_node_text):
    path = tmp_path / "net.json"
    path.write_text(three_node_text)
    return path


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_identifiable_exits_zero(capsys, three_node_file):
    code, out, _ = run_cli(capsys, "analyze", str(three_node_file))
    assert code == 0
    payload = json.loads(out)
    assert payload["report"]["rank_decoupled"] == 2
    assert payload["report"]["verdict_decoupled"] == "identifiable"


def test_analyze_not_identifiable_exits_one(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(
        json.dumps(
            {
                "n": 3,
                "edges": [{"from": 0, "to": 1, "known": False}],
                "excited": [2],
                "measured": [1],
            }
        )
    )
    code, out, _ = run_cli(capsys, "analyze", str(path))
    assert code == 1
    payload = json.loads(out)
    assert payload["report"]["verdict_decoupled"] == "not-identifiable"
    assert payload["report"]["kernel_witness"] is not None


def test_analyze_overloaded_reports_reason(capsys, tmp_path):
    path = tmp_path / "over.json"
    path.write_text(
        json.dumps(
            {
                "n": 3,
                "edges": [
                    {"from": 0, "to": 1, "known": False},
                    {"from": 0, "to": 2, "known": False},
                    {"from": 1, "to": 2, "known": False},
                ],
                "excited": [0],
                "measured": [2],
            }
        )
    )
    code, out, _ = run_cli(capsys, "analyze", str(path))
    assert code == 1
    payload = json.loads(out)
    assert payload["reason"] == "more unknowns than (in, out) data"


def test_analyze_missing_file_exits_two(capsys, tmp_path):
    code, _, err = run_cli(capsys, "analyze", str(tmp_path / "absent.json"))
    assert code == 2
    assert "error" in err


def test_analyze_malformed_file_exits_two(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{nope")
    code, _, err = run_cli(capsys, "analyze", str(path))
    assert code == 2
    assert "malformed" in err


def test_analyze_conditions_payload(capsys, three_node_file):
    code, out, _ = run_cli(capsys, "analyze", str(three_node_file), "--conditions")
    assert code == 0
    payload = json.loads(out)
    conditions = payload["conditions"]
    for name in ("connected_bijective", "excitation_side", "measurement_side", "two_sided"):
        assert conditions[name]["necessary_holds"]
        assert conditions[name]["sufficient_holds"]
        assert conditions[name]["witnesses"]
    witness = conditions["connected_bijective"]["witnesses"][0]
    assert witness["assignation"]["edges"] == [[0, 1], [2, 1]]


def test_analyze_conditions_skipped_when_not_square(capsys, tmp_path):
    path = tmp_path / "nonsquare.json"
    path.write_text(
        json.dumps(
            {
                "n": 3,
                "edges": [{"from": 0, "to": 1, "known": False}],
                "excited": [0, 1],
                "measured": [1],
            }
        )
    )
    code, out, _ = run_cli(capsys, "analyze", str(path), "--conditions")
    payload = json.loads(out)
    assert "skipped" in payload["conditions"]


def test_analyze_decoupled_out(capsys, three_node_file, tmp_path):
    dec_path = tmp_path / "dec.json"
    code, _, _ = run_cli(
        capsys, "analyze", str(three_node_file), "--decoupled-out", str(dec_path)
    )
    assert code == 0
    doubled = parse_structure(dec_path.read_text())
    assert doubled.n == 6
    assert doubled.excited == (3, 4)
    assert [(e.src, e.dst) for e in doubled.unknown_edges] == [(3, 1), (5, 1)]


def test_analyze_out_file_matches_stdout(capsys, three_node_file, tmp_path):
    out_path = tmp_path / "report.json"
    _, out, _ = run_cli(
        capsys, "analyze", str(three_node_file), "--out", str(out_path)
    )
    assert json.loads(out) == json.loads(out_path.read_text())


def test_campaign_cli_writes_outputs(capsys, tmp_path):
    out = tmp_path / "campaign.jsonl"
    code, _, err = run_cli(
        capsys, "campaign", "--count", "8", "--n-max", "6", "--seed", "2",
        "--out", str(out),
    )
    assert code == 0
    assert out.exists()
    assert (tmp_path / "campaign.jsonl.summary.json").exists()
    assert (tmp_path / "campaign.jsonl.summary.csv").exists()
    assert "8 structures" in err


def test_oracles_cli_passes(capsys):
    code, out, _ = run_cli(
        capsys, "oracles", "--det-cases", "10", "--path-cases", "15", "--seed", "1"
    )
    assert code == 0
    assert out.count("PASS") == 3


def test_seed_env_variable_is_default(capsys, three_node_file, monkeypatch):
    monkeypatch.setenv("NETIDENT_SEED", "123")
    _, out_env, _ = run_cli(capsys, "analyze", str(three_node_file))
    monkeypatch.delenv("NETIDENT_SEED")
    _, out_explicit, _ = run_cli(
        capsys, "analyze", str(three_node_file), "--seed", "123"
    )
    assert json.loads(out_env) == json.loads(out_explicit)


def test_config_file_supplies_defaults(capsys, tmp_path):
    out = tmp_path / "cfg_campaign.jsonl"
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"count": 5, "n_max": 5, "seed": 9}))
    code, _, err = run_cli(
        capsys, "campaign", "--config", str(cfg), "--out", str(out)
    )
    assert code == 0
    assert "5 structures" in err
    summary = json.loads((tmp_path / "cfg_campaign.jsonl.summary.json").read_text())
    assert summary["config"]["count"] == 5
    assert summary["config"]["seed"] == 9
