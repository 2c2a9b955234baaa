import json

import pytest

from ktfactor import generators
from ktfactor.cli import main
from ktfactor.graph import read_edge_list_file, write_edge_list_file


@pytest.fixture
def regular_file(tmp_path):
    path = tmp_path / "g.txt"
    assert main(["generate", "--family", "regular", "--n", "60", "--d", "30", "--seed", "1", "-o", str(path)]) == 0
    return path


def test_generate_families(tmp_path):
    for args in (["--family", "paley", "--q", "13"], ["--family", "multipartite", "--t", "3", "--s", "4"]):
        out = tmp_path / "x.txt"
        assert main(["generate", *args, "--seed", "0", "-o", str(out)]) == 0
        assert read_edge_list_file(out).n in (13, 12)


def test_generate_usage_errors(tmp_path):
    assert main(["generate", "--family", "paley", "--seed", "0", "-o", str(tmp_path / "x")]) == 2
    assert main(["generate", "--family", "paley", "--q", "8", "--seed", "0", "-o", str(tmp_path / "x")]) == 2
    with pytest.raises(SystemExit) as info:
        main(["generate", "--family", "nope", "--seed", "0", "-o", "x"])
    assert info.value.code == 2


def test_certify_prints_json(regular_file, capsys):
    assert main(["certify", "--input", str(regular_file), "--t", "3", "--c", "0.5"]) == 0
    cert = json.loads(capsys.readouterr().out)
    assert cert["n"] == 60 and cert["d"] == 30 and cert["c"] == 0.5
    assert 0 < cert["lambda"] < 12


def test_factor_and_verify(regular_file, tmp_path):
    out = tmp_path / "f.json"
    assert main(["factor", "--input", str(regular_file), "--t", "3", "--m", "2", "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["t"] == 3 and len(data["cliques"]) == 20
    assert main(["verify", "--input", str(regular_file), "--factor", str(out)]) == 0
    data["cliques"][0][0] = data["cliques"][1][0]
    out.write_text(json.dumps(data))
    assert main(["verify", "--input", str(regular_file), "--factor", str(out)]) == 1


def test_factor_failure_json(tmp_path):
    g = tmp_path / "k33.txt"
    write_edge_list_file(generators.complete_bipartite(3, 3), g)
    out = tmp_path / "f.json"
    assert main(["factor", "--input", str(g), "--t", "3", "-o", str(out)]) == 1
    data = json.loads(out.read_text())
    assert data["stage"] == "absorber" and {"diagnostics", "coverage"} <= set(data)


def test_factor_config_error_is_usage(regular_file, tmp_path):
    assert main(["factor", "--input", str(regular_file), "--t", "3", "--m", "1", "-o", str(tmp_path / "f")]) == 2
    assert main(["factor", "--input", str(tmp_path / "missing"), "--t", "3", "-o", str(tmp_path / "f")]) == 2


def test_internal_error_exit_code(regular_file, tmp_path, monkeypatch):
    from ktfactor import cli
    from ktfactor.pipeline import InternalInvariantError

    def boom(*_a, **_k):
        raise InternalInvariantError("planted")

    monkeypatch.setattr(cli, "kt_factor", boom)
    assert main(["factor", "--input", str(regular_file), "--t", "3", "-o", str(tmp_path / "f")]) == 3


def test_bench_lines(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"jobs": [{"family": "regular", "n": 30, "d": 16, "t": 3, "m": 2},
                                         {"family": "multipartite", "parts": 3, "s": 5, "t": 3, "m": 2}]}))
    out = tmp_path / "b.jsonl"
    assert main(["bench", "--spec", str(spec), "--runs", "2", "--seed", "3", "-o", str(out)]) == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(rows) == 4
    for row in rows:
        assert set(row) == {"family", "n", "d", "t", "seed", "outcome", "stage", "millis"}
