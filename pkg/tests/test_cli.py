import json
import subprocess
import sys

import pytest
from helpers import base_connection, p1_fts

from logfrob import cli
from logfrob.fixtures import p2_model, rank4_pmhs, tate_pmhs
from logfrob.hodge import weight_filtration


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_reconstruct_prints_a_table(capsys):
    code, out, _ = run(["qc-reconstruct", "--model", "builtin:p2", "--seed", "builtin:p2-seed", "--W", "T1", "--max-degree", "5"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split() == ["beta", "insertions", "value"]
    assert [l.split()[-1] for l in lines[1:]] == ["1", "1", "12", "620", "87304"]


def test_json_output_matches_the_library(tmp_path, capsys):
    pmhs = write(tmp_path, "tate.json", tate_pmhs().to_json())
    out_file = tmp_path / "w.json"
    code, out, _ = run(["hodge-weight", "--pmhs", pmhs, "--format", "json", "--output", str(out_file)], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["W"] == weight_filtration(tate_pmhs().N, 1).to_json()
    assert out_file.read_text() == out


def test_unfold_from_files_is_deterministic(tmp_path, capsys):
    base = write(tmp_path, "omega.json", base_connection().to_json())
    dfs = write(tmp_path, "dfs.json", {"y": [[{"e": [0, 0], "c": "-1"}, {"e": [0, 1], "c": "1"}], [{"e": [1, 1], "c": "1"}]]})
    outs = []
    for k in range(2):
        o = tmp_path / f"u{k}.json"
        code, _, _ = run(["unfold", "--base", base, "--dfs", dfs, "--order", "4", "--output", str(o)], capsys)
        assert code == 0
        outs.append(o.read_bytes())
    assert outs[0] == outs[1]
    data = json.loads(outs[0])
    assert data["flatness"]["pass"] and data["first_column"]["pass"]


def test_check_fts_and_universal_unfold(tmp_path, capsys):
    fts = write(tmp_path, "fts.json", p1_fts().to_json())
    code, out, _ = run(["check-fts", "--fts", fts], capsys)
    assert code == 0 and "IC=True" in out
    code, out, _ = run(["universal-unfold", "--fts", fts, "--order", "4"], capsys)
    assert code == 0 and out.startswith("Frobenius axioms: pass")


def test_pipeline(capsys):
    code, out, _ = run(["pipeline-vphs-to-frobenius", "--pmhs", "builtin:rank4"], capsys)
    assert code == 0
    assert "spec(V) = {3/2, 1/2, -1/2, -3/2}" in out


def test_exit_code_for_invalid_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{")
    code, _, err = run(["check-fts", "--fts", str(p)], capsys)
    assert code == 2 and "invalid JSON" in err


def test_exit_code_for_non_nilpotent(tmp_path, capsys):
    obj = tate_pmhs().to_json()
    obj["N"][0] = [["1", "0"], ["0", "0"]]
    code, _, err = run(["hodge-pmhs", "--pmhs", write(tmp_path, "p.json", obj)], capsys)
    assert code == 2 and "/N/0" in err


def test_exit_code_for_failed_condition(tmp_path, capsys):
    code, out, _ = run(["hodge-pmhs", "--pmhs", write(tmp_path, "p.json", tate_pmhs(-1).to_json())], capsys)
    assert code == 3 and "positivity" in out and "FAIL" in out


def test_exit_code_for_solver_failure(capsys):
    code, _, err = run(["qc-reconstruct", "--model", "builtin:p1p1", "--seed", "builtin:p1p1-seed", "--W", "T1", "--max-degree", "2"], capsys)
    assert code == 4 and "solver failure" in err


def test_term_cap(monkeypatch, capsys):
    monkeypatch.setenv("FORGE_MAX_TERMS", "100")
    code, _, err = run(["qc-wdvv", "--model", "builtin:p2", "--gw", "builtin:p2"], capsys)
    assert code == 2 and "FORGE_MAX_TERMS" in err


def test_validate(tmp_path, capsys):
    obj = p2_model().to_json()
    assert run(["validate", "model", write(tmp_path, "m.json", obj)], capsys)[0] == 0
    obj["pairing"][1][2] = obj["pairing"][2][1] = "1"
    code, _, err = run(["validate", "model", write(tmp_path, "m2.json", obj)], capsys)
    assert code == 2 and "/pairing/1/2" in err
    bad_gw = write(tmp_path, "gw.json", [{"beta": [1], "insertions": {"T2": 1}, "value": "1"}])
    code, _, err = run(["validate", "gw", bad_gw, "--model", "builtin:p2"], capsys)
    assert code == 2 and "dimension" in err


def test_fixtures_export(tmp_path, capsys):
    code, _, _ = run(["fixtures", "--out", str(tmp_path)], capsys)
    assert code == 0
    pm = json.loads((tmp_path / "rank4_pmhs.json").read_text())
    assert pm == rank4_pmhs().to_json()


@pytest.mark.parametrize("cmd", sorted(cli.COMMANDS))
def test_every_subcommand_has_help(cmd, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.build_parser().parse_args([cmd, "--help"])
    assert exc.value.code == 0


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "logfrob.cli", "hodge-cone", "--pmhs", "builtin:p1p1"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "agree: True" in r.stdout
