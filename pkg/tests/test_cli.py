import json

from krpoly.cli import main
from krpoly.polyform import PolyhedralSpec


def test_orbits(capsys):
    assert main(["orbits", "--weight", "1,0,0,0"]) == 0
    out = capsys.readouterr().out
    assert "|W| = 1152" in out and "|O(1,0,0,0)| = 24" in out
    assert main(["orbits", "--type", "A2", "--weight", "1,0", "--list"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 4


def test_char(capsys, tmp_path):
    assert main(["char", "--weight", "1,0,0,0", "--cache-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "dimension 52" in out
    assert main(["char", "--weight=-1,0,0,0"]) == 2
    assert main(["char", "--weight", "x"]) == 2
    assert main(["char", "--weight", "1,0"]) == 2


def test_qtable(capsys):
    assert main(["qtable", "--type", "A1", "--node", "1", "--max-m", "2"]) == 0
    assert "Q^(1)_2 = L(2)" in capsys.readouterr().out
    assert main(["qtable", "--node", "1", "--max-m", "1"]) == 0
    assert "L(1,0,0,0) + L(0,0,0,0)" in capsys.readouterr().out


def test_verify_exit_codes(tmp_path, capsys):
    rep = tmp_path / "a2.json"
    assert main(["verify", "--type", "A2", "--node", "1", "--report", str(rep), "--quiet"]) == 0
    assert json.loads(rep.read_text())["status"] == "proved"
    assert main(["verify", "--type", "A2", "--node", "1", "--mode", "prob", "--quiet"]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(PolyhedralSpec.packaged("A1", 1).with_formula("2").to_dict()))
    assert main(["verify", "--type", "A1", "--node", "1", "--spec", str(bad), "--quiet"]) == 1
    assert "FAILED" in capsys.readouterr().out
    assert main(["verify", "--type", "Z9", "--quiet"]) == 2
