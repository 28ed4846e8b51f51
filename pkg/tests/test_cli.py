import json

import pytest

from ununfold.cli import main


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    for kind in ("acute-hat", "flat-hat", "caltrop", "stacked-hat"):
        assert main(["generate", kind, "--out", str(d / f"{kind}.obj")]) == 0
    (d / "path.cut").write_text("1 4\n4 5\n5 6\n6 7\n1 2\n2 3\n3 1\n")
    return d


def test_lower_bound(capsys):
    assert main(["lower-bound", "subdivided", "--k", "3"]) == 0
    assert capsys.readouterr().out.strip() == "18"
    assert main(["lower-bound", "stacked", "--k", "0"]) == 0
    assert capsys.readouterr().out.strip() == "2"


def test_generate_families(tmp_path, capsys):
    assert main(["generate", "subdivided", "--k", "2", "--out", str(tmp_path / "s.obj")]) == 0
    assert main(["generate", "stacked", "--k", "1", "--out", str(tmp_path / "t.obj")]) == 0
    assert "144 faces" in capsys.readouterr().out


def test_caltrop_curvature(files, capsys):
    assert main(["curvature", str(files / "caltrop.obj")]) == 0
    out = capsys.readouterr().out
    assert "negative: 12" in out
    rows = [ln for ln in out.splitlines()[1:] if ln.strip() and ln.split()[0].isdigit()]
    assert sum(1 for r in rows if float(r.split()[2]) < 0) == 12


def test_verify_hat_exit_codes(files, tmp_path, capsys):
    report = tmp_path / "acute.json"
    assert main(["verify-hat", str(files / "acute-hat.obj"), "--mode", "interval", "--report", str(report)]) == 0
    doc = json.loads(report.read_text())
    assert doc["conclusion"] is True and doc["mode"] == "interval"
    assert main(["verify-hat", str(files / "flat-hat.obj"), "--mode", "float"]) == 2
    out = capsys.readouterr().out
    assert json.loads(out)["conclusion"] is False


def test_verify_hat_env_mode(files, monkeypatch, capsys):
    monkeypatch.setenv("UNUNFOLD_PRECISION", "float")
    assert main(["verify-hat", str(files / "stacked-hat.obj"), "--jobs", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["mode"] == "float"
    monkeypatch.setenv("UNUNFOLD_PRECISION", "quad")
    assert main(["verify-hat", str(files / "stacked-hat.obj")]) == 64


def test_enumerate_paths(files, capsys):
    assert main(["enumerate-paths", str(files / "acute-hat.obj")]) == 0
    out = capsys.readouterr().out
    assert "paths: 12  classes: 2" in out


def test_unfold_writes_svg(files, tmp_path, capsys):
    svg = tmp_path / "a.svg"
    assert main(["unfold", str(files / "acute-hat.obj"), "--cuts", str(files / "path.cut"), "--svg", str(svg)]) == 0
    out = capsys.readouterr().out
    assert "pieces: 1" in out and "overlapping face pairs: 4" in out
    assert svg.read_text().count("<polygon") >= 9


def test_audit_with_cuts_and_search(files, tmp_path, capsys):
    assert main(["audit", str(files / "acute-hat.obj"), "--cuts", str(files / "path.cut")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["hats"][0]["lemma3_path"] is True
    saved = tmp_path / "found.cut"
    assert main(["audit", str(files / "caltrop.obj"), "--save-cuts", str(saved)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["valid_unfolding"] and doc["n_pieces"] >= 2
    assert saved.read_text().strip()


def test_errors_and_usage(files, tmp_path, capsys):
    assert main([]) == 64
    assert main(["lower-bound", "subdivided"]) == 64
    assert main(["generate", "stacked", "--out", str(tmp_path / "x.obj")]) == 64
    assert main(["curvature", str(tmp_path / "missing.obj")]) == 1
    bad = tmp_path / "bad.obj"
    bad.write_text("v 0 0 0\nf 1 2\n")
    assert main(["curvature", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err
    assert main(["unfold", str(files / "caltrop.obj"), "--cuts", str(files / "path.cut")]) == 1
