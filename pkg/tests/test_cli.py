import json
import subprocess
import sys
from pathlib import Path

import pytest

from islhmm.cli import main
from islhmm.fixtures import fixture_path, fixture_text

FIXTURES = Path(str(fixture_path("")))
MODELS = FIXTURES.parent / "data" / "models"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_scan_figures_text(capsys):
    code, out, _ = run(capsys, "scan", FIXTURES / "fig1.php", FIXTURES / "fig2.php")
    assert code == 1
    lines = out.splitlines()
    assert lines[0].endswith("fig1.php:3: sqli vulnerability, input at line 1, slice lines {1,2,3}")
    assert "    <input,Taint> <var_vv_u,Taint>" in lines
    assert lines[-1] == "2 alert(s), 3 slice(s), 2 file(s)"


def test_scan_json_schema(capsys):
    code, out, _ = run(capsys, "scan", "--format", "json", FIXTURES / "fig2.php")
    assert code == 1
    d = json.loads(out)
    assert list(d) == ["version", "model", "files", "slices", "alerts", "diagnostics", "errors"]
    (alert,) = d["alerts"]
    assert alert["lines"] == [1, 3, 5, 6] and alert["class"] == "xss"


def test_scan_jobs_do_not_change_output(capsys):
    _, one, _ = run(capsys, "scan", "--format", "json", FIXTURES)
    _, four, _ = run(capsys, "scan", "--format", "json", "--jobs", "4", FIXTURES)
    assert one == four


def test_scan_class_filter(capsys):
    code, out, _ = run(capsys, "scan", "--format", "json", "--class", "xss", FIXTURES / "fig1.php")
    assert code == 0
    assert json.loads(out)["slices"] == 0
    code, _, err = run(capsys, "scan", "--class", "nosuch", FIXTURES / "fig1.php")
    assert code == 2 and "unknown vulnerability class" in err


def test_scan_dumps(capsys):
    _, out, _ = run(capsys, "scan", "--dump-isl", FIXTURES / "fig1.php")
    first = fixture_text("fig1.table").splitlines()[0].replace("TL = {u}", "TL = {u}; CTL = {}; SL = {}")
    assert out.splitlines()[0] == first
    _, out, _ = run(capsys, "scan", "--format", "json", "--dump-slices", FIXTURES / "fig1.php")
    (detail,) = json.loads(out)["details"]
    assert detail["final_state"] == "Taint" and "slice" in detail


def test_scan_clean_and_errors(capsys, tmp_path):
    assert run(capsys, "scan", tmp_path)[0] == 0
    code, _, err = run(capsys, "scan", tmp_path / "missing.php")
    assert code == 2 and "no such file" in err
    bad = tmp_path / "bad.php"
    bad.write_text("<?php $a = ;\n")
    code, out, err = run(capsys, "scan", bad)
    assert code == 2 and "bad.php" in err


def test_reference_model_needs_flag(capsys):
    fig5 = MODELS / "fig5.model"
    code, _, err = run(capsys, "scan", "--model", fig5, FIXTURES / "fig1.php")
    assert code == 2 and "non-stochastic" in err
    code, out, _ = run(capsys, "scan", "--model", fig5, "--renormalize", FIXTURES / "fig1.php")
    assert code == 0 and out.endswith("0 alert(s), 1 slice(s), 1 file(s)\n")


def test_train_is_reproducible(capsys, tmp_path):
    corpus = FIXTURES / "demo.corpus"
    a, b = tmp_path / "a.model", tmp_path / "b.model"
    code, out, _ = run(capsys, "train", "--corpus", corpus, "--out", a)
    assert code == 0 and "91 entries, max_len 8" in out
    run(capsys, "train", "--corpus", corpus, "--out", b)
    assert a.read_bytes() == b.read_bytes() == (MODELS / "demo.model").read_bytes()


def test_train_errors(capsys, tmp_path):
    empty = tmp_path / "empty.corpus"
    empty.write_text("# nothing\n")
    code, _, err = run(capsys, "train", "--corpus", empty, "--out", tmp_path / "m")
    assert code == 2 and "empty corpus" in err
    bad = tmp_path / "bad.corpus"
    bad.write_text("<input,Taint>\n<ss,Val>\n")
    code, _, err = run(capsys, "train", "--corpus", bad, "--out", tmp_path / "m")
    assert code == 2 and "line 2" in err


def test_eval(capsys, tmp_path):
    corpus = FIXTURES / "listing3.corpus"
    out_json = tmp_path / "cv.json"
    code, out, _ = run(capsys, "eval", "--corpus", corpus, "--k", "4", "--format", "text", "--json-out", out_json)
    assert code == 0 and out.startswith("4-fold cross-validation, seed 0, 24 entries")
    assert json.loads(out_json.read_text())["entries"] == 24
    _, again, _ = run(capsys, "eval", "--corpus", corpus, "--k", "4", "--format", "text")
    assert again == out
    code, _, err = run(capsys, "eval", "--corpus", corpus, "--k", "25")
    assert code == 2 and "larger than the corpus" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "islhmm", "scan", str(FIXTURES / "fig1.php")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
    assert "sqli vulnerability" in proc.stdout


def test_bad_arguments(capsys):
    with pytest.raises(SystemExit) as info:
        main(["scan", "--jobs", "0", "x.php"])
    assert info.value.code == 2
