import json
import subprocess
import sys
from pathlib import Path

import pytest

from frolab.cli import main

EXAMPLES = Path(__file__).resolve().parents[1] / "docs" / "examples"


def run(args, tmp_path, name="out.txt"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, (out.read_text() if out.exists() else "")


def test_check_torus2(tmp_path):
    code, text = run(["check", "--model", "torus2"], tmp_path)
    assert code == 0
    assert json.loads(text)["ddbar_lemma"] == "LEMMA_HOLDS"


def test_check_iwasawa_lemma_failure_is_informational(tmp_path):
    code, text = run(["check", "--model", "iwasawa"], tmp_path)
    doc = json.loads(text)
    assert code == 0 and doc["ddbar_lemma"] == "LEMMA_FAILS" and doc["first_strict_k"] == 1


def test_check_corrupted_file(tmp_path, capsys):
    doc = json.loads((EXAMPLES / "kodaira_thurston.json").read_text())
    doc["dbar"].insert(0, {"p": 0, "q": 0, "entries": [[1, 0, "1/1", "0/1"]]})
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, text = run(["check", "--model", str(bad)], tmp_path)
    assert code == 1 and text == ""
    assert "RELATION_VIOLATION" in capsys.readouterr().err


def test_parse_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text((EXAMPLES / "torus1.json").read_text().replace('"n": 1', '"n": "one"'))
    assert main(["check", "--file", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "PARSE_ERROR" in err and "bad.json:2" in err


def test_unknown_model(capsys):
    assert main(["check", "--model", "nope"]) == 1


def test_sweep_torus(tmp_path):
    code, text = run(["sweep", "--model", "torus1", "--h-count", "4", "--format", "csv"], tmp_path)
    lines = text.splitlines()
    assert code == 0 and len(lines) == 5 and lines[0].startswith("model,k,h,")


def test_sweep_iwasawa_auto_tau(tmp_path):
    code, text = run(["sweep", "--model", "iwasawa", "--k", "1", "--tau", "auto"], tmp_path)
    doc = json.loads(text)
    assert code == 0 and doc["tau_auto"] and doc["resolvent_monotone"]
    assert [r["h"] for r in doc["rows"]] == [2.0 ** -j for j in range(10)]


def test_sweep_increasing_grid_is_input_error():
    assert main(["sweep", "--model", "iwasawa", "--h-start", "0.25", "--h-factor", "2"]) == 1


def test_sweep_bad_sigma_tau():
    assert main(["sweep", "--model", "iwasawa", "--sigma", "1", "--tau", "0.5"]) == 1


def test_sweep_strict_nonmonotone(tmp_path, monkeypatch):
    import frolab.spectral as sp
    verdicts = iter(["INJECTIVE", "DEGENERATE", "INJECTIVE"])
    real = sp.projector_injectivity

    def fake(*a, **kw):
        c = real(*a, **kw)
        c.verdict = next(verdicts)
        return c

    monkeypatch.setattr(sp, "projector_injectivity", fake)
    code, _ = run(["sweep", "--model", "torus1", "--h-count", "3", "--strict"], tmp_path)
    assert code == 3


def test_inject(tmp_path):
    code, text = run(["inject", "--model", "kodaira_thurston", "--h-start", "0.01", "--h-count", "2"], tmp_path)
    doc = json.loads(text)
    assert code == 0 and all(r["verdict"] == "INJECTIVE" for r in doc["rows"])


def test_cover_from_file(tmp_path):
    code, text = run(["cover", "--file", str(EXAMPLES / "torus2_z3_cover.json")], tmp_path)
    doc = json.loads(text)
    assert code == 0 and doc["gammaOrder"] == 3 and doc["degrees"][1]["b"] == "4/3"


def test_cover_needs_torus_or_file():
    assert main(["cover", "--model", "iwasawa", "--gamma-order", "2"]) == 1


def test_figures(tmp_path):
    figs = tmp_path / "figs"
    code, _ = run(["sweep", "--model", "iwasawa", "--h-count", "3", "--figures", str(figs)], tmp_path)
    assert code == 0 and (figs / "iwasawa_k1_sweep.png").stat().st_size > 0


def test_byte_identical_reruns(tmp_path):
    for args in (["check", "--model", "iwasawa"], ["sweep", "--model", "kodaira_thurston", "--metric-seed", "3"]):
        _, a = run(args, tmp_path, "a.txt")
        _, b = run(args, tmp_path, "b.txt")
        assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "frolab", "check", "--model", "torus1", "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("model,")


def test_help_exit():
    with pytest.raises(SystemExit):
        from frolab.cli import build_parser
        build_parser().parse_args(["--help"])
