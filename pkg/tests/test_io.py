import json
from pathlib import Path

import numpy as np
import pytest

from frolab import catalog, io
from frolab.covering import torus_cover
from frolab.errors import ParseError, RelationViolation
from frolab.hodge import hodge_table

EXAMPLES = Path(__file__).resolve().parents[1] / "docs" / "examples"


@pytest.mark.parametrize("name", sorted(catalog.CATALOG))
def test_catalog_files_round_trip(name, tmp_path):
    path = EXAMPLES / f"{name}.json"
    text = path.read_text()
    C = io.load_complex(path)
    assert C.coframe and C.name == name
    assert io.dumps_complex(C) == text
    assert io.dumps_complex(catalog.get(name)) == text
    out = tmp_path / "again.json"
    io.save_complex(C, out)
    assert out.read_bytes() == path.read_bytes()


def test_loaded_matrices_identical():
    C = io.load_complex(EXAMPLES / "iwasawa.json")
    ref = catalog.iwasawa()
    for which in ("del", "dbar"):
        a, b = C.matrices(which), ref.matrices(which)
        assert all(a[k].tolist() == b[k].tolist() for k in a)
    assert hodge_table(C) == hodge_table(ref)


def test_torus_file():
    C = io.load_complex(EXAMPLES / "torus1.json")
    assert C.dims == {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1}


def test_zero_denominator_located(tmp_path):
    text = (EXAMPLES / "iwasawa.json").read_text().replace('"-1/1"', '"-1/0"', 1)
    bad = tmp_path / "bad.json"
    bad.write_text(text)
    with pytest.raises(ParseError) as err:
        io.load_complex(bad)
    line = err.value.context["line"]
    assert '"-1/0"' in text.splitlines()[line - 1]
    assert "zero denominator" in str(err.value)


def test_malformed_json_located(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "n": 1,\n  "mode": "exact",,\n}')
    with pytest.raises(ParseError) as err:
        io.load_complex(bad)
    assert err.value.context["line"] == 3


@pytest.mark.parametrize("mutate,field", [
    (lambda d: d.pop("n"), "<root>"),
    (lambda d: d.update(mode="fuzzy"), "mode"),
    (lambda d: d["spaces"].append(dict(d["spaces"][0])), "spaces[9]"),
    (lambda d: d["dbar"][0]["entries"].append([99, 0, "1/1", "0/1"]), "dbar[0].entries[1][0]"),
])
def test_field_errors(mutate, field):
    doc = json.loads((EXAMPLES / "kodaira_thurston.json").read_text())
    mutate(doc)
    with pytest.raises(ParseError) as err:
        io.parse_complex(doc, json.dumps(doc))
    assert err.value.context["field"] == field


def test_relation_violation_on_load(tmp_path):
    doc = json.loads((EXAMPLES / "kodaira_thurston.json").read_text())
    # dbar 1 := wb2, then (del dbar + dbar del) 1 = del wb2 = -w1^wb1 != 0
    doc["dbar"].insert(0, {"p": 0, "q": 0, "entries": [[1, 0, "1/1", "0/1"]]})
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    with pytest.raises(RelationViolation) as err:
        io.load_complex(bad)
    assert err.value.context["bidegree"] == (0, 0)


def test_metric_round_trip():
    C = catalog.kodaira_thurston()
    g = catalog.random_metric(C, 9)
    text = io.dumps_complex(C, g)
    C2, g2 = io.loads_complex(text)
    assert io.dumps_complex(C2, g2) == text
    for pq in g.grams:
        assert np.array_equal(g.grams[pq], g2.grams[pq])


def test_float_complex_round_trip():
    C = catalog.iwasawa().to_float()
    text = io.dumps_complex(C)
    C2, _ = io.loads_complex(text)
    assert C2.mode == "float" and io.dumps_complex(C2) == text


def test_cover_file(tmp_path):
    cov = io.load_cover(EXAMPLES / "torus1_z2_cover.json")
    assert cov.gamma_order == 2 and [s.character for s in cov.sectors] == ["0", "1"]
    text = io.dumps_cover(torus_cover(1, 2))
    path = tmp_path / "inline.json"
    path.write_text(text)
    assert io.dumps_cover(io.load_cover(path)) == text
