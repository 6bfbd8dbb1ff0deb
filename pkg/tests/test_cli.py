import json
import os

import pytest

from dcsplit import jsonio
from dcsplit.cli import main


@pytest.fixture(autouse=True)
def _clean_caps(monkeypatch):
    # main() merges --caps into the environment; setenv makes monkeypatch restore it afterwards
    monkeypatch.setenv("DCSPLIT_CAPS", "")


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


@pytest.fixture
def median_file(tmp_path, capsys):
    path = tmp_path / "median.json"
    assert main(["example", "median", "-o", str(path)]) == 0
    return path


def test_validate_and_weights(capsys, median_file):
    code, out, _ = _run(capsys, "validate", str(median_file))
    assert code == 0 and out["ok"] and out["cells"] == 6
    code, out, _ = _run(capsys, "weights", str(median_file))
    assert code == 0
    assert sorted(out["weights"].values()) == ["-1", "-1", "-1", "1", "1", "1"]
    assert len(out["plus"]) == 3 and len(out["minus"]) == 3


def test_decompose_modes(capsys, median_file):
    code, out, _ = _run(capsys, "decompose", str(median_file))
    assert code == 0 and out["pieces"] == [3, 3]
    assert out["flags"] == {"vertex": True, "reduced": True, "irreducible": True, "minimal": True}
    code, out, _ = _run(capsys, "decompose", str(median_file), "--enumerate")
    assert code == 0 and out["count"] == 1
    code, out, _ = _run(capsys, "decompose", str(median_file), "--minimal")
    assert code == 0 and out["count"] == 1
    code, _, err = _run(capsys, "decompose", str(median_file), "--objective", "1,0,1,1,1,1")
    assert code == 1 and "ValidationError" in err


def test_check_pair(capsys, tmp_path, median_file):
    code, out, _ = _run(capsys, "decompose", str(median_file))
    g = dict(out["g"])
    h = dict(out["h"], complex=g["complex"])
    (tmp_path / "g.json").write_text(json.dumps(g))
    (tmp_path / "h.json").write_text(json.dumps(h))
    code, out, _ = _run(capsys, "check", str(median_file), str(tmp_path / "g.json"), str(tmp_path / "h.json"))
    assert code == 0
    assert out["certificate"] is True and out["vertex"] is True


def test_constructions(capsys, tmp_path, median_file):
    code, out, _ = _run(capsys, "construct", "hyperplane-ext", str(median_file))
    assert code == 0 and out["pieces"] == [6, 3]
    code, out, _ = _run(capsys, "construct", "local-max", str(median_file))
    assert code == 0 and set(out["weights_g"].values()) == {"2"}
    tran = tmp_path / "tran.json"
    assert main(["example", "tran", "-o", str(tran)]) == 0
    code, out, _ = _run(capsys, "construct", "tran2d", str(tran))
    assert code == 0 and out["new_ray"] == [-1, -1] and out["closing_weight"] == "1"
    code, out, _ = _run(capsys, "construct", "order-stat", "--n", "3", "--k", "2")
    assert code == 0 and "f" in out
    terms = tmp_path / "terms.json"
    terms.write_text(json.dumps({"dim": 2, "terms": [{"coef": "1", "a": [1, 0], "b": 0, "c": [0, 1], "d": 0},
                                                     {"coef": "-2", "a": [1, 1], "b": 0, "c": [0, 0], "d": 0}]}))
    code, out, _ = _run(capsys, "construct", "sign-split", str(terms))
    assert code == 0 and all(v in {"0", "1", "2"} for v in out["weights_g"].values())


def test_glue_counterexample_exits_2(capsys, tmp_path):
    path = tmp_path / "cx.json"
    assert main(["example", "counterexample", "-o", str(path)]) == 0
    code, out, _ = _run(capsys, "glue", str(path))
    assert code == 2
    assert out["feasible"] is False and out["certificate_verified"] is True
    poly = tmp_path / "poly.json"
    assert main(["example", "counterexample-polygons", "-o", str(poly)]) == 0
    code, out, _ = _run(capsys, "glue", str(poly))
    assert code == 2 and out["certificate_verified"] is True


def test_submod_commands(capsys, tmp_path):
    graph = tmp_path / "g.json"
    graph.write_text(json.dumps({"n": 3, "edges": [[0, 1, "1"], [1, 2, "-2"]]}))
    code, out, _ = _run(capsys, "submod", "cut", str(graph))
    assert code == 0
    setfn = tmp_path / "F.json"
    setfn.write_text(json.dumps(out))
    code, out, _ = _run(capsys, "submod", "issubmodular", str(setfn))
    assert code == 0 and out["submodular"] is False
    code, out, _ = _run(capsys, "submod", "decompose", str(setfn))
    assert code == 0 and out["flags"]["vertex"] is True
    code, lov, _ = _run(capsys, "submod", "lovasz", str(setfn))
    assert code == 0
    ext = tmp_path / "L.json"
    ext.write_text(json.dumps(lov))
    code, out, _ = _run(capsys, "submod", "tosetfn", str(ext))
    assert code == 0 and jsonio.setfn_from_json(out) == jsonio.setfn_from_json(json.loads(setfn.read_text()))
    code, _, err = _run(capsys, "submod", "greedy", str(setfn))
    assert code == 1 and "NotSubmodular" in err


def test_nn_commands(capsys, tmp_path, median_file):
    net = tmp_path / "net.json"
    code, out, _ = _run(capsys, "nn", "dc", str(median_file), "--r", "1", "--s", "3", "-o", str(net))
    assert code == 0
    net_data = json.loads(net.read_text())
    assert net_data["stats"]["depth"] == 3
    code, out, _ = _run(capsys, "nn", "verify", str(net), str(median_file), "--samples", "20")
    assert code == 0 and out["passed"]
    code, out, _ = _run(capsys, "nn", "eval", str(net), "--point", "2,1")
    assert out == {"value": "1"}
    code, out, _ = _run(capsys, "nn", "stats", str(net))
    assert out["depth"] == 3
    code, _, err = _run(capsys, "nn", "build", str(median_file))
    assert code == 1 and "NotConvex" in err
    code, out, _ = _run(capsys, "nn", "dc", str(median_file), "--float")
    assert code == 0 and out["dtype"] == "f64"


def test_plot(capsys, tmp_path, median_file):
    svg = tmp_path / "m.svg"
    code, out, _ = _run(capsys, "plot", str(median_file), "-o", str(svg))
    assert code == 0 and svg.read_text().startswith("<svg")


def test_usage_errors(capsys):
    assert main(["frobnicate"]) == 64
    assert main(["construct", "order-stat"]) == 64
    assert main(["nn", "verify", "only-one.json"]) == 64
    capsys.readouterr()


def test_missing_file_is_validation_error(capsys, tmp_path):
    code, _, err = _run(capsys, "weights", str(tmp_path / "nope.json"))
    assert code == 1 and "error" in err


def test_cap_override_exits_3(capsys, median_file):
    code, _, err = _run(capsys, "--caps", "vertex_ineqs=4", "decompose", str(median_file), "--enumerate")
    assert code == 3 and "CapExceeded" in err


def test_bad_caps_string(capsys, median_file):
    code, _, _ = _run(capsys, "--caps", "nonsense", "weights", str(median_file))
    assert code in (1, 64)


def test_caps_override_does_not_leak(capsys, median_file):
    main(["--caps", "vertex_ineqs=4", "weights", str(median_file)])
    capsys.readouterr()
    assert os.environ.get("DCSPLIT_CAPS") == ""
