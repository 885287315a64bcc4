import json

import pytest

from kcone.construct import example_family
from kcone.document import Document, cone_to_json

from scripts.kcone import run


@pytest.fixture
def k2_path(tmp_path, k2):
    path = tmp_path / "k2.json"
    Document(k2.cone, k2.reeb, {"name": k2.name}).save(path)
    return str(path)


def output(capsys):
    return json.loads(capsys.readouterr().out)


def test_validate(capsys, k2_path, tmp_path):
    assert run(["validate", k2_path]) == 0
    assert output(capsys)["is_good"] is True

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([[1, 0, 1], [1, 2, 3], [1, 1, 4], [0, -1, 1]]))
    assert run(["validate", str(bad)]) == 1
    assert output(capsys)["is_good"] is False


def test_invariants_and_blowdown(capsys, k2_path):
    assert run(["invariants", k2_path, "--face", "1"]) == 0
    assert output(capsys) == {"b": 2, "f": 0, "blowdown": False}

    assert run(["blowdown", k2_path, "--face", "1"]) == 1
    assert "report" in output(capsys)


def test_profile_graph_and_euler(capsys, k2_path):
    assert run(["profile", k2_path]) == 0
    assert output(capsys)["k"] == [0, 2, 2, 0, 1]

    assert run(["graph", k2_path]) == 0
    assert output(capsys)["nontrivial_chains"] == 1

    assert run(["euler-check", k2_path, "--y", "1,1,3"]) == 0
    report = output(capsys)
    assert report["ok"] is True and report["lhs"] == "1/2"


def test_construct(capsys):
    assert run(["construct", "--k", "2"]) == 0
    assert output(capsys)["cone"] == cone_to_json(example_family(2).cone)


def test_toric_and_homogeneous(capsys):
    assert run(["toric-check", "--vmin", "1,0", "--vmax", "1,2"]) == 0
    assert output(capsys) == {"v": [1, 1]}

    assert run(["homogeneous", "--poly", "x**3 + y**2", "--weights", "2,3", "--degree", "6"]) == 0
    assert output(capsys)["homogeneous"] is True


def test_catalog_and_render(capsys, k2_path, tmp_path):
    store = str(tmp_path / "store")
    assert run(["catalog", "list", "--store", store]) == 0
    assert output(capsys) == []

    assert run(["catalog", "add", k2_path, "--store", store]) == 0
    key = output(capsys)["hash"]
    assert run(["catalog", "get", key[:10], "--store", store]) == 0
    assert output(capsys)["metadata"]["name"] == "example-k2"

    out = tmp_path / "k2.svg"
    assert run(["render", k2_path, "--out", str(out)]) == 0
    assert out.read_text().startswith("<svg")


def test_usage_errors(capsys, tmp_path, k2_path):
    assert run(["frobnicate"]) == 2

    broken = tmp_path / "broken.json"
    broken.write_text("{\"cone\": [")
    assert run(["validate", str(broken)]) == 2
    assert str(broken) in capsys.readouterr().err

    assert run(["blowup", k2_path]) == 2
    assert run(["rank", k2_path, "--d", "4"]) == 1
