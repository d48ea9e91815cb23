import json

import pytest

from reglab.errors import HomogeneityError, PresentationFormatError
from reglab.families import Setup1Params, Setup2Params, phi, psi
from reglab.homology import regularity
from reglab.models import ModuleKind, PresentedModule
from reglab.presentation import dumps, load_presentation, loads, save_presentation

RESIDUE_FIELD = {
    "ring": {"characteristic": 2, "variables": ["U", "V", "W"], "power_relations": {}},
    "kind": "cokernel",
    "module": {"row_twists": [0], "column_twists": [1, 1, 1], "entries": [["U", "V", "W"]]},
}


def test_load_documented_example(tmp_path):
    path = tmp_path / "residue.json"
    path.write_text(json.dumps(RESIDUE_FIELD), encoding="utf-8")
    module = load_presentation(path)
    assert module.kind is ModuleKind.COKERNEL
    assert module.map.shape == (1, 3)
    assert regularity(module).regularity == 0


def test_written_presentations_load_back(tmp_path):
    for f in (phi(Setup1Params(2), 3), psi(Setup1Params(1), 2), phi(Setup2Params(), 3)):
        path = save_presentation(tmp_path / "nested" / "map.json", f)
        assert load_presentation(path).map == f
    kernel = PresentedModule.kernel(phi(Setup2Params(), 2))
    assert loads(dumps(kernel)) == kernel
    assert json.loads(dumps(kernel))["version"] == 1


def test_quotient_ring_relations_survive():
    assert json.loads(dumps(phi(Setup1Params(), 1)))["ring"]["power_relations"] == {}
    data = dict(RESIDUE_FIELD, ring={"characteristic": 0, "variables": ["y", "v"], "power_relations": {"y": 2}})
    data["module"] = {"row_twists": [0], "column_twists": [1, 1], "entries": [["y", "v"]]}
    module = loads(json.dumps(data))
    assert module.ring.power_relations == (2, None)
    assert json.loads(dumps(module))["ring"]["power_relations"] == {"y": 2}


def test_inhomogeneous_entries_are_rejected():
    data = json.loads(json.dumps(RESIDUE_FIELD))
    data["module"]["entries"] = [["U", "V^2", "W"]]
    with pytest.raises(HomogeneityError):
        loads(json.dumps(data))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("ring"),
        lambda d: d["module"].pop("entries"),
        lambda d: d["module"].update(row_twists=["0"]),
        lambda d: d.update(kind="quotient"),
        lambda d: d["ring"].update(variables="UVW"),
    ],
    ids=["no-ring", "no-entries", "string-twists", "bad-kind", "bad-variables"],
)
def test_malformed_presentations(mutate):
    data = json.loads(json.dumps(RESIDUE_FIELD))
    mutate(data)
    with pytest.raises(PresentationFormatError):
        loads(json.dumps(data))


def test_invalid_json_and_missing_file(tmp_path):
    with pytest.raises(PresentationFormatError):
        loads("{not json")
    with pytest.raises(FileNotFoundError):
        load_presentation(tmp_path / "absent.json")
