"""JSON presentation files for graded modules.

Layout::

    {
      "ring": {"characteristic": 2, "variables": ["U", "V", "W"], "power_relations": {}},
      "kind": "cokernel",
      "module": {
        "row_twists": [0],
        "column_twists": [1, 1, 1],
        "entries": [["U", "V", "W"]]
      }
    }

Entries are polynomial strings in the ring's variables; ``"0"`` marks a zero cell.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Union

from .errors import PresentationFormatError
from .exactfield import FieldSpec
from .graded_core import GradedMatrix, RingSpec
from .models import ModuleKind, PresentedModule

LOGGER = logging.getLogger(__name__)

FORMAT_VERSION = 1


def _require(data: Mapping[str, Any], key: str, where: str) -> Any:
    if not isinstance(data, Mapping) or key not in data:
        raise PresentationFormatError(f"missing {key!r} in {where}")
    return data[key]


def _int_list(value: Any, where: str) -> list:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise PresentationFormatError(f"{where} must be a list of integers")
    return value


def ring_from_dict(data: Mapping[str, Any]) -> RingSpec:
    characteristic = _require(data, "characteristic", "ring")
    variables = _require(data, "variables", "ring")
    relations = data.get("power_relations") or {}
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise PresentationFormatError("ring.variables must be a list of names")
    if not isinstance(relations, Mapping):
        raise PresentationFormatError("ring.power_relations must map variable names to exponents")
    field = FieldSpec(int(characteristic))
    if relations:
        return RingSpec.quotient(field, variables, {str(k): int(v) for k, v in relations.items()})
    return RingSpec.polynomial(field, variables)


def ring_to_dict(ring: RingSpec) -> Dict[str, Any]:
    return {
        "characteristic": ring.field.characteristic,
        "variables": list(ring.variables),
        "power_relations": {v: e for v, e in zip(ring.variables, ring.power_relations) if e is not None},
    }


def presentation_from_dict(data: Mapping[str, Any]) -> PresentedModule:
    ring = ring_from_dict(_require(data, "ring", "presentation"))
    kind = data.get("kind", ModuleKind.COKERNEL.value)
    try:
        kind = ModuleKind(kind)
    except ValueError as exc:
        raise PresentationFormatError(f"kind must be 'cokernel' or 'kernel', got {kind!r}") from exc
    module = _require(data, "module", "presentation")
    rows = _int_list(_require(module, "row_twists", "module"), "module.row_twists")
    cols = _int_list(_require(module, "column_twists", "module"), "module.column_twists")
    entries = _require(module, "entries", "module")
    if not isinstance(entries, list) or not all(isinstance(row, list) for row in entries):
        raise PresentationFormatError("module.entries must be a list of rows")
    # homogeneity and shape are checked by GradedMatrix itself
    matrix = GradedMatrix.from_rows(ring, entries, cols, rows)
    return PresentedModule(kind, matrix)


def presentation_to_dict(module: Union[PresentedModule, GradedMatrix]) -> Dict[str, Any]:
    if isinstance(module, GradedMatrix):
        module = PresentedModule.cokernel(module)
    f = module.map
    return {
        "version": FORMAT_VERSION,
        "ring": ring_to_dict(f.ring),
        "kind": module.kind.value,
        "module": {
            "row_twists": list(f.codomain.twists),
            "column_twists": list(f.domain.twists),
            "entries": [[str(p) for p in row] for row in f.rows()],
        },
    }


def loads(text: str) -> PresentedModule:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PresentationFormatError(f"invalid JSON: {exc}") from exc
    return presentation_from_dict(data)


def dumps(module: Union[PresentedModule, GradedMatrix]) -> str:
    return json.dumps(presentation_to_dict(module), indent=2)


def load_presentation(path: Path) -> PresentedModule:
    path = Path(path).expanduser()
    if not path.exists():
        raise FileNotFoundError(f"Presentation file not found: {path}")
    LOGGER.debug("Loading presentation %s", path)
    return loads(path.read_text(encoding="utf-8"))


def save_presentation(path: Path, module: Union[PresentedModule, GradedMatrix]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(module) + "\n", encoding="utf-8")
    return path
