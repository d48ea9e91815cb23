"""Filesystem helpers for the export layout ``<root>/<setup>/<params>/...``."""
from __future__ import annotations

import re
import unicodedata
from pathlib import Path
from typing import Optional


def slugify(value: str, fallback: str) -> str:
    if not value:
        return fallback
    normalized = unicodedata.normalize("NFKC", value).strip()
    if not normalized:
        return fallback
    sanitized = re.sub(r"[<>:\"/\\|?*\x00-\x1F]+", "-", normalized)
    sanitized = re.sub(r"\s+", "_", sanitized)
    sanitized = re.sub(r"-{2,}", "-", sanitized)
    sanitized = sanitized.strip(" -_")
    return sanitized or fallback


def params_slug(m: Optional[int], characteristic: int) -> str:
    if m is None:
        return f"char{characteristic}"
    return f"m{m}_char{characteristic}"


def export_directory(output_root: Path, setup_name: str, params: str) -> Path:
    directory = output_root / slugify(setup_name, "setup") / slugify(params, "default")
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def presentation_path(directory: Path, name: str, n: int) -> Path:
    return directory / "presentations" / f"{slugify(name, 'map')}_n{n:03d}.json"


def closed_forms_path(directory: Path) -> Path:
    return directory / "closed_forms.csv"


def run_log_path(directory: Path) -> Path:
    return directory / "runs.ndjson"
