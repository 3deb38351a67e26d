"""Structured-text I/O: reports as JSON, configuration as YAML or JSON."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import exact


def plain(obj: Any) -> Any:
    """Recursively convert numpy and Fraction values into JSON-ready builtins."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, Fraction):
        return exact.fmt(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(report: dict) -> str:
    # insertion order is the stable field order; floats use repr so output is bit-stable
    return json.dumps(plain(report), indent=2, allow_nan=True) + "\n"


def write_report(path: Path, report: dict) -> None:
    Path(path).write_text(dumps(report), encoding="utf-8")


def load_structured(path) -> Any:
    """Load YAML or JSON (JSON is a subset of YAML, so one parser reads both)."""
    text = Path(path).read_text(encoding="utf-8")
    return yaml.safe_load(text)


def load_regressions() -> dict:
    """Frozen regression constants shipped with the package."""
    from importlib.resources import files

    return yaml.safe_load(files("orbitcert").joinpath("data/regressions.yaml").read_text(encoding="utf-8"))
