"""Dataset container and deterministic CSV/JSON export.

Every CLI command reduces to a rectangular table plus a metadata block.
Exports are reproducible byte for byte: floats are written with 12
significant digits, row order is fixed by the producing command, and no
clocks or hostnames enter the output.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

__all__ = [
    "Dataset",
    "config_hash",
    "export",
    "import_json",
]

_FLOAT_FMT = "%.12g"


def config_hash(raw_config: dict) -> str:
    """SHA-256 of the canonical JSON form of the config document."""
    canon = json.dumps(raw_config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


@dataclass
class Dataset:
    """One rectangular result table with provenance metadata."""

    columns: list[str]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(
                    f"row of width {len(r)} does not match "
                    f"{len(self.columns)} columns"
                )


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return _FLOAT_FMT % value
    return str(value)


def export(dataset: Dataset, path: str, fmt: str) -> None:
    if fmt == "csv":
        _export_csv(dataset, path)
    elif fmt == "json":
        _export_json(dataset, path)
    else:
        raise ValueError(f"unknown export format {fmt!r}")


def _export_csv(dataset: Dataset, path: str) -> None:
    lines = [",".join(dataset.columns)]
    for row in dataset.rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _json_value(value):
    if isinstance(value, float):
        if math.isnan(value):
            return None
        # Round through the text form so JSON and CSV agree digit for digit.
        return float(_FLOAT_FMT % value)
    return value


def _export_json(dataset: Dataset, path: str) -> None:
    doc = {
        "metadata": dataset.metadata,
        "columns": dataset.columns,
        "data": [[_json_value(v) for v in row] for row in dataset.rows],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def import_json(path: str) -> Dataset:
    """Inverse of the JSON export, for round-trip checks and consumers."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    rows = [tuple(r) for r in doc["data"]]
    return Dataset(columns=list(doc["columns"]), rows=rows,
                   metadata=dict(doc["metadata"]))
