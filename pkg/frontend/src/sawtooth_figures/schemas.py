"""Figure ids, their expected input columns, and dataset loading.

Each figure id corresponds to one dataset exported by the ``sawtooth-qed``
CLI.  The loader accepts both export formats bit-exactly as the CLI writes
them: CSV with a header row, or a JSON document with ``columns``, ``data``,
and ``metadata`` keys.  Schema validation is an exact column-sequence match;
anything else raises :class:`SchemaError`.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

__all__ = ["FIGURES", "SchemaError", "load_table", "validate_columns"]


class SchemaError(Exception):
    """Input dataset does not match the figure's expected schema."""


#: figure id -> exact column sequence the dataset must carry.
FIGURES: dict[str, tuple[str, ...]] = {
    "fig1c": ("phi[rad]", "k[rad]", "omega_u[E]", "omega_l[E]"),
    "fig2a": ("t[1/E]", "n", "p_a", "p_b"),
    "fig2b": ("delta[E]", "phi[rad]", "R_L_global"),
    "fig3": ("m", "energy[E]", "n", "re_c_a", "im_c_a", "re_c_b", "im_c_b"),
    "sm1": (
        "delta[E]",
        "re_sigma_A[E]",
        "im_sigma_A[E]",
        "gamma_A[E]",
        "re_sigma_B[E]",
        "im_sigma_B[E]",
        "gamma_B[E]",
    ),
    "sm2": ("phi[rad]", "k[rad]", "omega_u[E]", "omega_l[E]", "G_u_A", "G_l_A"),
    "sm3": ("delta[E]", "phi[rad]", "R_L_local_a", "R_L_local_b"),
    "sm4": ("t[1/E]", "n", "p_a", "p_b"),
}


def load_table(path: str | Path) -> tuple[list[str], dict[str, np.ndarray]]:
    """Read a CLI export and return ``(columns, column -> float array)``.

    The format is sniffed from the first non-whitespace character: ``{``
    means the JSON document form, anything else the CSV form.  Values are
    parsed as floats (``nan`` included); an empty dataset yields zero-length
    arrays.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read dataset: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _load_json(text, path)
    return _load_csv(text, path)


def _load_json(text: str, path: Path) -> tuple[list[str], dict[str, np.ndarray]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON dataset: {exc}") from exc
    if not isinstance(doc, dict) or "columns" not in doc or "data" not in doc:
        raise SchemaError(f"{path}: JSON dataset must carry 'columns' and 'data'")
    columns = [str(c) for c in doc["columns"]]
    rows = doc["data"]
    return columns, _columnize(columns, rows, path)


def _load_csv(text: str, path: Path) -> tuple[list[str], dict[str, np.ndarray]]:
    reader = csv.reader(text.splitlines())
    try:
        columns = next(reader)
    except StopIteration:
        raise SchemaError(f"{path}: dataset has no header row") from None
    rows = list(reader)
    return columns, _columnize(columns, rows, path)


def _columnize(
    columns: list[str], rows: list, path: Path
) -> dict[str, np.ndarray]:
    table = np.empty((len(rows), len(columns)), dtype=float)
    for i, row in enumerate(rows):
        if len(row) != len(columns):
            raise SchemaError(
                f"{path}: row {i + 1} has {len(row)} fields, expected {len(columns)}"
            )
        try:
            table[i] = [float(v) for v in row]
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{path}: row {i + 1}: {exc}") from exc
    return {name: table[:, j] for j, name in enumerate(columns)}


def validate_columns(figure: str, columns: list[str]) -> None:
    """Exact-sequence schema check for ``figure``; raises :class:`SchemaError`."""
    if figure not in FIGURES:
        raise SchemaError(
            f"unknown figure id {figure!r}; expected one of {sorted(FIGURES)}"
        )
    expected = FIGURES[figure]
    if tuple(columns) != expected:
        raise SchemaError(
            f"columns {columns!r} do not match the {figure} schema {list(expected)!r}"
        )
