"""Plot specification and deterministic rendering.

A plot spec is a JSON document::

    {
      "figure": "fig2b",            # one of the known figure ids
      "input": "golden/fig2b.csv",  # dataset path (string, or 1-element list)
      "out": "fig2b.png",           # image path to write
      "style": {"dpi": 150}         # optional overrides, see STYLE_KEYS
    }

Rendering is deterministic: fixed rc parameters, no timestamps, and the
same spec always produces byte-identical output.  Input datasets are read
only — rendering never mutates them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

from .figures import DRAWERS
from .schemas import FIGURES, SchemaError, load_table, validate_columns

__all__ = ["PlotSpec", "SpecError", "render", "load_spec"]


class SpecError(Exception):
    """Malformed plot spec (unknown figure, bad key, unreadable file)."""


_SPEC_KEYS = {"figure", "input", "out", "style"}
STYLE_KEYS = {"dpi", "cmap", "m", "figsize"}

# Fixed drawing defaults so output bytes do not depend on user rc files.
_RC = {
    "font.family": "DejaVu Sans",
    "font.size": 10.0,
    "axes.titlesize": 10.5,
    "axes.labelsize": 10.0,
    "figure.dpi": 100.0,
    "savefig.dpi": 150.0,
    "path.simplify": False,
    "svg.hashsalt": "sawtooth-figures",
}


@dataclass(frozen=True)
class PlotSpec:
    """Validated description of one figure to render."""

    figure: str
    input: Path
    out: Path
    style: dict = field(default_factory=dict)


def load_spec(path: str | Path) -> PlotSpec:
    """Read and validate a plot-spec JSON file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise SpecError(f"cannot read spec: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecError(f"{path}: spec must be a JSON object")
    return spec_from_mapping(doc, base=path.parent)


def spec_from_mapping(doc: dict, base: Path | None = None) -> PlotSpec:
    """Build a :class:`PlotSpec` from a parsed mapping.

    Relative input/output paths are resolved against ``base`` (the spec
    file's directory) when given.
    """
    unknown = set(doc) - _SPEC_KEYS
    if unknown:
        raise SpecError(f"unknown key(s) in spec: {sorted(unknown)}")
    for key in ("figure", "input", "out"):
        if key not in doc:
            raise SpecError(f"spec is missing required key {key!r}")

    figure = doc["figure"]
    if figure not in FIGURES:
        raise SpecError(
            f"unknown figure id {figure!r}; expected one of {sorted(FIGURES)}"
        )

    raw_input = doc["input"]
    if isinstance(raw_input, list):
        if len(raw_input) != 1:
            raise SpecError(
                f"figure {figure} takes exactly one input path, got {len(raw_input)}"
            )
        raw_input = raw_input[0]
    if not isinstance(raw_input, str):
        raise SpecError("spec key 'input' must be a path string")
    if not isinstance(doc["out"], str):
        raise SpecError("spec key 'out' must be a path string")

    style = doc.get("style", {})
    if not isinstance(style, dict):
        raise SpecError("spec key 'style' must be an object")
    bad = set(style) - STYLE_KEYS
    if bad:
        raise SpecError(f"unknown style key(s): {sorted(bad)}")

    def _resolve(p: str) -> Path:
        path = Path(p)
        if base is not None and not path.is_absolute():
            return base / path
        return path

    return PlotSpec(
        figure=figure,
        input=_resolve(raw_input),
        out=_resolve(doc["out"]),
        style=dict(style),
    )


def render(spec: PlotSpec) -> Path:
    """Render ``spec`` to its output image and return the written path.

    Raises :class:`SchemaError` when the dataset's columns do not match
    the figure id, :class:`SpecError` for spec-level problems.
    """
    columns, data = load_table(spec.input)
    validate_columns(spec.figure, columns)
    with matplotlib.rc_context(_RC):
        fig = DRAWERS[spec.figure](data, spec.style)
        dpi = float(spec.style.get("dpi", _RC["savefig.dpi"]))
        spec.out.parent.mkdir(parents=True, exist_ok=True)
        # metadata={} drops the creating-library PNG comment so reruns
        # are byte-identical even across matplotlib patch versions.
        fig.savefig(spec.out, dpi=dpi, metadata={})
    return spec.out
