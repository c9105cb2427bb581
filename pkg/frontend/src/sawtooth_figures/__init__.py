"""Figure rendering for sawtooth-lattice waveguide QED datasets.

Consumes only the files exported by the ``sawtooth-qed`` CLI (CSV or
JSON) and renders the named preset figures deterministically.
"""

from .render import PlotSpec, SpecError, load_spec, render, spec_from_mapping
from .schemas import FIGURES, SchemaError, load_table, validate_columns

__all__ = [
    "FIGURES",
    "PlotSpec",
    "SchemaError",
    "SpecError",
    "load_spec",
    "load_table",
    "render",
    "spec_from_mapping",
    "validate_columns",
]

__version__ = "0.1.0"
