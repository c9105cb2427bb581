"""Run-configuration schema for the batch CLI.

Configs are single JSON documents.  Loading is strict: unknown keys are
rejected at every nesting level, every number must be finite, and the
physical invariants of the lattice and emitters are re-checked by
constructing the real domain objects.  All schema problems raise
ConfigError, which the CLI maps to exit code 2; anything that goes wrong
after a config validated cleanly is a numerical failure (exit code 1).

Energies in the document are in units of J_AA unless the optional
top-level "unit" field rescales them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .bloch import LatticeParams
from .dynamics import EmitterSpec
from .parametric import ParametricPairConfig

__all__ = ["ConfigError", "RunConfig", "load_config", "COMMANDS"]

COMMANDS = (
    "bands",
    "selfenergy",
    "decay",
    "sweep",
    "boundstate",
    "spinmodel",
    "floquet",
    "dynamics",
)

_FORMATS = ("csv", "json")

# Top-level keys each command accepts beyond the common set.
_COMMON_KEYS = {"command", "unit", "output"}
_COMMAND_KEYS = {
    "bands": {"lattice", "grids", "couplings"},
    "selfenergy": {"lattice", "emitters", "grids", "eta"},
    "decay": {"lattice", "emitters", "grids", "report"},
    "sweep": {"lattice", "emitters", "grids", "which"},
    "boundstate": {"lattice", "emitters", "report", "window"},
    "spinmodel": {"lattice", "emitters"},
    "floquet": {"coupler", "report"},
    "dynamics": {
        "lattice", "emitters", "grids", "n_cells", "report",
        "boundary", "exclusion",
    },
}
_REQUIRED_KEYS = {
    "bands": {"lattice", "grids"},
    "selfenergy": {"lattice", "emitters", "grids"},
    "decay": {"lattice", "emitters", "grids"},
    "sweep": {"lattice", "emitters", "grids"},
    "boundstate": {"lattice", "emitters"},
    "spinmodel": {"lattice", "emitters"},
    "floquet": {"coupler"},
    "dynamics": {"lattice", "emitters", "grids", "n_cells"},
}
_GRID_KEYS = {
    "bands": {"required": {"k"}, "optional": {"phi"}},
    "selfenergy": {"required": {"delta"}, "optional": set()},
    "decay": {"required": {"delta"}, "optional": set()},
    "sweep": {"required": {"delta", "phi"}, "optional": set()},
    "dynamics": {"required": {"t"}, "optional": set()},
}
_REPORTS = {
    "decay": ("summary", "channels"),
    "boundstate": ("summary", "wavefunction"),
    "floquet": ("trajectory", "summary"),
    "dynamics": ("populations", "profile", "fractions"),
}
_WHICH_CHOICES = ("global", "local-a", "local-b")


class ConfigError(ValueError):
    """Schema or physical-validation failure while loading a config."""


@dataclass
class RunConfig:
    """Validated run description with constructed domain objects."""

    command: str
    raw: dict
    unit: float = 1.0
    lattice: LatticeParams | None = None
    emitters: tuple[EmitterSpec, ...] = ()
    grids: dict = field(default_factory=dict)
    output_path: str | None = None
    output_format: str = "csv"
    couplings: str | None = None
    eta: float = 0.0
    report: str | None = None
    which: tuple[str, ...] = ("global",)
    window: int | None = None
    n_cells: int | None = None
    boundary: str = "periodic"
    exclusion: int = 5
    coupler: ParametricPairConfig | None = None

    def grid_spec(self) -> dict:
        """Grid description for the metadata block, JSON-safe."""
        return {
            name: {"num": int(arr.size),
                   "min": float(arr.min()),
                   "max": float(arr.max())}
            for name, arr in self.grids.items()
        }


def _fail(msg: str) -> None:
    raise ConfigError(msg)


def _check_keys(obj: dict, allowed: set, where: str) -> None:
    if not isinstance(obj, dict):
        _fail(f"{where} must be a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        _fail(f"unknown key(s) in {where}: {sorted(unknown)}")


def _finite(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(f"{where} must be a number")
    if not math.isfinite(value):
        _fail(f"{where} must be finite, got {value!r}")
    return float(value)


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"{where} must be an integer")
    return value


def _grid_array(spec, where: str) -> np.ndarray:
    if not isinstance(spec, dict):
        _fail(f"{where} must be an object")
    if "values" in spec:
        _check_keys(spec, {"values"}, where)
        vals = spec["values"]
        if not isinstance(vals, list) or not vals:
            _fail(f"{where}.values must be a nonempty list")
        return np.array([_finite(v, f"{where}.values") for v in vals])
    _check_keys(spec, {"start", "stop", "num"}, where)
    for key in ("start", "stop", "num"):
        if key not in spec:
            _fail(f"{where} needs start/stop/num or values")
    num = _int(spec["num"], f"{where}.num")
    if num < 1:
        _fail(f"{where}.num must be >= 1")
    return np.linspace(_finite(spec["start"], f"{where}.start"),
                       _finite(spec["stop"], f"{where}.stop"), num)


def _build_lattice(obj: dict, unit: float) -> LatticeParams:
    _check_keys(obj, {"J_AA", "J_AB", "phi", "omega_B"}, "lattice")
    for key in ("J_AA", "J_AB"):
        if key not in obj:
            _fail(f"lattice.{key} is required")
    try:
        return LatticeParams(
            J_AA=unit * _finite(obj["J_AA"], "lattice.J_AA"),
            J_AB=unit * _finite(obj["J_AB"], "lattice.J_AB"),
            phi=_finite(obj.get("phi", 0.0), "lattice.phi"),
            omega_B=unit * _finite(obj.get("omega_B", 0.0), "lattice.omega_B"),
        )
    except ValueError as exc:
        _fail(f"lattice: {exc}")


def _build_emitters(obj, unit: float) -> tuple[EmitterSpec, ...]:
    if not isinstance(obj, list) or not obj:
        _fail("emitters must be a nonempty list")
    out = []
    for i, em in enumerate(obj):
        where = f"emitters[{i}]"
        _check_keys(em, {"D", "cell", "delta", "g"}, where)
        for key in ("D", "delta", "g"):
            if key not in em:
                _fail(f"{where}.{key} is required")
        if em["D"] not in ("A", "B"):
            _fail(f"{where}.D must be 'A' or 'B'")
        try:
            out.append(EmitterSpec(
                D=em["D"],
                cell=_int(em.get("cell", 0), f"{where}.cell"),
                delta=unit * _finite(em["delta"], f"{where}.delta"),
                g=unit * _finite(em["g"], f"{where}.g"),
            ))
        except ValueError as exc:
            _fail(f"{where}: {exc}")
    return tuple(out)


def _build_coupler(obj: dict, unit: float) -> ParametricPairConfig:
    keys = {"omega", "delta_detuning", "J", "phi", "t_max", "dt"}
    _check_keys(obj, keys, "coupler")
    for key in keys:
        if key not in obj:
            _fail(f"coupler.{key} is required")
    try:
        return ParametricPairConfig(
            omega=unit * _finite(obj["omega"], "coupler.omega"),
            delta_detuning=unit * _finite(obj["delta_detuning"],
                                          "coupler.delta_detuning"),
            J=unit * _finite(obj["J"], "coupler.J"),
            phi=_finite(obj["phi"], "coupler.phi"),
            t_max=_finite(obj["t_max"], "coupler.t_max"),
            dt=_finite(obj["dt"], "coupler.dt"),
        )
    except ValueError as exc:
        _fail(f"coupler: {exc}")


def load_config(path: str) -> RunConfig:
    """Parse, schema-check and physically validate one config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        _fail(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        _fail(f"config is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        _fail("config root must be a JSON object")

    command = raw.get("command")
    if command not in COMMANDS:
        _fail(f"command must be one of {COMMANDS}, got {command!r}")
    _check_keys(raw, _COMMON_KEYS | _COMMAND_KEYS[command], "config")
    missing = _REQUIRED_KEYS[command] - set(raw)
    if missing:
        _fail(f"missing required key(s) for {command}: {sorted(missing)}")

    cfg = RunConfig(command=command, raw=raw)
    cfg.unit = _finite(raw.get("unit", 1.0), "unit")
    if cfg.unit <= 0:
        _fail("unit must be positive")

    if "output" in raw:
        _check_keys(raw["output"], {"path", "format"}, "output")
        if "path" in raw["output"]:
            if not isinstance(raw["output"]["path"], str):
                _fail("output.path must be a string")
            cfg.output_path = raw["output"]["path"]
        fmt = raw["output"].get("format", "csv")
        if fmt not in _FORMATS:
            _fail(f"output.format must be one of {_FORMATS}")
        cfg.output_format = fmt

    if "lattice" in raw:
        cfg.lattice = _build_lattice(raw["lattice"], cfg.unit)
    if "emitters" in raw:
        cfg.emitters = _build_emitters(raw["emitters"], cfg.unit)
    if "coupler" in raw:
        cfg.coupler = _build_coupler(raw["coupler"], cfg.unit)

    if command in _GRID_KEYS:
        spec = _GRID_KEYS[command]
        grids_raw = raw.get("grids", {})
        _check_keys(grids_raw, spec["required"] | spec["optional"], "grids")
        missing = spec["required"] - set(grids_raw)
        if missing:
            _fail(f"grids for {command} need {sorted(missing)}")
        for name, g in grids_raw.items():
            cfg.grids[name] = _grid_array(g, f"grids.{name}")

    if command in _REPORTS:
        report = raw.get("report", _REPORTS[command][0])
        if report not in _REPORTS[command]:
            _fail(f"report for {command} must be one of {_REPORTS[command]}")
        cfg.report = report

    if command == "bands" and "couplings" in raw:
        if raw["couplings"] not in ("A", "B"):
            _fail("couplings must be 'A' or 'B'")
        cfg.couplings = raw["couplings"]

    if command == "selfenergy":
        cfg.eta = cfg.unit * _finite(raw.get("eta", 0.0), "eta")
        if cfg.eta < 0:
            _fail("eta must be >= 0")

    if command == "sweep":
        which = raw.get("which", ["global"])
        if not isinstance(which, list) or not which:
            _fail("which must be a nonempty list")
        for w in which:
            if w not in _WHICH_CHOICES:
                _fail(f"which entries must come from {_WHICH_CHOICES}")
        if len(set(which)) != len(which):
            _fail("which entries must be unique")
        cfg.which = tuple(which)

    if command == "boundstate" and "window" in raw:
        cfg.window = _int(raw["window"], "window")
        if cfg.window < 4:
            _fail("window must be >= 4 cells")

    if command == "dynamics":
        cfg.n_cells = _int(raw["n_cells"], "n_cells")
        if cfg.n_cells < 3:
            _fail("n_cells must be >= 3")
        cfg.boundary = raw.get("boundary", "periodic")
        if cfg.boundary not in ("periodic", "open"):
            _fail("boundary must be 'periodic' or 'open'")
        cfg.exclusion = _int(raw.get("exclusion", 5), "exclusion")
        if cfg.exclusion < 0:
            _fail("exclusion must be >= 0")
        t = cfg.grids["t"]
        if np.any(t < 0) or np.any(np.diff(t) < 0):
            _fail("grids.t must be nondecreasing and nonnegative")

    if command in ("selfenergy", "decay", "sweep", "boundstate"):
        if len(cfg.emitters) != 1:
            _fail(f"{command} takes exactly one emitter")
    if command == "spinmodel" and len(cfg.emitters) < 2:
        _fail("spinmodel needs at least two emitters")

    return cfg
