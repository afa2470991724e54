"""Run configuration: JSON files validated against a generated JSON Schema."""

from __future__ import annotations

import hashlib
import json
import typing
from dataclasses import dataclass, field, fields
from pathlib import Path

import jsonschema

from ..errors import ConfigError
from ..systems.params import SYSTEM_PARAMS

SYSTEMS = tuple(SYSTEM_PARAMS)
ENGINES = ("lindblad", "gaussian", "both")
METRICS = ("qdiscord", "cdiscord", "snr", "fidelity", "spectrum")
N_MODES = {"eomc": 3, "opd": 3, "qubits4": 4, "hemt": 2}
DEFAULT_DIMS = {"eomc": [8, 8, 8], "opd": [8, 8, 8], "qubits4": [3, 3, 3, 3], "hemt": [14, 14]}
DEFAULT_PAIRS = {"eomc": [[0, 2]], "opd": [[0, 2]], "qubits4": [[0, 1]], "hemt": [[0, 1]]}
QUBIT_LEVELS = (2, 3, 4)


def _param_schema(record) -> dict:
    """JSON Schema for a parameter record, derived from its dataclass fields."""
    hints = typing.get_type_hints(record)
    props = {}
    for f in fields(record):
        hint = str(hints[f.name])
        number = {"type": "number"}
        if "tuple" in hint:
            entry = {"oneOf": [number, {"type": "array", "items": number, "minItems": 4, "maxItems": 4}]}
        elif "bool" in hint:
            entry = {"type": "boolean"}
        else:
            entry = number
        if "None" in hint:
            entry = {"oneOf": [entry, {"type": "null"}]}
        props[f.name] = entry
    return {"type": "object", "properties": props, "additionalProperties": False}


def config_schema() -> dict:
    pair = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2}
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["system", "grid", "metrics"],
        "additionalProperties": False,
        "properties": {
            "description": {"type": "string"},
            "system": {"enum": list(SYSTEMS)},
            "engine": {"enum": list(ENGINES)},
            "params": {"type": "object"},
            "dims": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 2},
            "linearized": {"type": "boolean"},
            "grid": {
                "type": "object",
                "required": ["t1_ns", "n_points"],
                "additionalProperties": False,
                "properties": {
                    "t0_ns": {"type": "number", "minimum": 0},
                    "t1_ns": {"type": "number", "exclusiveMinimum": 0},
                    "n_points": {"type": "integer", "minimum": 2},
                },
            },
            "metrics": {"type": "array", "items": {"enum": list(METRICS)}, "minItems": 1, "uniqueItems": True},
            "mode_pairs": {"type": "array", "items": pair, "minItems": 1},
            "alpha_grid": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "start": {"type": "number", "minimum": 0},
                    "stop": {"type": "number", "minimum": 0},
                    "n_points": {"type": "integer", "minimum": 2},
                    "mode": {"type": "integer", "minimum": 0},
                },
            },
            "spectrum": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "mode": {"type": "integer", "minimum": 0},
                    "burn_in_ns": {"type": "number", "minimum": 0},
                    "prominence": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                },
            },
            "tolerances": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "rtol": {"type": "number", "exclusiveMinimum": 0},
                    "atol": {"type": "number", "exclusiveMinimum": 0},
                },
            },
            "strict": {"type": "boolean"},
            "max_dim": {"type": "integer", "minimum": 2},
            "output_dir": {"type": "string"},
            "sweep": {
                "type": "object",
                "required": ["param", "values"],
                "additionalProperties": False,
                "properties": {
                    "param": {"type": "string"},
                    "values": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                },
            },
        },
    }


@dataclass(frozen=True)
class RunConfig:
    system: str
    params: object
    grid: tuple[float, float, int]  # t0_ns, t1_ns, n_points
    metrics: tuple[str, ...]
    engine: str = "lindblad"
    dims: tuple[int, ...] = ()
    linearized: bool = False
    mode_pairs: tuple[tuple[int, int], ...] = ()
    alpha_grid: tuple[float, float, int] = (0.0, 2.0, 41)
    fidelity_mode: int = 0
    spectrum_mode: int = 0
    spectrum_burn_in_ns: float = 0.0
    spectrum_prominence: float = 0.05
    rtol: float = 1e-8
    atol: float = 1e-10
    strict: bool = False
    max_dim: int = 24
    output_dir: str | None = None
    description: str = ""
    sweep: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        check_compatibility(self)

    def to_dict(self) -> dict:
        """Canonical, fully defaulted form (used for hashing and echo)."""
        out = {
            "system": self.system,
            "engine": self.engine,
            "params": self.params.to_dict(),
            "dims": list(self.dims),
            "linearized": self.linearized,
            "grid": {"t0_ns": self.grid[0], "t1_ns": self.grid[1], "n_points": self.grid[2]},
            "metrics": list(self.metrics),
            "mode_pairs": [list(p) for p in self.mode_pairs],
            "alpha_grid": {
                "start": self.alpha_grid[0],
                "stop": self.alpha_grid[1],
                "n_points": self.alpha_grid[2],
                "mode": self.fidelity_mode,
            },
            "spectrum": {
                "mode": self.spectrum_mode,
                "burn_in_ns": self.spectrum_burn_in_ns,
                "prominence": self.spectrum_prominence,
            },
            "tolerances": {"rtol": self.rtol, "atol": self.atol},
            "strict": self.strict,
            "max_dim": self.max_dim,
        }
        if self.description:
            out["description"] = self.description
        return out

    def config_hash(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def replace(self, **changes) -> "RunConfig":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(changes)
        return RunConfig(**data)


def check_compatibility(cfg: RunConfig) -> None:
    problems = []
    n = N_MODES[cfg.system]
    if len(cfg.dims) != n:
        problems.append(f"dims: {cfg.system} has {n} modes, got {len(cfg.dims)} dimensions")
    if cfg.system == "qubits4" and any(d not in QUBIT_LEVELS for d in cfg.dims):
        problems.append(f"dims: qubit levels must be in {QUBIT_LEVELS}, got {list(cfg.dims)}")
    for i, j in cfg.mode_pairs:
        if i == j or max(i, j) >= n:
            problems.append(f"mode_pairs: invalid pair ({i}, {j}) for {n} modes")
    if cfg.spectrum_mode >= n:
        problems.append(f"spectrum.mode: {cfg.spectrum_mode} out of range for {n} modes")
    if cfg.fidelity_mode >= n:
        problems.append(f"alpha_grid.mode: {cfg.fidelity_mode} out of range for {n} modes")
    if "fidelity" in cfg.metrics and cfg.engine == "gaussian":
        problems.append("metrics: fidelity needs the density matrix, which the gaussian engine does not produce")
    if cfg.engine != "lindblad" and cfg.system == "qubits4":
        problems.append("engine: qubits4 runs only on the lindblad engine (its Gaussian form is documentation only)")
    if cfg.linearized and cfg.system not in ("eomc", "opd"):
        problems.append("linearized: only the converter systems have a linearized Lindblad model")
    if not cfg.grid[1] > cfg.grid[0]:
        problems.append("grid: t1_ns must exceed t0_ns")
    if cfg.alpha_grid[1] < cfg.alpha_grid[0]:
        problems.append("alpha_grid: stop must be >= start")
    if problems:
        raise ConfigError("; ".join(problems))


def config_from_dict(data: dict) -> RunConfig:
    validator = jsonschema.Draft202012Validator(config_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            loc = "/".join(str(p) for p in err.absolute_path) or "<root>"
            lines.append(f"{loc}: {err.message}")
        raise ConfigError("configuration schema violations:\n  " + "\n  ".join(lines))
    system = data["system"]
    record = SYSTEM_PARAMS[system]
    params_data = data.get("params", {})
    perr = sorted(jsonschema.Draft202012Validator(_param_schema(record)).iter_errors(params_data), key=str)
    if perr:
        lines = []
        for err in perr:
            loc = "/".join(["params"] + [str(p) for p in err.absolute_path])
            lines.append(f"{loc}: {err.message}")
        raise ConfigError("configuration schema violations:\n  " + "\n  ".join(lines))
    params = record.from_dict(params_data)
    grid = data["grid"]
    alpha = data.get("alpha_grid", {})
    spectrum_opts = data.get("spectrum", {})
    tol = data.get("tolerances", {})
    return RunConfig(
        system=system,
        engine=data.get("engine", "lindblad"),
        params=params,
        dims=tuple(data.get("dims", DEFAULT_DIMS[system])),
        linearized=data.get("linearized", False),
        grid=(float(grid.get("t0_ns", 0.0)), float(grid["t1_ns"]), int(grid["n_points"])),
        metrics=tuple(data["metrics"]),
        mode_pairs=tuple(tuple(p) for p in data.get("mode_pairs", DEFAULT_PAIRS[system])),
        alpha_grid=(float(alpha.get("start", 0.0)), float(alpha.get("stop", 2.0)), int(alpha.get("n_points", 41))),
        fidelity_mode=alpha.get("mode", 0),
        spectrum_mode=spectrum_opts.get("mode", 0),
        spectrum_burn_in_ns=float(spectrum_opts.get("burn_in_ns", 0.0)),
        spectrum_prominence=float(spectrum_opts.get("prominence", 0.05)),
        rtol=float(tol.get("rtol", 1e-8)),
        atol=float(tol.get("atol", 1e-10)),
        strict=data.get("strict", False),
        max_dim=data.get("max_dim", 24),
        output_dir=data.get("output_dir"),
        description=data.get("description", ""),
        sweep=data.get("sweep"),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        data = {}
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(data)


def bundled_config_path(name: str) -> Path:
    """Path of a configuration shipped with the package (e.g. ``table1.cfg``)."""
    return Path(__file__).resolve().parent.parent / "configs" / name
