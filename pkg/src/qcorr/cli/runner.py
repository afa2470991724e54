"""Scenario orchestration: build, evolve, measure, write CSV/SVG and a report."""

from __future__ import annotations

import json
import math
import platform
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from .. import __version__
from ..errors import ConfigError, ConvergenceFailure, InvalidStateError, NumericalError, QcorrError
from ..gaussian import evolve_cm, evolve_moments
from ..lindblad import evolve
from ..metrics import (
    TruncationWarning,
    TwoModeCM,
    discord,
    fidelity_coherent,
    moments_from_state,
    pad_state,
    physical_cm,
    snr,
    spectrum,
)
from ..operators import QuantumState, number, partial_trace, vacuum_state
from ..systems.converters import build_eomc_drift, build_eomc_lindblad, build_opd_drift, build_opd_lindblad
from ..systems.hemt import build_hemt_drift, build_hemt_lindblad
from ..systems.qubits import build_qubit_lindblad, qubit_rates
from .config import QUBIT_LEVELS, RunConfig

NS = 1e-9
FIDELITY_PAD_DIM = 64
CSV_FORMAT = ".16e"  # 17 significant digits
DISCORD_MIN_DIM = 8
QUBIT_NOTE = "qubit moments use a Gaussian approximation of the truncated level structure"


@dataclass
class RunReport:
    config_hash: str
    system: str
    engine: str
    version: dict
    files: dict[str, dict[str, str]] = field(default_factory=dict)
    convergence: dict | None = None
    diagnostics: dict = field(default_factory=dict)
    peaks: dict = field(default_factory=dict)
    out_dir: str = ""

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "system": self.system,
            "engine": self.engine,
            "version": self.version,
            "files": self.files,
            "convergence": self.convergence,
            "diagnostics": self.diagnostics,
            "peaks": self.peaks,
        }

    def missing_files(self) -> list[str]:
        base = Path(self.out_dir)
        return [p for entry in self.files.values() for p in entry.values() if not (base / p).is_file()]


def version_stamp() -> dict:
    return {"qcorr": __version__, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()}


# --------------------------------------------------------------------------
# system assembly


def omega_ref(cfg: RunConfig) -> float:
    """Angular frequency that sets the model time unit."""
    p = cfg.params
    if cfg.system == "eomc":
        return p.omega_m
    if cfg.system == "opd":
        return p.omega_eg
    if cfg.system == "qubits4":
        return qubit_rates(p).omega_ref
    return p.delta_1


def model_times(cfg: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    """(t in ns, t in model units) for the configured grid."""
    t0, t1, n = cfg.grid
    t_ns = np.linspace(t0, t1, n)
    return t_ns, t_ns * NS * omega_ref(cfg)


def build_lindblad(cfg: RunConfig, dims=None):
    dims = tuple(dims or cfg.dims)
    if cfg.system == "eomc":
        return build_eomc_lindblad(cfg.params, dims, cfg.linearized)
    if cfg.system == "opd":
        return build_opd_lindblad(cfg.params, dims, cfg.linearized)
    if cfg.system == "qubits4":
        return build_qubit_lindblad(cfg.params, dims)
    return build_hemt_lindblad(cfg.params, dims)


def build_drift(cfg: RunConfig):
    if cfg.system == "eomc":
        return build_eomc_drift(cfg.params)
    if cfg.system == "opd":
        return build_opd_drift(cfg.params)
    if cfg.system == "hemt":
        return build_hemt_drift(cfg.params)
    raise ConfigError("qubits4 has no Gaussian engine model")


# --------------------------------------------------------------------------
# trajectories of moments


@dataclass
class Trajectory:
    """Quadrature moments of every mode along the grid."""

    means: np.ndarray  # (T, 2n)
    cms: np.ndarray  # (T, 2n, 2n)
    occupation: np.ndarray  # (T,) for the spectrum mode
    final_state: QuantumState | None = None
    stats: dict = field(default_factory=dict)


def lindblad_trajectory(cfg: RunConfig, dims=None) -> Trajectory:
    dims = tuple(dims or cfg.dims)
    model = build_lindblad(cfg, dims)
    space = model.space
    _, tau = model_times(cfg)
    modes = list(range(space.n_modes))
    check = cfg.system != "qubits4"

    def moments(rho):
        state = QuantumState(space, rho, validate=False)
        means, sigma = moments_from_state(state, modes, strict=cfg.strict, check_truncation=check)
        return np.concatenate([means, sigma.ravel()])

    n_op = number(space, cfg.spectrum_mode)
    last = {}

    def keep_last(rho):
        last["rho"] = rho.copy()

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        res = evolve(
            model, vacuum_state(space), tau, rtol=cfg.rtol, atol=cfg.atol,
            e_ops={"moments": moments, "n": n_op, "final": keep_last},
        )
    k = 2 * space.n_modes
    flat = res.expect["moments"]
    means, cms = flat[:, :k], flat[:, k:].reshape(-1, k, k)
    try:
        final = QuantumState(space, last["rho"])
    except InvalidStateError as exc:
        raise InvalidStateError(f"{exc}; integration error at rtol={cfg.rtol:g}, atol={cfg.atol:g} may be too large") from exc
    stats = {
        "dims": list(dims),
        "n_steps": res.n_steps,
        "error_estimate": res.error_estimate,
        "max_trace_drift": res.max_trace_drift,
        "min_eigenvalue": res.min_eigenvalue,
        "max_hermiticity_error": res.max_hermiticity_error,
        "n_states_validated": res.n_validated,
        "truncation_warnings": sorted({str(w.message) for w in caught if issubclass(w.category, TruncationWarning)}),
    }
    return Trajectory(means, cms, np.real(res.expect["n"]), final, stats)


def gaussian_trajectory(cfg: RunConfig) -> Trajectory:
    model = build_drift(cfg)
    _, tau = model_times(cfg)
    k = model.A.shape[0]
    means = evolve_moments(model, np.zeros(k), tau, rtol=cfg.rtol, atol=cfg.atol)
    cms = evolve_cm(model, 0.5 * np.eye(k), tau, rtol=cfg.rtol, atol=cfg.atol)
    x, y = 2 * cfg.spectrum_mode, 2 * cfg.spectrum_mode + 1
    occ = 0.5 * (cms[:, x, x] + cms[:, y, y] + means[:, x] ** 2 + means[:, y] ** 2 - 1.0)
    return Trajectory(means, cms, occ, None, {"n_modes": k // 2})


# --------------------------------------------------------------------------
# metrics


def _pair_cm(cfg: RunConfig, cms: np.ndarray, i: int, j: int) -> tuple[np.ndarray, float]:
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    sigma = cms[np.ix_(idx, idx)]
    if cfg.system == "qubits4":
        return physical_cm(sigma)
    return sigma, 0.0


def _pair_label(cfg: RunConfig, i: int, j: int) -> str:
    return "" if len(cfg.mode_pairs) == 1 else f"_{i + 1}_{j + 1}"


def compute_metrics(cfg: RunConfig, traj: Trajectory, engine: str, dims=None) -> tuple[dict, dict, dict]:
    """Return (tables, diagnostics, peaks); each table maps column -> array."""
    t_ns, tau = model_times(cfg)
    tables: dict[str, dict[str, np.ndarray]] = {}
    diag: dict = {}
    peaks: dict = {}
    want_q, want_c = "qdiscord" in cfg.metrics, "cdiscord" in cfg.metrics
    if want_q or want_c:
        if cfg.system != "qubits4" and engine == "lindblad":
            dims = tuple(dims or cfg.dims)
            for i, j in cfg.mode_pairs:
                if min(dims[i], dims[j]) < DISCORD_MIN_DIM:
                    raise ConfigError(
                        f"discord of modes ({i}, {j}) needs dims >= {DISCORD_MIN_DIM}, got {dims[i]}, {dims[j]}"
                    )
        q_cols, c_cols = {}, {}
        worst_delta = 0.0
        for i, j in cfg.mode_pairs:
            qs, cs = [], []
            for cm in traj.cms:
                sigma, delta = _pair_cm(cfg, cm, i, j)
                worst_delta = max(worst_delta, delta)
                res = discord(TwoModeCM(sigma))
                qs.append(res.quantum)
                cs.append(res.classical)
            label = _pair_label(cfg, i, j)
            q_cols["qdiscord" + label] = np.array(qs)
            c_cols["cdiscord" + label] = np.array(cs)
        if cfg.system == "qubits4":
            diag["physical_cm_max_delta"] = worst_delta
            diag["note"] = QUBIT_NOTE
        if want_q:
            tables["qdiscord"] = q_cols
        if want_c:
            tables["cdiscord"] = c_cols
    if "snr" in cfg.metrics:
        cols = {}
        for i, j in cfg.mode_pairs:
            cms = traj.cms
            if cfg.system == "qubits4":
                cms = cms.copy()
                idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
                for k in range(cms.shape[0]):
                    cms[k][np.ix_(idx, idx)] = _pair_cm(cfg, traj.cms[k], i, j)[0]
            s = snr(traj.means, cms, i, j, t_ns)
            cols[f"snr_{i + 1}"] = s.values["snr_i"]
            cols[f"snr_{j + 1}"] = s.values["snr_j"]
            cols[f"snr_{i + 1}_{j + 1}"] = s.values["snr_pair"]
        tables["snr"] = cols
    if "fidelity" in cfg.metrics:
        a0, a1, na = cfg.alpha_grid
        alphas = np.linspace(a0, a1, na)
        red = partial_trace(traj.final_state, [cfg.fidelity_mode])
        pad = max(FIDELITY_PAD_DIM, int(math.ceil(4 * a1 * a1)) + 1)
        red = pad_state(red, pad)
        tables["fidelity"] = {"fidelity": np.array([fidelity_coherent(red, a) for a in alphas])}
    if "spectrum" in cfg.metrics:
        keep = t_ns >= cfg.grid[0] + cfg.spectrum_burn_in_ns
        freqs, mag, found = spectrum(traj.occupation[keep], times=t_ns[keep], prominence=cfg.spectrum_prominence)
        tables["spectrum"] = {"magnitude": mag, "_x": freqs}
        peaks = {"mode": cfg.spectrum_mode, "frequencies_ghz": [p.frequency for p in found],
                 "magnitudes": [p.magnitude for p in found], "count": len(found)}
        tables["occupation"] = {f"n_{cfg.spectrum_mode + 1}": traj.occupation}
    return tables, diag, peaks


# --------------------------------------------------------------------------
# output


X_COLUMNS = {"fidelity": "alpha", "spectrum": "frequency_ghz"}


def provenance_lines(cfg: RunConfig, engine: str, metric: str) -> list[str]:
    echo = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    lines = [
        f"# qcorr {__version__} metric={metric}",
        f"# config_sha256: {cfg.config_hash()}",
        f"# system: {cfg.system}",
        f"# engine: {engine}",
        f"# tolerances: rtol={cfg.rtol:.3e} atol={cfg.atol:.3e}",
        "# time unit: ns; grid extents are repo-chosen",
        f"# config: {echo}",
    ]
    if cfg.system == "qubits4":
        lines.insert(-1, f"# note: {QUBIT_NOTE}")
    return lines


def write_csv(path: Path, header: list[str], columns: list[np.ndarray], provenance: list[str]) -> None:
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    lines = list(provenance)
    lines.append(",".join(header))
    for row in data:
        lines.append(",".join(format(float(v), CSV_FORMAT) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and data of a CSV written by :func:`write_csv`."""
    text = Path(path).read_text(encoding="utf-8").splitlines()
    body = [ln for ln in text if not ln.startswith("#")]
    header = body[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in body[1:]])
    return header, data.reshape(-1, len(header))


def _merge(tables_by_engine: dict[str, dict]) -> dict[str, dict[str, np.ndarray]]:
    if len(tables_by_engine) == 1:
        return next(iter(tables_by_engine.values()))
    merged: dict[str, dict[str, np.ndarray]] = {}
    for engine, tables in tables_by_engine.items():
        for metric, cols in tables.items():
            dest = merged.setdefault(metric, {})
            for name, val in cols.items():
                dest[name if name == "_x" else f"{name}_{engine}"] = val
    return merged


def write_outputs(cfg: RunConfig, out: Path, tables: dict, engine: str) -> dict[str, dict[str, str]]:
    from .plotting import plot_csv

    out.mkdir(parents=True, exist_ok=True)
    t_ns, _ = model_times(cfg)
    files = {}
    if "qdiscord" in tables and "cdiscord" in tables:
        tables = dict(tables)
        tables["discord"] = {**tables["qdiscord"], **tables["cdiscord"]}
    for metric, cols in tables.items():
        cols = dict(cols)
        xname = X_COLUMNS.get(metric, "time")
        if metric == "fidelity":
            a0, a1, na = cfg.alpha_grid
            x = np.linspace(a0, a1, na)
        elif "_x" in cols:
            x = cols.pop("_x")
        else:
            x = t_ns
        header = [xname] + list(cols)
        csv_path = out / f"{metric}.csv"
        write_csv(csv_path, header, [x] + list(cols.values()), provenance_lines(cfg, engine, metric))
        svg_path = out / f"{metric}.svg"
        title = f"{cfg.system}: {metric} ({engine})"
        if cfg.system == "qubits4" and metric != "fidelity":
            title += ", Gaussian approximation"
        plot_csv(csv_path, svg_path, title=title)
        files[metric] = {"csv": csv_path.name, "svg": svg_path.name}
    return files


# --------------------------------------------------------------------------
# entry points


def _engines(cfg: RunConfig) -> list[str]:
    return ["lindblad", "gaussian"] if cfg.engine == "both" else [cfg.engine]


def _with_context(cfg: RunConfig, engine: str, exc: QcorrError) -> QcorrError:
    new = type(exc)(f"[{cfg.system}/{engine}] {exc}")
    new.__cause__ = exc
    return new


def evaluate(cfg: RunConfig, dims=None) -> tuple[dict, dict, dict]:
    """Run every engine and compute the requested metrics in memory."""
    tables_by_engine, diag, peaks = {}, {}, {}
    for engine in _engines(cfg):
        try:
            if engine == "lindblad":
                traj = lindblad_trajectory(cfg, dims)
            else:
                traj = gaussian_trajectory(cfg)
            tables, d, p = compute_metrics(cfg, traj, engine, dims)
        except QcorrError as exc:
            raise _with_context(cfg, engine, exc) from exc
        tables_by_engine[engine] = tables
        diag[engine] = {**traj.stats, **d}
        if p:
            peaks[engine] = p
    return _merge(tables_by_engine), diag, peaks


def _output_dir(cfg: RunConfig, out) -> Path:
    if out is not None:
        return Path(out)
    if cfg.output_dir:
        return Path(cfg.output_dir)
    return Path("runs") / f"{cfg.system}-{cfg.config_hash()[:12]}"


def _finish(cfg: RunConfig, out: Path, tables, diag, peaks, convergence=None) -> RunReport:
    files = write_outputs(cfg, out, tables, cfg.engine)
    report = RunReport(
        config_hash=cfg.config_hash(),
        system=cfg.system,
        engine=cfg.engine,
        version=version_stamp(),
        files=files,
        convergence=convergence,
        diagnostics=diag,
        peaks=peaks,
        out_dir=str(out),
    )
    (out / "report.json").write_text(json.dumps(_jsonable(report.to_dict()), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    missing = report.missing_files()
    if missing:
        raise NumericalError(f"run finished but output files are missing: {missing}")
    return report


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def run(cfg: RunConfig, out=None) -> RunReport:
    """Evolve the configured system and write one CSV and SVG per metric."""
    out = _output_dir(cfg, out)
    tables, diag, peaks = evaluate(cfg)
    return _finish(cfg, out, tables, diag, peaks)


def _max_delta(a: dict, b: dict) -> float:
    worst = 0.0
    for metric, cols in a.items():
        for name, val in cols.items():
            if name == "_x":
                continue
            worst = max(worst, float(np.max(np.abs(np.asarray(val) - np.asarray(b[metric][name])))))
    return worst


def _dim_cap(cfg: RunConfig) -> int:
    return max(QUBIT_LEVELS) if cfg.system == "qubits4" else cfg.max_dim


def converge_truncation(cfg: RunConfig, tol: float = 1e-3, out=None) -> RunReport:
    """Raise every mode dimension by 2 until all metrics change by less than ``tol``.

    Outputs are written from the finer of the last two rungs. Hitting the
    dimension cap raises ConvergenceFailure and writes nothing.
    """
    if cfg.engine != "lindblad":
        raise ConfigError("truncation convergence needs the lindblad engine")
    if not tol > 0:
        raise ConfigError(f"tolerance must be positive, got {tol}")
    cap = _dim_cap(cfg)
    dims = tuple(cfg.dims)
    ladder = [list(dims)]
    deltas: list[float] = []
    prev = evaluate(cfg, dims)
    while True:
        nxt = tuple(d + 2 for d in dims)
        if max(nxt) > cap:
            raise ConvergenceFailure(
                f"[{cfg.system}] truncation not converged below dimension cap {cap}: "
                f"dims tried {ladder}, max metric deltas {[f'{d:.3e}' for d in deltas]} (tol {tol:.1e})"
            )
        cur = evaluate(cfg, nxt)
        delta = _max_delta(prev[0], cur[0])
        deltas.append(delta)
        ladder.append(list(nxt))
        dims, prev = nxt, cur
        if delta < tol:
            break
    record = {"dims_tried": ladder, "max_metric_delta": deltas, "tol": tol, "converged_dims": list(dims)}
    tables, diag, peaks = prev
    return _finish(cfg.replace(dims=dims), _output_dir(cfg, out), tables, diag, peaks, record)


def _set_param(params, name: str, value):
    if name not in params.field_names():
        raise ConfigError(f"sweep parameter {name!r} is not a field of {type(params).__name__}")
    data = params.to_dict()
    data[name] = value
    return type(params).from_dict(data)


def sweep(cfg: RunConfig, out=None) -> list[RunReport]:
    """One run per sweep value, each in its own subdirectory, plus a summary CSV."""
    if not cfg.sweep:
        raise ConfigError("configuration has no 'sweep' section")
    name, values = cfg.sweep["param"], cfg.sweep["values"]
    base = _output_dir(cfg, out)
    reports, rows = [], []
    summary_cols: list[str] | None = None
    for k, value in enumerate(values):
        point = cfg.replace(params=_set_param(cfg.params, name, value), sweep=None)
        rep = run(point, base / f"point_{k:03d}")
        reports.append(rep)
        means = {}
        for metric, entry in rep.files.items():
            if metric in ("fidelity", "spectrum", "discord"):
                continue
            header, data = read_csv(Path(rep.out_dir) / entry["csv"])
            for c, col in enumerate(header[1:], start=1):
                means[f"mean_{col}"] = float(np.mean(data[:, c]))
        if summary_cols is None:
            summary_cols = list(means)
        rows.append([float(value)] + [means[c] for c in summary_cols])
    if summary_cols:
        data = np.array(rows)
        write_csv(base / "sweep.csv", [name] + summary_cols, list(data.T), provenance_lines(cfg, cfg.engine, "sweep"))
    return reports
