"""Lindblad master-equation dynamics and steady states.

Hamiltonians are in angular-frequency units (hbar = 1), usually already
rescaled by a per-system reference frequency so that time is dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    DomainError,
    InvalidStateError,
    NonConvergenceError,
    ShapeError,
    TraceDriftError,
)
from .integrate import dopri5
from .operators import (
    Operator,
    QuantumState,
    check_density_matrix,
    expect_matrix,
)

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10
TRACE_DRIFT_LIMIT = 1e-6
NULLSPACE_MAX_SUPERDIM = 4096
JUMP_SUPEROP_MAX_NNZ = 40_000_000


@dataclass(frozen=True)
class CollapseOperator:
    """Dissipation channel; the rate is already folded into ``op``."""

    op: Operator


@dataclass(frozen=True)
class LindbladModel:
    hamiltonian: Operator
    collapses: tuple[CollapseOperator, ...] = ()

    def __post_init__(self):
        H = self.hamiltonian
        if not H.is_hermitian(1e-10):
            diff = H.data - H.data.conj().T
            raise InvalidStateError(
                f"Hamiltonian is not Hermitian (max deviation {np.max(np.abs(diff.data)):.3e})"
            )
        cols = tuple(c if isinstance(c, CollapseOperator) else CollapseOperator(c) for c in self.collapses)
        for c in cols:
            if c.op.space != H.space:
                raise ShapeError("collapse operator lives on a different space than the Hamiltonian")
        object.__setattr__(self, "collapses", cols)

    @property
    def space(self):
        return self.hamiltonian.space


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    t1: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("a time grid needs at least two points")
        if not self.t1 > self.t0:
            raise ValueError(f"t1 ({self.t1}) must exceed t0 ({self.t0})")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n_points)


def _grid_times(grid) -> np.ndarray:
    if isinstance(grid, TimeGrid):
        return grid.times
    return np.atleast_1d(np.asarray(grid, dtype=float))


@dataclass
class EvolutionResult:
    times: np.ndarray
    states: list[QuantumState] | None
    expect: dict[str, np.ndarray] = field(default_factory=dict)
    error_estimate: float = 0.0
    n_steps: int = 0
    max_trace_drift: float = 0.0
    min_eigenvalue: float = 0.0
    max_hermiticity_error: float = 0.0
    n_validated: int = 0


def thermal_collapse_pair(a: Operator, kappa: float, nbar: float) -> list[CollapseOperator]:
    """Loss into a thermal bath, normalized so that <a> decays at rate ``kappa``."""
    if kappa <= 0:
        raise DomainError(f"damping rate must be positive, got {kappa}")
    if nbar < 0:
        raise DomainError(f"bath occupation must be >= 0, got {nbar}")
    ops = [CollapseOperator(a * math.sqrt(2 * kappa * (1 + nbar)))]
    if nbar > 0:
        ops.append(CollapseOperator(a.dag() * math.sqrt(2 * kappa * nbar)))
    return ops


class _Generator:
    """Pre-assembled sparse pieces of the Lindblad generator.

    Uses H_eff = H - (i/2) sum C^dag C, so that
    drho/dt = -i (H_eff rho - rho H_eff^dag) + sum C rho C^dag.
    The coherent part is formed from ``X = H_eff @ rho`` and its adjoint. The
    jump terms are applied as one sparse superoperator sum C kron conj(C) on
    row-major vec(rho) when its size stays below ``JUMP_SUPEROP_MAX_NNZ``
    (ladder operators give about one nonzero per row each), and operator by
    operator otherwise. The result is projected onto Hermitian matrices so
    that rounding-level anti-Hermitian parts of rho cannot be amplified by
    the jump term.
    """

    def __init__(self, model: LindbladModel):
        H = model.hamiltonian.data
        heff = H.astype(complex)
        self.cs = []
        for c in model.collapses:
            C = c.op.data
            heff = heff - 0.5j * (C.conj().T @ C)
            self.cs.append(C.tocsr())
        self.heff = heff.tocsr()
        self.n = model.space.total_dim
        self.jump = None
        nnz = sum(C.nnz**2 for C in self.cs)
        if self.cs and nnz <= JUMP_SUPEROP_MAX_NNZ:
            J = sp.kron(self.cs[0], self.cs[0].conj(), format="csr")
            for C in self.cs[1:]:
                J = J + sp.kron(C, C.conj(), format="csr")
            self.jump = sp.csr_array(J)

    def __call__(self, t, rho):
        X = self.heff @ rho
        out = -1j * X
        out += out.conj().T
        if self.jump is not None:
            out += (self.jump @ rho.reshape(-1)).reshape(self.n, self.n)
        else:
            for C in self.cs:
                Y = C @ rho
                out += C @ Y.conj().T
        out += out.conj().T
        out *= 0.5
        return out


def liouvillian_apply(model: LindbladModel, rho) -> np.ndarray:
    """drho/dt for the density matrix ``rho`` (array or QuantumState)."""
    mat = rho.matrix if isinstance(rho, QuantumState) else np.asarray(rho, dtype=complex)
    if mat.shape != (model.space.total_dim,) * 2:
        raise ShapeError(f"state shape {mat.shape} does not match model dimension {model.space.total_dim}")
    H = model.hamiltonian.data
    out = -1j * (H @ mat - (H.T @ mat.T).T)
    for c in model.collapses:
        C = c.op.data
        CdC = C.conj().T @ C
        # rho C^dag = (C rho^dag)^dag, valid for any rho
        out += C @ (C @ mat.conj().T).conj().T
        out -= 0.5 * (CdC @ mat + (CdC.T @ mat.T).T)
    return out


def _observer(model, e_ops, store_states, validate, stats):
    ops = dict(e_ops or {})

    def observe(t, rho):
        drift = abs(np.trace(rho) - 1.0)
        stats["drift"] = max(stats["drift"], drift)
        if drift > TRACE_DRIFT_LIMIT:
            raise TraceDriftError(f"trace drifted by {drift:.3e} at t={t:.6g}")
        if validate:
            _, herm_err, min_eig = check_density_matrix(rho)
            stats["min_eig"] = min(stats["min_eig"], min_eig)
            stats["herm"] = max(stats["herm"], herm_err)
            stats["checked"] += 1
        values = {}
        for label, op in ops.items():
            values[label] = expect_matrix(rho, op) if isinstance(op, Operator) else op(rho)
        state = QuantumState(model.space, rho, validate=False) if store_states else None
        return values, state

    return observe


def evolve(
    model: LindbladModel,
    rho0: QuantumState,
    grid,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    e_ops: Mapping[str, Operator | Callable[[np.ndarray], object]] | None = None,
    store_states: bool = False,
    validate: bool = True,
) -> EvolutionResult:
    """Integrate the master equation from ``rho0`` over ``grid``.

    ``e_ops`` maps labels to operators (expectation values) or to callables
    receiving the raw density matrix. Every sampled state is checked against
    the QuantumState invariants unless ``validate`` is False; trace drift
    beyond 1e-6 is always an error and is never renormalized away.
    """
    if rho0.space != model.space:
        raise ShapeError(f"initial state on {rho0.space.dims}, model on {model.space.dims}")
    times = _grid_times(grid)
    gen = _Generator(model)
    stats = {"drift": 0.0, "min_eig": 0.0, "herm": 0.0, "checked": 0}
    observe = _observer(model, e_ops, store_states, validate, stats)
    sol = dopri5(gen, np.array(rho0.matrix), times, rtol=rtol, atol=atol, observe=observe)
    expect = {}
    for label in (e_ops or {}):
        expect[label] = np.array([v[0][label] for v in sol.values])
    states = [v[1] for v in sol.values] if store_states else None
    return EvolutionResult(
        times=times,
        states=states,
        expect=expect,
        error_estimate=sol.error_estimate,
        n_steps=sol.n_steps,
        max_trace_drift=stats["drift"],
        min_eigenvalue=stats["min_eig"],
        max_hermiticity_error=stats["herm"],
        n_validated=stats["checked"],
    )


def liouvillian_superoperator(model: LindbladModel) -> sp.csr_array:
    """Sparse superoperator acting on row-major vec(rho).

    Row-major vectorization gives vec(A rho B) = (A kron B^T) vec(rho).
    """
    n = model.space.total_dim
    I = sp.identity(n, dtype=complex, format="csr")
    H = model.hamiltonian.data
    L = -1j * (sp.kron(H, I) - sp.kron(I, H.T))
    for c in model.collapses:
        C = c.op.data
        CdC = C.conj().T @ C
        L = L + sp.kron(C, C.conj()) - 0.5 * sp.kron(CdC, I) - 0.5 * sp.kron(I, CdC.T)
    return sp.csr_array(L)


def steady_state_nullspace(model: LindbladModel) -> QuantumState:
    """Solve L vec(rho) = 0 with the trace condition replacing one redundant row."""
    n = model.space.total_dim
    L = liouvillian_superoperator(model).tolil()
    trace_row = np.zeros(n * n, dtype=complex)
    trace_row[np.arange(n) * (n + 1)] = 1.0
    L[0, :] = trace_row
    rhs = np.zeros(n * n, dtype=complex)
    rhs[0] = 1.0
    vec = spla.spsolve(sp.csc_array(L), rhs)
    if not np.all(np.isfinite(vec)):
        raise NonConvergenceError("steady state is not unique (singular Liouvillian)")
    rho = vec.reshape(n, n)
    rho = 0.5 * (rho + rho.conj().T)
    return QuantumState(model.space, rho / np.trace(rho).real)


def steady_state_integrate(
    model: LindbladModel,
    tol: float = 1e-10,
    rho0: QuantumState | None = None,
    max_time: float = 1e5,
    rtol: float = 1e-12,
    atol: float | None = None,
    patience: int = 4,
) -> QuantumState:
    """Integrate until max |L(rho)| < tol, doubling the horizon each round.

    The integrator's absolute tolerance defaults to tol * 1e-4, since a state
    error e leaves a residual of roughly |L| e. Stops with NonConvergenceError
    once the residual has not improved for ``patience`` rounds.
    """
    atol = max(tol * 1e-4, 1e-16) if atol is None else atol
    gen = _Generator(model)
    n = model.space.total_dim
    if rho0 is None:
        rho = np.zeros((n, n), dtype=complex)
        rho[0, 0] = 1.0
    else:
        rho = np.array(rho0.matrix)
    t, span = 0.0, 1.0
    best, stale = math.inf, 0
    while t < max_time:
        residual = float(np.max(np.abs(gen(t, rho))))
        if residual < tol:
            rho = 0.5 * (rho + rho.conj().T)
            return QuantumState(model.space, rho)
        if residual < 0.5 * best:
            best, stale = residual, 0
        else:
            stale += 1
            if stale >= patience:
                raise NonConvergenceError(
                    f"steady-state residual stalled at {residual:.3e} (tol {tol:.1e}) by model time {t:g}"
                )
        sol = dopri5(gen, rho, [t, t + span], rtol=rtol, atol=atol)
        rho = sol.values[-1]
        drift = abs(np.trace(rho) - 1)
        if drift > TRACE_DRIFT_LIMIT:
            raise TraceDriftError(f"trace drifted by {drift:.3e} while relaxing to steady state")
        t += span
        span *= 2
    raise NonConvergenceError(
        f"no steady state within model time {max_time:g}; last residual {residual:.3e} > tol {tol:.1e}"
    )


def steady_state(model: LindbladModel, tol: float = 1e-10, method: str = "auto") -> QuantumState:
    """Steady state of a dissipative model.

    ``method`` is ``"nullspace"``, ``"integrate"`` or ``"auto"`` (null space
    when total_dim^2 <= 4096, integration otherwise).
    """
    if not model.collapses:
        raise DomainError("steady_state needs at least one collapse operator")
    n = model.space.total_dim
    if method == "auto":
        method = "nullspace" if n * n <= NULLSPACE_MAX_SUPERDIM else "integrate"
    if method == "nullspace":
        return steady_state_nullspace(model)
    if method == "integrate":
        return steady_state_integrate(model, tol=tol)
    raise ValueError(f"unknown steady-state method {method!r}")


def ground_state(model: LindbladModel) -> QuantumState:
    """Lowest eigenvector of the Hamiltonian as a density matrix."""
    vals, vecs = np.linalg.eigh(model.hamiltonian.matrix)
    return QuantumState.from_ket(model.space, vecs[:, 0])


def expectations(states: Sequence[QuantumState], op: Operator) -> np.ndarray:
    return np.array([expect_matrix(s.matrix, op) for s in states])
