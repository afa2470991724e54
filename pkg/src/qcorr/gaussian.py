"""Linearized Langevin dynamics: first moments and covariance matrices.

Quadrature vectors are ordered (X1, Y1, X2, Y2, ...) with vacuum variance 1/2.
For a mode damped at amplitude rate kappa into a bath with occupation nbar the
drift carries -kappa on both quadratures and the diffusion 2 kappa (nbar + 1/2),
the same convention as :func:`qcorr.lindblad.thermal_collapse_pair`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError, ShapeError, StabilityError
from .integrate import dopri5
from .lindblad import DEFAULT_ATOL, DEFAULT_RTOL, _grid_times

UNCERTAINTY_TOL = 1e-9


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class DriftModel:
    """dr/dt = A r + b, dsigma/dt = A sigma + sigma A^T + D."""

    A: np.ndarray
    D: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        D = np.array(self.D, dtype=float)
        b = np.array(self.b, dtype=float).reshape(-1)
        m = A.shape[0]
        if A.shape != (m, m) or m % 2:
            raise ShapeError(f"drift matrix must be 2n x 2n, got {A.shape}")
        if D.shape != (m, m) or b.shape != (m,):
            raise ShapeError("diffusion matrix and drive vector must match the drift matrix")
        if np.max(np.abs(D - D.T)) > 1e-12:
            raise InvalidStateError("diffusion matrix is not symmetric")
        if np.linalg.eigvalsh(D)[0] < -1e-12:
            raise InvalidStateError("diffusion matrix is not positive semidefinite")
        for name, val in (("A", A), ("D", D), ("b", b)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def n_modes(self) -> int:
        return self.A.shape[0] // 2


def uncertainty_min_eigenvalue(sigma: np.ndarray) -> float:
    """Smallest eigenvalue of sigma + (i/2) Omega."""
    n = sigma.shape[0] // 2
    return float(np.linalg.eigvalsh(sigma + 0.5j * symplectic_form(n))[0])


def check_cm(sigma: np.ndarray, tol: float = UNCERTAINTY_TOL) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    m = sigma.shape[0]
    if sigma.shape != (m, m) or m % 2:
        raise ShapeError(f"covariance matrix must be 2n x 2n, got {sigma.shape}")
    if np.max(np.abs(sigma - sigma.T)) > 1e-10:
        raise InvalidStateError("covariance matrix is not symmetric")
    lam = uncertainty_min_eigenvalue(sigma)
    if lam < -tol:
        raise InvalidStateError(f"covariance matrix violates the uncertainty relation (min eigenvalue {lam:.3e})")
    return sigma


def evolve_moments(model: DriftModel, r0, grid, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> np.ndarray:
    """Mean-vector trajectory, shape (n_times, 2n)."""
    r0 = np.asarray(r0, dtype=float).reshape(-1)
    if r0.shape != model.b.shape:
        raise ShapeError(f"initial mean has length {r0.size}, model expects {model.b.size}")
    A, b = model.A, model.b
    sol = dopri5(lambda t, r: A @ r + b, r0, _grid_times(grid), rtol=rtol, atol=atol)
    return np.array(sol.values)


def evolve_cm(model: DriftModel, sigma0, grid, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> np.ndarray:
    """Covariance-matrix trajectory, shape (n_times, 2n, 2n).

    Every accepted step is re-symmetrized; every sample must satisfy the
    uncertainty relation.
    """
    sigma0 = check_cm(sigma0)
    if sigma0.shape != model.A.shape:
        raise ShapeError(f"initial CM has shape {sigma0.shape}, model expects {model.A.shape}")
    A, D = model.A, model.D

    def rhs(t, s):
        As = A @ s
        return As + As.T + D

    def observe(t, s):
        return check_cm(s, tol=UNCERTAINTY_TOL).copy()

    sol = dopri5(rhs, sigma0, _grid_times(grid), rtol=rtol, atol=atol,
                 observe=observe, project=lambda s: 0.5 * (s + s.T))
    return np.array(sol.values)


def assert_hurwitz(A: np.ndarray) -> np.ndarray:
    eig = np.linalg.eigvals(A)
    worst = eig[np.argmax(eig.real)]
    if worst.real >= 0:
        raise StabilityError(f"drift matrix is not Hurwitz: eigenvalue {worst:.6g} has non-negative real part")
    return eig


def steady_cm(model: DriftModel) -> np.ndarray:
    """Solve A sigma + sigma A^T + D = 0 through (A kron I + I kron A) vec(sigma) = -vec(D)."""
    A, D = model.A, model.D
    assert_hurwitz(A)
    m = A.shape[0]
    I = np.eye(m)
    vec = np.linalg.solve(np.kron(A, I) + np.kron(I, A), -D.reshape(-1))
    sigma = vec.reshape(m, m)
    return 0.5 * (sigma + sigma.T)


def steady_moments(model: DriftModel) -> np.ndarray:
    assert_hurwitz(model.A)
    return -np.linalg.solve(model.A, model.b)


def lyapunov_residual(model: DriftModel, sigma: np.ndarray) -> float:
    return float(np.max(np.abs(model.A @ sigma + sigma @ model.A.T + model.D)))


def symplectic_spectrum(sigma: np.ndarray) -> np.ndarray:
    """All symplectic eigenvalues of a 2n x 2n CM, ascending."""
    n = sigma.shape[0] // 2
    # i Omega sigma is similar to the Hermitian L^T (i Omega) L with sigma = L L^T, whose
    # eigenvalues +-nu stay accurate to rounding even when the nu are degenerate
    sym = 0.5 * (sigma + sigma.T)
    try:
        L = np.linalg.cholesky(sym)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(sym)
        L = v * np.sqrt(np.maximum(w, 0.0))
    ev = np.linalg.eigvalsh(L.T @ (1j * symplectic_form(n)) @ L)
    return ev[n:]


def quadratic_drift(M, h=None, damping=None, nbar=None) -> DriftModel:
    """Drift model of H = r^T M r / 2 + h^T r with per-mode thermal loss.

    Heisenberg evolution with [r_k, r_l] = i Omega_kl gives dr/dt = Omega M r + Omega h.
    """
    M = np.asarray(M, dtype=float)
    m = M.shape[0]
    n = m // 2
    h = np.zeros(m) if h is None else np.asarray(h, dtype=float)
    damping = np.zeros(n) if damping is None else np.asarray(damping, dtype=float)
    nbar = np.zeros(n) if nbar is None else np.asarray(nbar, dtype=float)
    Om = symplectic_form(n)
    A = Om @ (0.5 * (M + M.T)) - np.diag(np.repeat(damping, 2))
    D = np.diag(np.repeat(2 * damping * (nbar + 0.5), 2))
    return DriftModel(A, D, Om @ h)
