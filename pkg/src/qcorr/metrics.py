"""Correlation metrics on quadrature covariance matrices.

Gaussian quantum discord, its classical counterpart, SNR, coherent-state
fidelity and a small peak-finding spectrum helper. Covariance matrices use the
vacuum-variance-1/2 convention, for which the entropy function

    h(x) = (x + 1/2) log2(x + 1/2) - (x - 1/2) log2(x - 1/2)

vanishes on the vacuum. The measurement-optimized conditional term comes from
the closed form for Gaussian discord, which is written for vacuum variance 1;
the CM is doubled on the way in and the result halved on the way out.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.signal import detrend as _detrend, find_peaks

from .errors import DomainError, InvalidStateError, ShapeError, TruncationError
from .gaussian import UNCERTAINTY_TOL, symplectic_spectrum, uncertainty_min_eigenvalue
from .operators import ModeSpace, QuantumState, coherent_ket, partial_trace, quadratures

H_DOMAIN_TOL = 1e-9
TOP_LEVEL_POPULATION_LIMIT = 1e-3


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TwoModeCM:
    """4x4 covariance matrix in (X1, Y1, X2, Y2) order."""

    sigma: np.ndarray

    def __post_init__(self):
        s = np.array(self.sigma, dtype=float)
        if s.shape != (4, 4):
            raise ShapeError(f"two-mode CM must be 4x4, got {s.shape}")
        if np.max(np.abs(s - s.T)) > 1e-10:
            raise InvalidStateError("covariance matrix is not symmetric")
        s = 0.5 * (s + s.T)
        lam = uncertainty_min_eigenvalue(s)
        if lam < -UNCERTAINTY_TOL:
            raise InvalidStateError(f"covariance matrix violates the uncertainty relation (min eigenvalue {lam:.3e})")
        s.setflags(write=False)
        object.__setattr__(self, "sigma", s)

    @property
    def block_a(self) -> np.ndarray:
        return self.sigma[:2, :2]

    @property
    def block_b(self) -> np.ndarray:
        return self.sigma[2:, 2:]

    @property
    def block_c(self) -> np.ndarray:
        return self.sigma[:2, 2:]

    @property
    def a(self) -> float:
        return math.sqrt(max(np.linalg.det(self.block_a), 0.0))

    @property
    def b(self) -> float:
        return math.sqrt(max(np.linalg.det(self.block_b), 0.0))

    @property
    def c(self) -> float:
        """det of the off-diagonal block (phase-sensitive cross correlation invariant)."""
        return float(np.linalg.det(self.block_c))


@dataclass(frozen=True)
class DiscordResult:
    quantum: float
    classical: float
    nu_minus: float
    nu_plus: float
    conditional_term: float
    mutual_information: float


@dataclass
class MetricSeries:
    times: np.ndarray
    values: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        for k, v in self.values.items():
            v = np.asarray(v)
            if v.shape[0] != self.times.shape[0]:
                raise ShapeError(f"series {k!r} has {v.shape[0]} points, expected {self.times.shape[0]}")
            self.values[k] = v


# --------------------------------------------------------------------------
# moments of truncated states


@lru_cache(maxsize=32)
def _quadrature_ops(dims: tuple[int, ...]):
    space = ModeSpace(dims)
    ops = []
    for m in range(len(dims)):
        ops.extend(o.data for o in quadratures(space, m))
    return ops


def _top_population(rho: QuantumState, mode: int) -> float:
    red = partial_trace(rho, [mode]).matrix
    d = red.shape[0]
    return float(np.real(red[d - 2, d - 2] + red[d - 1, d - 1])) if d > 2 else float(np.real(red[-1, -1]))


def moments_from_state(
    state: QuantumState,
    modes,
    strict: bool = False,
    check_truncation: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Mean quadrature vector and covariance matrix for the listed modes.

    sigma_kl = <{R_k, R_l}>/2 - <R_k><R_l>. When more than 1e-3 of a mode's
    population sits in its top two Fock levels a TruncationWarning is issued,
    or a TruncationError raised in strict mode.
    """
    modes = [int(m) for m in np.atleast_1d(modes)]
    if len(set(modes)) != len(modes):
        raise ShapeError("modes must be distinct")
    if check_truncation:
        for m in modes:
            pop = _top_population(state, m)
            if pop > TOP_LEVEL_POPULATION_LIMIT:
                msg = f"mode {m}: population {pop:.3e} in the top two Fock levels"
                if strict:
                    raise TruncationError(msg)
                warnings.warn(msg, TruncationWarning, stacklevel=2)
    red = state if modes == list(range(state.space.n_modes)) else partial_trace(state, modes)
    rho = red.matrix
    ops = _quadrature_ops(red.space.dims)
    rhoT = rho.T
    means = np.array([np.real(np.sum(R.multiply(rhoT).data)) if R.nnz else 0.0 for R in ops])
    k = len(ops)
    sigma = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            prod = ops[i] @ ops[j]
            val = np.real(np.sum(prod.multiply(rhoT)))
            sigma[i, j] = sigma[j, i] = val
    # <{Ri,Rj}>/2 = Re <Ri Rj> for Hermitian Ri, Rj
    sigma -= np.outer(means, means)
    return means, sigma


def quadrature_cm_from_state(
    state: QuantumState,
    i: int,
    j: int,
    strict: bool = False,
    gaussian_approximation: bool = False,
) -> TwoModeCM:
    """Two-mode CM of modes ``i`` and ``j``.

    Modes need at least 8 levels for the second moments to mean much; with
    ``gaussian_approximation`` (used for truncated qubit levels) smaller
    truncations are accepted, the truncation check is skipped and the
    commutator deficit of the truncated ladder is absorbed by
    :func:`physical_cm`.
    """
    if i == j:
        raise ShapeError("mode indices must be distinct")
    dims = state.space.dims
    if not gaussian_approximation and min(dims[i], dims[j]) < 8:
        raise ShapeError(f"modes {i}, {j} need dims >= 8 for meaningful moments, got {dims[i]}, {dims[j]}")
    _, sigma = moments_from_state(state, [i, j], strict=strict, check_truncation=not gaussian_approximation)
    if gaussian_approximation:
        sigma, _ = physical_cm(sigma)
    return TwoModeCM(sigma)


def physical_cm(sigma: np.ndarray) -> tuple[np.ndarray, float]:
    """Add the smallest isotropic noise delta*I restoring sigma + (i/2) Omega >= 0.

    Adding delta*I shifts every eigenvalue of the Hermitian matrix
    sigma + (i/2) Omega by exactly delta, so delta = max(0, -lambda_min).
    """
    sigma = 0.5 * (np.asarray(sigma, dtype=float) + np.asarray(sigma, dtype=float).T)
    delta = max(0.0, -uncertainty_min_eigenvalue(sigma))
    return sigma + delta * np.eye(sigma.shape[0]), delta


# --------------------------------------------------------------------------
# symplectic analysis and discord


def symplectic_eigenvalues(cm: TwoModeCM | np.ndarray) -> tuple[float, float]:
    sigma = cm.sigma if isinstance(cm, TwoModeCM) else np.asarray(cm, dtype=float)
    ev = symplectic_spectrum(sigma)
    return float(ev[0]), float(ev[1])


def h_function(x):
    """Entropy of a single-mode Gaussian with symplectic eigenvalue x (bits)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.5 - H_DOMAIN_TOL):
        raise DomainError(f"h(x) needs x >= 1/2, got {np.min(x)!r}")
    x = np.maximum(x, 0.5)
    # log(x + 1/2) + (x - 1/2) log((x + 1/2)/(x - 1/2)) avoids cancellation at large x
    d = x - 0.5
    # distances from 1/2 below rounding resolution are treated as 1/2; the slope of h is unbounded there
    d = np.where(d <= 8 * np.finfo(float).eps * x, 0.0, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(d > 0, 2.0 * d * np.arctanh(0.5 / x), 0.0)
    val = (np.log(x + 0.5) + tail) / math.log(2)
    return float(val) if val.ndim == 0 else val


def _invariants(sigma_half: np.ndarray):
    s = 2.0 * sigma_half
    A = np.linalg.det(s[:2, :2])
    B = np.linalg.det(s[2:, 2:])
    C = np.linalg.det(s[:2, 2:])
    D = np.linalg.det(s)
    return A, B, C, D


def _inv_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v / np.sqrt(w)) @ v.T


def _standard_form(s: np.ndarray) -> tuple[float, float, float, float]:
    """(a, b, c_+^2, c_-^2) of the local-symplectic standard form of ``s`` (shot-noise units)."""
    a = math.sqrt(max(np.linalg.det(s[:2, :2]), 0.0))
    b = math.sqrt(max(np.linalg.det(s[2:, 2:]), 0.0))
    # local symplectics sqrt(a) sA^{-1/2} and sqrt(b) sB^{-1/2} bring both blocks to multiples of I
    core = _inv_sqrt(s[:2, :2]) @ s[:2, 2:] @ _inv_sqrt(s[2:, 2:])
    sv = np.linalg.svd(core, compute_uv=False) * math.sqrt(a * b)
    return a, b, float(sv[0] ** 2), float(sv[1] ** 2)


def conditional_term(cm: TwoModeCM | np.ndarray) -> float:
    """Minimal conditional symplectic eigenvalue of mode 1 after a Gaussian
    measurement on mode 2 (vacuum-variance-1/2 units).

    In the general-dyne branch C^2 + (B - 1)(D - A) is evaluated as the
    product (a(b^2 - 1) - b c_+^2)(a(b^2 - 1) - b c_-^2) of standard-form
    parameters. Both factors vanish on pure states, so the square root stays
    accurate to rounding instead of sqrt(eps).
    """
    sigma = cm.sigma if isinstance(cm, TwoModeCM) else np.asarray(cm, dtype=float)
    A, B, C, D = _invariants(sigma)
    if abs(C) < 1e-14 or B - 1.0 < 1e-12:
        # uncorrelated (or pure) second mode: measuring it tells nothing about mode 1
        e_min = A
    elif (D - A * B) ** 2 <= (1 + B) * C**2 * (A + D):
        a, b, cp2, cm2 = _standard_form(2.0 * sigma)
        k = a * (b * b - 1.0)
        X = max((k - b * cp2) * (k - b * cm2), 0.0)
        e_min = ((math.sqrt(cp2 * cm2) + math.sqrt(X)) / (b * b - 1.0)) ** 2
    else:
        disc = C**4 + (D - A * B) ** 2 - 2 * C**2 * (A * B + D)
        e_min = (A * B - C**2 + D - math.sqrt(max(disc, 0.0))) / (2 * B)
    return 0.5 * math.sqrt(max(e_min, 1.0))


def discord(cm: TwoModeCM) -> DiscordResult:
    """Gaussian quantum and classical discord with the measurement on mode 2.

    quantum   = h(b) - h(nu_-) - h(nu_+) + h(tau + eta)
    classical = h(a) - h(tau + eta)

    so that quantum + classical equals the mutual information.
    """
    if not isinstance(cm, TwoModeCM):
        cm = TwoModeCM(cm)
    nu_m, nu_p = symplectic_eigenvalues(cm)
    if nu_m < 0.5 - H_DOMAIN_TOL:
        raise InvalidStateError(f"symplectic eigenvalue {nu_m:.12g} below 1/2: unphysical CM")
    cond = conditional_term(cm)
    ha, hb = h_function(cm.a), h_function(cm.b)
    joint = h_function(nu_m) + h_function(nu_p)
    hc = h_function(cond)
    return DiscordResult(
        quantum=hb - joint + hc,
        classical=ha - hc,
        nu_minus=nu_m,
        nu_plus=nu_p,
        conditional_term=cond,
        mutual_information=ha + hb - joint,
    )


def quantum_discord(cm: TwoModeCM) -> DiscordResult:
    return discord(cm)


def classical_discord(cm: TwoModeCM) -> float:
    return discord(cm).classical


# --------------------------------------------------------------------------
# signal-to-noise ratio


def snr(means, cms, i: int = 0, j: int = 1, times=None) -> MetricSeries:
    """Per-mode and pair SNR series.

    SNR_k  = (<X_k>^2 + <Y_k>^2) / (Var X_k + Var Y_k)
    SNR_ij = same ratio for X_+ = (X_i + X_j)/sqrt(2), Y_+ = (Y_i + Y_j)/sqrt(2)

    ``means`` has shape (T, 2n) and ``cms`` (T, 2n, 2n); i, j are mode indices.
    """
    means = np.atleast_2d(np.asarray(means, dtype=float))
    cms = np.asarray(cms, dtype=float)
    if cms.ndim == 2:
        cms = cms[None]
    if means.shape[0] != cms.shape[0]:
        raise ShapeError("means and covariance series are not aligned")
    xi, yi, xj, yj = 2 * i, 2 * i + 1, 2 * j, 2 * j + 1

    def single(x, y):
        sig = means[:, x] ** 2 + means[:, y] ** 2
        noise = cms[:, x, x] + cms[:, y, y]
        return sig / noise

    mx = (means[:, xi] + means[:, xj]) / math.sqrt(2)
    my = (means[:, yi] + means[:, yj]) / math.sqrt(2)
    vx = 0.5 * (cms[:, xi, xi] + cms[:, xj, xj] + 2 * cms[:, xi, xj])
    vy = 0.5 * (cms[:, yi, yi] + cms[:, yj, yj] + 2 * cms[:, yi, yj])
    t = np.arange(means.shape[0], dtype=float) if times is None else times
    return MetricSeries(t, {"snr_i": single(xi, yi), "snr_j": single(xj, yj), "snr_pair": (mx**2 + my**2) / (vx + vy)})


# --------------------------------------------------------------------------
# fidelity


def fidelity_coherent(state: QuantumState, alpha: complex) -> float:
    """<alpha| rho |alpha> for a single-mode state; needs |alpha|^2 <= dim/4."""
    if state.space.n_modes != 1:
        raise ShapeError("fidelity_coherent expects a single-mode state")
    ket = coherent_ket(alpha, state.space.dims[0])
    return float(np.real(ket.conj() @ state.matrix @ ket))


def pad_state(state: QuantumState, dim: int) -> QuantumState:
    """Embed a single-mode state into a larger truncation (exact: no support is added)."""
    d = state.space.dims[0]
    if dim <= d:
        return state
    mat = np.zeros((dim, dim), dtype=complex)
    mat[:d, :d] = state.matrix
    return QuantumState(ModeSpace((dim,)), mat)


# --------------------------------------------------------------------------
# spectrum


@dataclass(frozen=True)
class Peak:
    frequency: float
    magnitude: float


def spectrum(
    series,
    dt: float | None = None,
    times=None,
    prominence: float = 0.05,
    window: str = "hann",
    detrend: str = "linear",
):
    """Magnitude spectrum of a uniformly sampled real series and its peaks.

    Returns ``(freqs, magnitude, peaks)``; frequencies are in cycles per time
    unit, ``prominence`` is relative to the largest magnitude. A linear trend
    (or only the mean, with ``detrend="constant"``) is removed and a Hann
    window applied before the FFT.
    """
    y = np.asarray(series, dtype=float)
    if y.size < 64:
        raise DomainError(f"spectrum needs at least 64 samples, got {y.size}")
    if times is not None:
        steps = np.diff(np.asarray(times, dtype=float))
        if np.max(np.abs(steps - steps.mean())) > 1e-9 * max(abs(steps.mean()), 1.0):
            raise DomainError("non-uniform sampling: resample onto a uniform grid first")
        dt = float(steps.mean())
    if dt is None or dt <= 0:
        raise DomainError("a positive sample spacing is required")
    y = _detrend(y, type=detrend)
    w = np.hanning(y.size) if window == "hann" else np.ones(y.size)
    mag = np.abs(np.fft.rfft(y * w)) * 2 / w.sum()
    freqs = np.fft.rfftfreq(y.size, dt)
    top = mag.max()
    if top == 0:
        return freqs, mag, []
    idx, _ = find_peaks(mag, prominence=prominence * top)
    peaks = [Peak(float(freqs[k]), float(mag[k])) for k in idx if k > 0]
    return freqs, mag, peaks
