"""Three-mode converters: optical cavity, a middle oscillator, microwave cavity.

Both converters share one structure, in units of a reference frequency
(omega_m for the electro-opto-mechanical device, omega_eg for the
optoelectronic one) and in the frame rotating at the two drive frequencies:

    H = dc a^dag a + dw c^dag c + w b^dag b + G1 (a + a^dag) P
        - g2 q c^dag c + i Ec (a^dag - a) + i Ew (c^dag - c)

with q = (b + b^dag)/sqrt(2), P = (b - b^dag)/(i sqrt(2)). Mode order is
(optical, middle, microwave); quadrature order (Xa, Ya, q, P, Xc, Yc).
Every mode is damped symmetrically into its own thermal bath.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT, epsilon_0, hbar

from ..errors import ConfigError, LinearizationError, ShapeError
from ..gaussian import DriftModel
from ..lindblad import LindbladModel, thermal_collapse_pair
from ..operators import ModeSpace, destroy, zero
from .params import TWO_PI, EomcParams, OpdParams
from .thermal import thermal_occupation

SQRT2 = math.sqrt(2.0)
NEWTON_TOL = 1e-12


@dataclass(frozen=True)
class ConverterRates:
    """Dimensionless rates (divided by ``omega_ref``); damping rates are amplitude rates."""

    omega_ref: float
    delta_c: float
    delta_w: float
    omega_r: float
    kappa_c: float
    kappa_w: float
    gamma_r: float
    G1: float
    g2: float
    E_c: float
    E_w: float
    nbar: tuple[float, float, float]

    def replace(self, **changes) -> "ConverterRates":
        data = dict(self.__dict__)
        data.update(changes)
        return ConverterRates(**data)


def drive_amplitude(kappa: float, power: float, omega: float) -> float:
    """Input-output drive rate sqrt(2 kappa P / (hbar omega)) in rad/s."""
    return math.sqrt(2 * kappa * power / (hbar * omega))


def optical_frequency(wavelength: float) -> float:
    return TWO_PI * C_LIGHT / wavelength


def eomc_derived(params: EomcParams) -> dict[str, float]:
    """Coupling and drive rates (rad/s; G2 dimensionless).

    G1 = sqrt(alpha_c^2 w_m / (2 eps0 m w_c)), G2 = C_p C_t sqrt(hbar / (m w_m)),
    g2 = delta_mc * G2 is the radiation-pressure rate of the MR-MC term.
    """
    w_c = optical_frequency(params.wavelength)
    w_m = params.omega_m
    G1 = math.sqrt(params.alpha_c**2 * w_m / (2 * epsilon_0 * params.mass * w_c))
    G2 = params.C_p * params.C_t * math.sqrt(hbar / (params.mass * w_m))
    return {
        "G1": G1,
        "G2": G2,
        "g2": params.detuning_mc * G2,
        "E_c": params.drive_attenuation_c * drive_amplitude(params.kappa_c, params.P_c, w_c),
        "E_w": params.drive_attenuation_w * drive_amplitude(params.kappa_w, params.P_w, TWO_PI * params.f_w),
    }


def opd_derived(params: OpdParams) -> dict[str, float]:
    """g_wp = (mu_c w_w / 2d) sqrt(hbar / (w_eg m_eff)); g_op is a direct input."""
    w_c = optical_frequency(params.wavelength)
    w_w = TWO_PI * params.f_w
    g_wp = params.mu_c * w_w / (2 * params.d) * math.sqrt(hbar / (params.omega_eg * params.m_eff))
    return {
        "g_op": params.g_op,
        "g_wp": g_wp,
        "E_c": params.drive_attenuation_c * drive_amplitude(params.kappa_c, params.P_c, w_c),
        "E_w": params.drive_attenuation_w * drive_amplitude(params.kappa_w, params.P_w, w_w),
    }


def eomc_rates(params: EomcParams) -> ConverterRates:
    d = eomc_derived(params)
    w = params.omega_m
    T = params.T_em
    return ConverterRates(
        omega_ref=w,
        delta_c=params.detuning_oc / w,
        delta_w=params.detuning_mc / w,
        omega_r=1.0,
        kappa_c=params.kappa_c / w,
        kappa_w=params.kappa_w / w,
        gamma_r=0.5 * params.gamma_m / w,
        G1=d["G1"] / w,
        g2=d["g2"] / w,
        E_c=d["E_c"] / w,
        E_w=d["E_w"] / w,
        nbar=(
            thermal_occupation(optical_frequency(params.wavelength), T),
            thermal_occupation(w, T),
            thermal_occupation(TWO_PI * params.f_w, T),
        ),
    )


def opd_rates(params: OpdParams) -> ConverterRates:
    d = opd_derived(params)
    w = params.omega_eg
    T = params.T_em
    return ConverterRates(
        omega_ref=w,
        delta_c=params.detuning_oc / w,
        delta_w=params.detuning_mc / w,
        omega_r=1.0,
        kappa_c=params.kappa_c / w,
        kappa_w=params.kappa_w / w,
        gamma_r=0.5 * params.gamma_p / w,
        G1=d["g_op"] / w,
        g2=d["g_wp"] / w,
        E_c=d["E_c"] / w,
        E_w=d["E_w"] / w,
        nbar=(
            thermal_occupation(optical_frequency(params.wavelength), T),
            thermal_occupation(w, T),
            thermal_occupation(TWO_PI * params.f_w, T),
        ),
    )


# --------------------------------------------------------------------------
# classical (mean-field) equations and linearization


def mean_field_rhs(rates: ConverterRates, r: np.ndarray) -> np.ndarray:
    """Noise-free quadrature equations of motion."""
    Xa, Ya, q, P, Xc, Yc = r
    R = rates
    dw = R.delta_w - R.g2 * q
    return np.array([
        R.delta_c * Ya - R.kappa_c * Xa + SQRT2 * R.E_c,
        -R.delta_c * Xa - R.kappa_c * Ya - SQRT2 * R.G1 * P,
        R.omega_r * P + SQRT2 * R.G1 * Xa - R.gamma_r * q,
        -R.omega_r * q - R.gamma_r * P + 0.5 * R.g2 * (Xc**2 + Yc**2),
        dw * Yc - R.kappa_w * Xc + SQRT2 * R.E_w,
        -dw * Xc - R.kappa_w * Yc,
    ])


def mean_field_jacobian(rates: ConverterRates, r: np.ndarray) -> np.ndarray:
    Xa, Ya, q, P, Xc, Yc = r
    R = rates
    dw = R.delta_w - R.g2 * q
    s2G = SQRT2 * R.G1
    return np.array([
        [-R.kappa_c, R.delta_c, 0, 0, 0, 0],
        [-R.delta_c, -R.kappa_c, 0, -s2G, 0, 0],
        [s2G, 0, -R.gamma_r, R.omega_r, 0, 0],
        [0, 0, -R.omega_r, -R.gamma_r, R.g2 * Xc, R.g2 * Yc],
        [0, 0, -R.g2 * Yc, 0, -R.kappa_w, dw],
        [0, 0, R.g2 * Xc, 0, -dw, -R.kappa_w],
    ], dtype=float)


def classical_fixed_point(rates: ConverterRates, tol: float = NEWTON_TOL, max_iter: int = 200) -> np.ndarray:
    """Steady state of the mean-field equations by damped Newton iteration."""
    r = np.zeros(6)
    F = mean_field_rhs(rates, r)
    for _ in range(max_iter):
        norm = np.max(np.abs(F))
        if norm < tol:
            return r
        try:
            step = np.linalg.solve(mean_field_jacobian(rates, r), -F)
        except np.linalg.LinAlgError as exc:
            raise LinearizationError(f"singular Jacobian at r = {r}") from exc
        lam = 1.0
        while lam > 1e-6:
            trial = r + lam * step
            F_trial = mean_field_rhs(rates, trial)
            if np.max(np.abs(F_trial)) < (1 - 1e-4 * lam) * norm:
                break
            lam *= 0.5
        else:
            raise LinearizationError(f"Newton line search stalled at residual {norm:.3e}")
        r, F = trial, F_trial
    raise LinearizationError(f"Newton iteration did not reach {tol:.0e} in {max_iter} steps (residual {np.max(np.abs(F)):.3e})")


def converter_drift(rates: ConverterRates) -> tuple[DriftModel, np.ndarray]:
    """Linearized drift about the classical fixed point.

    ``b = -A r_bar`` so that the affine model has the fixed point as its
    steady mean; for g2 = 0 this is exactly the drive vector.
    """
    r_bar = classical_fixed_point(rates)
    A = mean_field_jacobian(rates, r_bar)
    n0, n1, n2 = rates.nbar
    D = np.diag([
        2 * rates.kappa_c * (n0 + 0.5), 2 * rates.kappa_c * (n0 + 0.5),
        2 * rates.gamma_r * (n1 + 0.5), 2 * rates.gamma_r * (n1 + 0.5),
        2 * rates.kappa_w * (n2 + 0.5), 2 * rates.kappa_w * (n2 + 0.5),
    ])
    return DriftModel(A, D, -A @ r_bar), r_bar


# --------------------------------------------------------------------------
# Lindblad models


def _check_drive(label: str, E: float, kappa: float, delta: float, dim: int):
    n = E**2 / (kappa**2 + delta**2)
    if n > dim / 4:
        raise ConfigError(
            f"{label} drive gives ~{n:.3g} intracavity photons, above the truncation-safe {dim / 4:g} "
            f"for dim {dim}; lower the drive attenuation or raise the dimension"
        )


def converter_hamiltonian_terms(rates: ConverterRates, space: ModeSpace, linearized: bool = False):
    """Hamiltonian terms by name (for term-deletion checks and model assembly)."""
    a, b, c = (destroy(space, k) for k in range(3))
    q = (b + b.dag()) / SQRT2
    P = (b - b.dag()) / (1j * SQRT2)
    R = rates
    terms = {
        "oc": R.delta_c * (a.dag() @ a),
        "middle": R.omega_r * (b.dag() @ b),
        "oc_middle": R.G1 * ((a + a.dag()) @ P),
    }
    if linearized:
        r_bar = classical_fixed_point(rates)
        cbar = complex(r_bar[4], r_bar[5]) / SQRT2
        terms["mc"] = (R.delta_w - R.g2 * r_bar[2]) * (c.dag() @ c)
        terms["mc_middle"] = -R.g2 * (q @ (cbar.conjugate() * c + cbar * c.dag()))
    else:
        terms["mc"] = R.delta_w * (c.dag() @ c)
        terms["mc_middle"] = -R.g2 * (q @ (c.dag() @ c))
        terms["oc_drive"] = 1j * R.E_c * (a.dag() - a)
        terms["mc_drive"] = 1j * R.E_w * (c.dag() - c)
    return terms


def converter_lindblad(rates: ConverterRates, dims, linearized: bool = False) -> LindbladModel:
    space = dims if isinstance(dims, ModeSpace) else ModeSpace(tuple(dims))
    if space.n_modes != 3:
        raise ShapeError(f"converter models have 3 modes, got {space.n_modes}")
    if not linearized:
        _check_drive("optical", rates.E_c, rates.kappa_c, rates.delta_c, space.dims[0])
        _check_drive("microwave", rates.E_w, rates.kappa_w, rates.delta_w, space.dims[2])
    terms = converter_hamiltonian_terms(rates, space, linearized)
    H = sum(terms.values(), start=zero(space))
    H = 0.5 * (H + H.dag())
    collapses = []
    for k, rate in enumerate((rates.kappa_c, rates.gamma_r, rates.kappa_w)):
        collapses += thermal_collapse_pair(destroy(space, k), rate, rates.nbar[k])
    return LindbladModel(H, tuple(collapses))


def build_eomc_lindblad(params: EomcParams, dims, linearized: bool = False) -> LindbladModel:
    """Master-equation model in time units of 1/omega_m.

    With ``linearized`` the model describes fluctuations about the classical
    fixed point (quadratic Hamiltonian, no drives).
    """
    return converter_lindblad(eomc_rates(params), dims, linearized)


def build_eomc_drift(params: EomcParams) -> DriftModel:
    return converter_drift(eomc_rates(params))[0]


def build_opd_lindblad(params: OpdParams, dims, linearized: bool = False) -> LindbladModel:
    """Master-equation model in time units of 1/omega_eg."""
    return converter_lindblad(opd_rates(params), dims, linearized)


def build_opd_drift(params: OpdParams) -> DriftModel:
    return converter_drift(opd_rates(params))[0]
