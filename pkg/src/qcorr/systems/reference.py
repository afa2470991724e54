"""Reference parameter sets.

The tables leave several quantities open. The choices below are repo-chosen
and fixed here so every run and test uses the same numbers:

* optical-mechanical coupling alpha_c inverted from G1 = 0.1 omega_m;
* g2 = 0.05 omega_m through C_p with C_t = 1 fF;
* g_op = 0.05 omega_eg and g_wp = 0.05 omega_eg (through mu_c, d = 1 um);
* drive attenuation so each driven cavity holds ~0.5 photons at the linear
  fixed point;
* qubit bias 1 nA on qubit 1 only (the RF port couples to qubit 1);
* HEMT coupling constants at their default fractions of delta_1.
"""

from __future__ import annotations

import math

from scipy.constants import epsilon_0, hbar

from .converters import drive_amplitude, optical_frequency
from .params import TWO_PI, EomcParams, HemtParams, OpdParams, QubitParams

G1_RATIO = 0.1
G2_RATIO = 0.05
G_OP_RATIO = 0.05
G_WP_RATIO = 0.05
C_T = 1e-15
PHOTONS = 0.5
QUBIT_BIAS = 1e-9


def _attenuation(kappa, delta, power, omega, photons):
    E_target = math.sqrt(photons * (kappa**2 + delta**2))
    return E_target / drive_amplitude(kappa, power, omega)


def reference_eomc(photons: float = PHOTONS) -> EomcParams:
    base = EomcParams()
    w_m = base.omega_m
    w_c = optical_frequency(base.wavelength)
    alpha_c = G1_RATIO * w_m * math.sqrt(2 * epsilon_0 * base.mass * w_c / w_m)
    G2 = G2_RATIO * w_m / base.detuning_mc
    C_p = G2 / (C_T * math.sqrt(hbar / (base.mass * w_m)))
    return EomcParams(
        alpha_c=alpha_c,
        C_p=C_p,
        C_t=C_T,
        drive_attenuation_c=_attenuation(base.kappa_c, base.detuning_oc, base.P_c, w_c, photons),
        drive_attenuation_w=_attenuation(base.kappa_w, base.detuning_mc, base.P_w, TWO_PI * base.f_w, photons),
    )


def reference_opd(photons: float = PHOTONS) -> OpdParams:
    base = OpdParams()
    w_eg = base.omega_eg
    w_w = TWO_PI * base.f_w
    mu_c = G_WP_RATIO * w_eg * 2 * base.d / (w_w * math.sqrt(hbar / (w_eg * base.m_eff)))
    return OpdParams(
        g_op=G_OP_RATIO * w_eg,
        mu_c=mu_c,
        drive_attenuation_c=_attenuation(base.kappa_c, base.detuning_oc, base.P_c, optical_frequency(base.wavelength), photons),
        drive_attenuation_w=_attenuation(base.kappa_w, base.detuning_mc, base.P_w, w_w, photons),
    )


def reference_qubits() -> QubitParams:
    return QubitParams(I_b=(QUBIT_BIAS, 0.0, 0.0, 0.0))


def reference_hemt() -> HemtParams:
    return HemtParams()


REFERENCE = {"eomc": reference_eomc, "opd": reference_opd, "qubits4": reference_qubits, "hemt": reference_hemt}
