"""Two oscillators coupled through an InP HEMT.

Time unit 1/delta_1. Linear block (quadrature form on the right):

    d1 a1^dag a1 + d2 a2^dag a2
    - g_q1q2 (a1 - a1^dag)(a2 - a2^dag)        = 2 g Y1 Y2
    - i g_q1phi2 (a1 - a1^dag)(a2 + a2^dag)    = 2 g Y1 X2
    - i g_q2phi1 (a2 - a2^dag)(a1 + a1^dag)    = 2 g Y2 X1
    + g_phi2 (a2 + a2^dag)                     = sqrt(2) g X2
    - i g_q1 (a1 - a1^dag)                     = sqrt(2) g Y1
    - i g_q2 (a2 - a2^dag)                     = sqrt(2) g Y2

Nonlinear block, keyed by operator shape; products of non-commuting factors
are replaced by their Hermitian part (O + O^dag)/2:

    gamma_q1q2_nl     -(a1 - a1^dag)^2 (a2 + a2^dag)
    gamma_q2q1_nl     -(a2 + a2^dag)(a2 - a2^dag)^2
    gamma_q1phi2phi1  +i (a1 - a1^dag)(a2 + a2^dag)^2
    gamma_phi2phi1    +(a2 + a2^dag)^3
    gamma_q2phi2phi1  +i (a2 - a2^dag)(a2 + a2^dag)^2
    gamma_q1phi1phi2  -i (a1 - a1^dag)(a1 + a1^dag)(a2 + a2^dag)
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ShapeError
from ..gaussian import DriftModel, quadratic_drift
from ..lindblad import LindbladModel, thermal_collapse_pair
from ..operators import ModeSpace, destroy, zero
from .params import HEMT_LINEAR, HEMT_NONLINEAR, TWO_PI, HemtParams
from .thermal import thermal_occupation

SQRT2 = math.sqrt(2.0)


def hemt_occupations(params: HemtParams) -> tuple[float, float]:
    T2 = params.T_d if params.drain_noise else params.T_em
    return (
        thermal_occupation(TWO_PI * params.f_1, params.T_em),
        thermal_occupation(TWO_PI * params.f_2, T2),
    )


def _hermitian_part(op):
    return 0.5 * (op + op.dag())


def hemt_terms(params: HemtParams, space: ModeSpace, nonlinear: bool = True) -> dict:
    """Hamiltonian terms in units of delta_1, keyed by coupling-constant name."""
    if space.n_modes != 2:
        raise ShapeError(f"HEMT model has 2 modes, got {space.n_modes}")
    w = params.delta_1
    a1, a2 = destroy(space, 0), destroy(space, 1)
    p1, p2 = a1 + a1.dag(), a2 + a2.dag()  # phi-like
    m1, m2 = a1 - a1.dag(), a2 - a2.dag()  # q-like
    g = {k: v / w for k, v in params.couplings(nonlinear).items()}
    terms = {
        "delta_1": 1.0 * (a1.dag() @ a1),
        "delta_2": (params.delta_2 / w) * (a2.dag() @ a2),
        "gamma_q1q2": -g["gamma_q1q2"] * (m1 @ m2),
        "gamma_q1phi2": -1j * g["gamma_q1phi2"] * (m1 @ p2),
        "gamma_q2phi1": -1j * g["gamma_q2phi1"] * (m2 @ p1),
        "gamma_phi2": g["gamma_phi2"] * p2,
        "gamma_q1": -1j * g["gamma_q1"] * m1,
        "gamma_q2": -1j * g["gamma_q2"] * m2,
    }
    if nonlinear:
        terms.update({
            "gamma_q1q2_nl": -g["gamma_q1q2_nl"] * (m1 @ m1 @ p2),
            "gamma_q2q1_nl": _hermitian_part(-g["gamma_q2q1_nl"] * (p2 @ m2 @ m2)),
            "gamma_q1phi2phi1": 1j * g["gamma_q1phi2phi1"] * (m1 @ p2 @ p2),
            "gamma_phi2phi1": g["gamma_phi2phi1"] * (p2 @ p2 @ p2),
            "gamma_q2phi2phi1": _hermitian_part(1j * g["gamma_q2phi2phi1"] * (m2 @ p2 @ p2)),
            "gamma_q1phi1phi2": _hermitian_part(-1j * g["gamma_q1phi1phi2"] * (m1 @ p1 @ p2)),
        })
    return terms


def build_hemt_lindblad(params: HemtParams, dims, nonlinear: bool = True) -> LindbladModel:
    space = dims if isinstance(dims, ModeSpace) else ModeSpace(tuple(dims))
    terms = hemt_terms(params, space, nonlinear)
    H = sum(terms.values(), start=zero(space))
    H = 0.5 * (H + H.dag())
    nbar = hemt_occupations(params)
    collapses = []
    for k, kappa in enumerate((params.kappa_1, params.kappa_2)):
        collapses += thermal_collapse_pair(destroy(space, k), kappa / params.delta_1, nbar[k])
    return LindbladModel(H, tuple(collapses))


def hemt_quadratic_form(params: HemtParams) -> tuple[np.ndarray, np.ndarray]:
    """(M, h) of the linear block, H = r^T M r / 2 + h^T r with r = (X1, Y1, X2, Y2)."""
    w = params.delta_1
    g = {k: getattr(params, k) / w for k in HEMT_LINEAR}
    M = np.diag([1.0, 1.0, params.delta_2 / w, params.delta_2 / w])
    X1, Y1, X2, Y2 = range(4)
    for (i, j), val in {
        (Y1, Y2): 2 * g["gamma_q1q2"],
        (Y1, X2): 2 * g["gamma_q1phi2"],
        (Y2, X1): 2 * g["gamma_q2phi1"],
    }.items():
        M[i, j] += val
        M[j, i] += val
    h = np.array([0.0, SQRT2 * g["gamma_q1"], SQRT2 * g["gamma_phi2"], SQRT2 * g["gamma_q2"]])
    return M, h


def build_hemt_drift(params: HemtParams) -> DriftModel:
    """Gaussian model of the linear block (nonlinear terms are not representable)."""
    M, h = hemt_quadratic_form(params)
    w = params.delta_1
    return quadratic_drift(M, h, damping=[params.kappa_1 / w, params.kappa_2 / w], nbar=list(hemt_occupations(params)))


def without_nonlinear(params: HemtParams) -> HemtParams:
    return params.with_couplings(**{k: 0.0 for k in HEMT_NONLINEAR})
