"""Four capacitively coupled qubits.

Each qubit is a weakly anharmonic oscillator truncated to 2-4 levels. In time
units of 1/Omega_1 the Hamiltonian is

    H = sum_n [ Omega_n b^dag b - beta_n (b + b^dag) - (Ec_n/12)(b + b^dag)^4
                - i eps_n (b - b^dag) ]
        - sum_{n<m} g_nm (b_n - b_n^dag)(b_m - b_m^dag)

with beta_n = I_b/sqrt(2 pi) (8Ec/EJ)^(1/4) Phi_0/(2 pi hbar),
eps_n = m_n I_b/sqrt(2) (EJ/8Ec)^(1/4) 2e V_rf/hbar and
g_nm = 2 Ec_nm K_n K_m/hbar, K_n = (EJ_n/8Ec_n)^(1/4), Ec_nm = e^2/(2 C_nm).
Each unordered pair appears once, which reproduces the coupling term of the
Langevin equation for b_n. Amplitudes decay at kappa_n/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import e, h, hbar, physical_constants

from ..errors import ConfigError
from ..gaussian import DriftModel
from ..lindblad import LindbladModel, thermal_collapse_pair
from ..operators import ModeSpace, destroy, zero
from .params import QubitParams
from .thermal import thermal_occupation

PHI_0 = physical_constants["mag. flux quantum"][0]
LEVELS = (2, 3, 4)
DEFAULT_LEVELS = 3


@dataclass(frozen=True)
class QubitEnergies:
    E_c: tuple[float, ...]  # J
    E_J: tuple[float, ...]  # J
    Omega: tuple[float, ...]  # rad/s
    E_c_nm: dict = field(default_factory=dict)  # J, keyed by zero-based pair
    K: tuple[float, ...] = ()

    def coupling(self, n: int, m: int) -> float:
        """g_nm in rad/s (0 for absent links)."""
        pair = (min(n, m), max(n, m))
        if pair not in self.E_c_nm:
            return 0.0
        return 2 * self.E_c_nm[pair] * self.K[n] * self.K[m] / hbar


def qubit_energies(params: QubitParams) -> QubitEnergies:
    E_c = tuple(h * params.F_c1 for _ in range(4))
    E_J = tuple(h * f for f in params.F_J0)
    Omega = tuple(math.sqrt(8 * ec * ej) / hbar for ec, ej in zip(E_c, E_J))
    K = tuple((ej / (8 * ec)) ** 0.25 for ec, ej in zip(E_c, E_J))
    E_c_nm = {pair: e**2 / (2 * C) for pair, C in params.coupling_capacitances().items()}
    return QubitEnergies(E_c, E_J, Omega, E_c_nm, K)


@dataclass(frozen=True)
class QubitRates:
    """Rates in rad/s; divide by ``omega_ref`` for model units."""

    omega_ref: float
    Omega: tuple[float, ...]
    anharm: tuple[float, ...]  # Ec_n / hbar
    beta: tuple[float, ...]
    eps: tuple[float, ...]
    g: np.ndarray
    kappa: tuple[float, ...]
    nbar: tuple[float, ...]


def qubit_rates(params: QubitParams) -> QubitRates:
    en = qubit_energies(params)
    beta, eps = [], []
    for n in range(4):
        Ib = params.I_b[n]
        beta.append(Ib / math.sqrt(2 * math.pi) / en.K[n] * PHI_0 / (2 * math.pi) / hbar)
        eps.append(params.m[n] * Ib / math.sqrt(2) * en.K[n] * 2 * e * params.V_rf / hbar)
    g = np.array([[en.coupling(n, m) if n != m else 0.0 for m in range(4)] for n in range(4)])
    return QubitRates(
        omega_ref=en.Omega[0],
        Omega=en.Omega,
        anharm=tuple(ec / hbar for ec in en.E_c),
        beta=tuple(beta),
        eps=tuple(eps),
        g=g,
        kappa=params.kappa,
        nbar=tuple(thermal_occupation(w, params.T_em) for w in en.Omega),
    )


def _check_levels(levels) -> tuple[int, ...]:
    lv = (levels,) * 4 if isinstance(levels, int) else tuple(int(x) for x in levels)
    if len(lv) != 4 or any(x not in LEVELS for x in lv):
        raise ConfigError(f"levels per qubit must be in {LEVELS}, got {levels!r}")
    return lv


def qubit_hamiltonian_terms(params: QubitParams, levels=DEFAULT_LEVELS, qubits=range(4)) -> dict:
    """Named Hamiltonian terms in units of Omega_1, on the listed qubits only."""
    qubits = list(qubits)
    R = qubit_rates(params)
    w = R.omega_ref
    lv = _check_levels(levels)
    space = ModeSpace(tuple(lv[n] for n in qubits))
    terms = {}
    ops = {}
    for k, n in enumerate(qubits):
        b = destroy(space, k)
        ops[n] = b
        x = b + b.dag()
        terms[f"harmonic_{n + 1}"] = (R.Omega[n] / w) * (b.dag() @ b)
        terms[f"bias_{n + 1}"] = (-R.beta[n] / w) * x
        terms[f"quartic_{n + 1}"] = (-R.anharm[n] / (12 * w)) * (x ** 4)
        terms[f"drive_{n + 1}"] = (-1j * R.eps[n] / w) * (b - b.dag())
    for i, n in enumerate(qubits):
        for m in qubits[i + 1:]:
            if R.g[n, m] != 0.0:
                bn, bm = ops[n], ops[m]
                terms[f"coupling_{n + 1}{m + 1}"] = (-R.g[n, m] / w) * ((bn - bn.dag()) @ (bm - bm.dag()))
    return space, terms


def build_qubit_lindblad(params: QubitParams, levels=DEFAULT_LEVELS) -> LindbladModel:
    """Master-equation model in time units of 1/Omega_1 (lab frame, time independent)."""
    space, terms = qubit_hamiltonian_terms(params, levels)
    H = sum(terms.values(), start=zero(space))
    H = 0.5 * (H + H.dag())
    R = qubit_rates(params)
    collapses = []
    for n in range(4):
        collapses += thermal_collapse_pair(destroy(space, n), 0.5 * R.kappa[n] / R.omega_ref, R.nbar[n])
    return LindbladModel(H, tuple(collapses))


def single_excitation_block(params: QubitParams, pair=(0, 1), levels=DEFAULT_LEVELS) -> np.ndarray:
    """2x2 block of the two-qubit Hamiltonian on {|10>, |01>} (bias and drive off)."""
    n, m = pair
    space, terms = qubit_hamiltonian_terms(params, levels, qubits=(n, m))
    keep = [k for k in terms if k.startswith(("harmonic", "quartic", "coupling"))]
    H = sum((terms[k] for k in keep), start=zero(space)).matrix
    d1, d2 = space.dims
    i10, i01 = 1 * d2 + 0, 0 * d2 + 1
    idx = [i10, i01]
    return H[np.ix_(idx, idx)]


def avoided_crossing_gap(params: QubitParams, pair=(0, 1), levels=DEFAULT_LEVELS) -> tuple[float, complex]:
    """Eigenvalue splitting of the single-excitation block and its coupling element <10|H|01>."""
    block = single_excitation_block(params, pair, levels)
    ev = np.linalg.eigvalsh(block)
    return float(ev[1] - ev[0]), complex(block[0, 1])


@dataclass(frozen=True)
class QubitLangevin:
    """Mean-field equations of motion for the four qubit amplitudes.

    db_n/dt = -(i Omega_n + kappa_n/2) b_n + i beta_n + i (Ec_n/3)(b_n + b_n^*)^3
              + eps_n - i sum_m g_nm (b_m - b_m^*)
    (rates in units of Omega_1; noise terms omitted).
    """

    Omega: np.ndarray
    kappa: np.ndarray
    beta: np.ndarray
    eps: np.ndarray
    cubic: np.ndarray
    g: np.ndarray
    nbar: np.ndarray
    equation: str = (
        "db_n/dt = -(i Omega_n + kappa_n/2) b_n + i beta_n + i (Ec_n/3)(b_n + b_n^*)^3 "
        "+ eps_n - i sum_m g_nm (b_m - b_m^*) + sqrt(kappa_n) b_in"
    )

    def rhs(self, t, b: np.ndarray) -> np.ndarray:
        x = b + b.conj()
        coupling = self.g @ (b - b.conj())
        return (-(1j * self.Omega + 0.5 * self.kappa) * b + 1j * self.beta
                + 1j * self.cubic * x**3 + self.eps - 1j * coupling)

    def linear_drift(self) -> DriftModel:
        """Cubic term dropped; quadrature order (X1, Y1, ..., X4, Y4)."""
        A = np.zeros((8, 8))
        bvec = np.zeros(8)
        for n in range(4):
            X, Y = 2 * n, 2 * n + 1
            A[X, X] = A[Y, Y] = -0.5 * self.kappa[n]
            A[X, Y] = self.Omega[n]
            A[Y, X] = -self.Omega[n]
            for m in range(4):
                if m != n:
                    A[X, 2 * m + 1] += 2 * self.g[n, m]
            bvec[X] = math.sqrt(2) * self.eps[n]
            bvec[Y] = math.sqrt(2) * self.beta[n]
        D = np.diag(np.repeat(self.kappa * (self.nbar + 0.5), 2))
        return DriftModel(A, D, bvec)


def qubit_langevin_rhs(params: QubitParams) -> QubitLangevin:
    R = qubit_rates(params)
    w = R.omega_ref
    return QubitLangevin(
        Omega=np.array(R.Omega) / w,
        kappa=np.array(R.kappa) / w,
        beta=np.array(R.beta) / w,
        eps=np.array(R.eps) / w,
        cubic=np.array(R.anharm) / (3 * w),
        g=R.g / w,
        nbar=np.array(R.nbar),
    )
