"""Typed parameter records for the four systems.

Values are SI (Hz, rad/s, m, kg, F, K). Defaults mirror the tabulated device
data; quantities the tables leave open (coupling coefficients, drive
attenuation, HEMT coupling constants) default to neutral values and are fixed
by the reference configurations in :mod:`qcorr.systems.reference`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from ..errors import ConfigError

TWO_PI = 2 * math.pi


def _positive(obj, *names):
    for name in names:
        val = getattr(obj, name)
        if not (isinstance(val, (int, float)) and val > 0 and math.isfinite(val)):
            raise ConfigError(f"{type(obj).__name__}.{name} must be a positive number, got {val!r}")


def _non_negative(obj, *names):
    for name in names:
        val = getattr(obj, name)
        if not (isinstance(val, (int, float)) and val >= 0 and math.isfinite(val)):
            raise ConfigError(f"{type(obj).__name__}.{name} must be >= 0, got {val!r}")


def _fill(obj, name, value):
    if getattr(obj, name) is None:
        object.__setattr__(obj, name, float(value))


class _Record:
    """Dict round-trip shared by all parameter records."""

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_dict(cls, data: dict):
        unknown = sorted(set(data) - set(cls.field_names()))
        if unknown:
            raise ConfigError(f"unknown {cls.__name__} keys: {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            out[k] = list(v) if isinstance(v, tuple) else v
        return out


@dataclass(frozen=True)
class EomcParams(_Record):
    """Electro-opto-mechanical converter: optical cavity, mechanical resonator, microwave cavity."""

    wavelength: float = 808e-9
    f_m: float = 10e6
    f_w: float = 10e9
    L_c: float = 1e-3
    L_mc: float = 10e-9
    P_c: float = 30e-3
    P_w: float = 30e-3
    detuning_oc: float | None = None  # default 0.01 * 2 pi f_m
    detuning_mc: float | None = None
    gamma_m: float = 1000.0
    kappa_c: float | None = None  # default 0.08 * 2 pi f_m
    kappa_w: float | None = None  # default 0.02 * 2 pi f_m
    mass: float = 20e-12
    T_em: float = 0.05
    alpha_c: float = 0.0
    C_p: float = 0.0
    C_t: float = 0.0
    drive_attenuation_c: float = 1.0
    drive_attenuation_w: float = 1.0

    def __post_init__(self):
        w_m = TWO_PI * self.f_m
        _fill(self, "detuning_oc", 0.01 * w_m)
        _fill(self, "detuning_mc", 0.01 * w_m)
        _fill(self, "kappa_c", 0.08 * w_m)
        _fill(self, "kappa_w", 0.02 * w_m)
        _positive(self, "wavelength", "f_m", "f_w", "L_c", "L_mc", "gamma_m", "kappa_c", "kappa_w", "mass", "T_em")
        _non_negative(self, "P_c", "P_w", "alpha_c", "drive_attenuation_c", "drive_attenuation_w")
        if self.kappa_c >= w_m or self.kappa_w >= TWO_PI * self.f_w:
            raise ConfigError("cavity damping rates must stay below the mode frequencies")

    @property
    def omega_m(self) -> float:
        return TWO_PI * self.f_m


@dataclass(frozen=True)
class OpdParams(_Record):
    """Optoelectronic converter: optical cavity, photodetector mode, microwave cavity."""

    wavelength: float = 808e-9
    f_pd: float = 1e9
    f_w: float = 10e9
    L_c: float = 1e-3
    P_c: float = 30e-3
    P_w: float = 30e-3
    detuning_oc: float | None = None  # default 0.01 * 2 pi f_pd
    detuning_mc: float | None = None
    kappa_c: float | None = None  # default 0.08 * 2 pi f_pd
    kappa_w: float | None = None  # default 0.02 * 2 pi f_pd
    gamma_p: float | None = None  # default 1e-3 * 2 pi f_pd
    m_eff: float = 5.11e-35
    T_em: float = 0.05
    g_op: float = 0.0
    mu_c: float = 0.0
    d: float = 1e-6
    drive_attenuation_c: float = 1.0
    drive_attenuation_w: float = 1.0

    def __post_init__(self):
        w_eg = TWO_PI * self.f_pd
        _fill(self, "detuning_oc", 0.01 * w_eg)
        _fill(self, "detuning_mc", 0.01 * w_eg)
        _fill(self, "kappa_c", 0.08 * w_eg)
        _fill(self, "kappa_w", 0.02 * w_eg)
        _fill(self, "gamma_p", 1e-3 * w_eg)
        _positive(self, "wavelength", "f_pd", "f_w", "L_c", "kappa_c", "kappa_w", "gamma_p", "m_eff", "T_em", "d")
        _non_negative(self, "P_c", "P_w", "g_op", "mu_c", "drive_attenuation_c", "drive_attenuation_w")
        if self.kappa_c >= w_eg or self.kappa_w >= TWO_PI * self.f_w:
            raise ConfigError("cavity damping rates must stay below the mode frequencies")

    @property
    def omega_eg(self) -> float:
        return TWO_PI * self.f_pd


def _four(name, value):
    vals = (value,) * 4 if isinstance(value, (int, float)) else tuple(value)
    if len(vals) != 4:
        raise ConfigError(f"QubitParams.{name} needs 4 entries, got {len(vals)}")
    return tuple(float(v) for v in vals)


@dataclass(frozen=True)
class QubitParams(_Record):
    """Four capacitively coupled transmon-like qubits.

    A coupling capacitance of 0 means the link is absent. ``V_rf`` is an
    effective drive-strength scalar; ``I_b`` and ``m`` are per qubit.
    """

    C_J: float = 6.24e-12
    C_in: float = 0.08e-12
    C_c1: float = 0.08e-12
    C_c2: float = 0.08e-12
    C_c3: float = 0.08e-12
    C_13: float = 0.0
    C_14: float = 0.0
    C_24: float = 0.0
    F_c1: float = 606e6
    F_J0: tuple[float, ...] = (5.2e9,) * 4
    kappa: tuple[float, ...] | None = None  # default 0.022 * 2 pi F_J0 per qubit
    V_rf: float = 1.5e-7
    I_b: tuple[float, ...] = (0.0,) * 4
    m: tuple[float, ...] = (1.0,) * 4
    T_em: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "F_J0", _four("F_J0", self.F_J0))
        if self.kappa is None:
            object.__setattr__(self, "kappa", tuple(0.022 * TWO_PI * f for f in self.F_J0))
        for name in ("kappa", "I_b", "m"):
            object.__setattr__(self, name, _four(name, getattr(self, name)))
        _positive(self, "C_J", "C_in", "C_c1", "C_c2", "C_c3", "F_c1", "T_em")
        _non_negative(self, "C_13", "C_14", "C_24", "V_rf")
        if min(self.kappa) <= 0:
            raise ConfigError("qubit decay rates must be positive")
        if min(self.F_J0) <= self.F_c1:
            raise ConfigError("F_J0 must exceed F_c1 (transmon regime)")

    def coupling_capacitances(self) -> dict[tuple[int, int], float]:
        """Nonzero coupling capacitances keyed by zero-based qubit pair."""
        caps = {
            (0, 1): self.C_c1, (1, 2): self.C_c2, (2, 3): self.C_c3,
            (0, 2): self.C_13, (0, 3): self.C_14, (1, 3): self.C_24,
        }
        return {k: v for k, v in caps.items() if v > 0}


HEMT_LINEAR = ("gamma_q1q2", "gamma_q1phi2", "gamma_q2phi1", "gamma_phi2", "gamma_q1", "gamma_q2")
HEMT_NONLINEAR = (
    "gamma_q1q2_nl",
    "gamma_q2q1_nl",
    "gamma_q1phi2phi1",
    "gamma_phi2phi1",
    "gamma_q2phi2phi1",
    "gamma_q1phi1phi2",
)


@dataclass(frozen=True)
class HemtParams(_Record):
    """InP HEMT small-signal record plus the two-oscillator coupling constants.

    Coupling constants are keyed by the operator shape of their term (see
    :func:`qcorr.systems.hemt.hemt_terms`); ``None`` selects the default
    fraction of ``delta_1`` (0.05 for gamma_q1q2, 0.02 for the other linear
    terms, 0.005 for the nonlinear ones).
    """

    R_g: float = 0.3
    L_g: float = 75e-12
    L_d: float = 70e-12
    C_gs: float = 107e-15
    C_ds: float = 51e-15
    C_gd: float = 60e-15
    R_i: float = 0.07
    R_j: float = 8.0
    g_d: float = 12e-3
    g_m: float = 82e-3
    V_g: float = 0.03
    V_d: float = 0.06
    T_em: float = 4.2
    T_d: float = 450.0
    f_1: float = 5e9
    f_2: float = 5e9
    delta_1: float = TWO_PI * 0.5e9
    delta_2: float = TWO_PI * 0.55e9
    kappa_1: float | None = None  # default 5e-4 * delta_1
    kappa_2: float | None = None
    drain_noise: bool = False
    gamma_q1q2: float | None = None
    gamma_q1phi2: float | None = None
    gamma_q2phi1: float | None = None
    gamma_phi2: float | None = None
    gamma_q1: float | None = None
    gamma_q2: float | None = None
    gamma_q1q2_nl: float | None = None
    gamma_q2q1_nl: float | None = None
    gamma_q1phi2phi1: float | None = None
    gamma_phi2phi1: float | None = None
    gamma_q2phi2phi1: float | None = None
    gamma_q1phi1phi2: float | None = None

    def __post_init__(self):
        _positive(self, "f_1", "f_2", "delta_1", "delta_2", "T_em", "T_d")
        _fill(self, "kappa_1", 5e-4 * self.delta_1)
        _fill(self, "kappa_2", 5e-4 * self.delta_1)
        _positive(self, "kappa_1", "kappa_2")
        _fill(self, "gamma_q1q2", 0.05 * self.delta_1)
        for name in HEMT_LINEAR[1:]:
            _fill(self, name, 0.02 * self.delta_1)
        for name in HEMT_NONLINEAR:
            _fill(self, name, 0.005 * self.delta_1)
        limit = max(self.delta_1, self.delta_2)
        for name in HEMT_LINEAR + HEMT_NONLINEAR:
            val = getattr(self, name)
            if not math.isfinite(val) or abs(val) >= limit:
                raise ConfigError(f"|{name}| = {abs(val):.4g} rad/s breaks the perturbative guard (< {limit:.4g})")

    def couplings(self, nonlinear: bool = True) -> dict[str, float]:
        names = HEMT_LINEAR + (HEMT_NONLINEAR if nonlinear else ())
        return {k: getattr(self, k) for k in names}

    def with_couplings(self, **values) -> "HemtParams":
        data = self.to_dict()
        data.update(values)
        return HemtParams(**data)


SYSTEM_PARAMS = {"eomc": EomcParams, "opd": OpdParams, "qubits4": QubitParams, "hemt": HemtParams}
