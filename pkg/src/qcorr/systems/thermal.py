"""Bath occupations."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import hbar, k as k_B

from ..errors import DomainError


def thermal_occupation(omega: float, T: float) -> float:
    """Bose-Einstein occupation 1/(exp(hbar*omega/k_B T) - 1) for omega in rad/s."""
    if not omega > 0:
        raise DomainError(f"mode frequency must be positive, got {omega}")
    if T < 0:
        raise DomainError(f"temperature must be >= 0, got {T}")
    if T == 0:
        return 0.0
    x = hbar * omega / (k_B * T)
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class BathSpec:
    """Per-mode (omega [rad/s], T [K]) pairs."""

    modes: tuple[tuple[float, float], ...]

    def __post_init__(self):
        modes = tuple((float(w), float(T)) for w, T in self.modes)
        for w, T in modes:
            if T < 0:
                raise DomainError(f"bath temperature must be >= 0, got {T}")
            if not w > 0:
                raise DomainError(f"bath mode frequency must be positive, got {w}")
        object.__setattr__(self, "modes", modes)

    def occupations(self) -> tuple[float, ...]:
        return tuple(thermal_occupation(w, T) for w, T in self.modes)
