"""Adaptive Dormand-Prince 5(4) integrator for array-valued ODEs.

Works on real or complex arrays of any shape, steps exactly onto the requested
output times, and keeps a running sum of accepted local error estimates so
callers can report how much the integration itself contributed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import StiffnessError

# Dormand & Prince (1980) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0


@dataclass
class Solution:
    times: np.ndarray
    n_steps: int = 0
    n_rejected: int = 0
    error_estimate: float = 0.0
    values: list = field(default_factory=list)


def _initial_step(f, t0, y0, f0, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def dopri5(
    f: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    times,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    observe: Callable[[float, np.ndarray], object] | None = None,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
    max_steps: int = 1_000_000,
    h_init: float | None = None,
) -> Solution:
    """Integrate ``dy/dt = f(t, y)`` and sample at ``times``.

    ``observe(t, y)`` is called at every output time and its return values are
    collected in ``Solution.values``; without it the raw arrays are stored.
    ``project`` is applied to every accepted step (e.g. re-symmetrization).
    """
    if rtol <= 0 or atol <= 0:
        raise ValueError("rtol and atol must be positive")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise ValueError("times must be a non-empty 1-D sequence")
    if np.any(np.diff(times) <= 0):
        raise ValueError("output times must be strictly increasing")
    sol = Solution(times=times)
    record = observe if observe is not None else (lambda t, y: y.copy())

    y = np.array(y0, copy=True)
    t = float(times[0])
    sol.values.append(record(t, y))
    if times.size == 1:
        return sol

    k = [None] * 7
    k[0] = f(t, y)
    span = times[-1] - times[0]
    h = h_init if h_init is not None else _initial_step(f, t, y, k[0], rtol, atol)
    h = min(h, span)
    h_min = 1e-14 * max(1.0, abs(times[-1]))

    for t_out in times[1:]:
        while t < t_out:
            if sol.n_steps + sol.n_rejected >= max_steps:
                raise StiffnessError(f"step budget of {max_steps} exhausted at t={t:.6g} (h={h:.3e})")
            last = t + h >= t_out - 1e-12 * max(1.0, abs(t_out))
            step = t_out - t if last else h
            for s in range(1, 7):
                acc = y.copy()
                for j, a in enumerate(_A[s]):
                    if a != 0.0:
                        acc += (step * a) * k[j]
                k[s] = f(t + _C[s] * step, acc)
            y_new = acc  # stage 7 argument is the 5th-order solution (FSAL)
            err = step * sum(e * kk for e, kk in zip(_E, k) if e != 0.0)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))
            if err_norm <= 1.0:
                t = t_out if last else t + step
                if project is not None:
                    y_new = project(y_new)
                    k[6] = f(t, y_new)
                y = y_new
                k[0] = k[6]
                sol.n_steps += 1
                sol.error_estimate += float(np.max(np.abs(err)))
                factor = MAX_FACTOR if err_norm == 0 else min(MAX_FACTOR, SAFETY * err_norm ** -0.2)
                # a step clipped onto an output time says little about the natural step size
                h = max(h, step * factor) if (last and step < h) else step * factor
            else:
                sol.n_rejected += 1
                h = step * max(MIN_FACTOR, SAFETY * err_norm ** -0.2)
                if h < h_min:
                    raise StiffnessError(
                        f"step size underflow at t={t:.6g}: h={h:.3e}, error norm {err_norm:.3e}; "
                        "the problem is likely stiff or the tolerances too tight"
                    )
        sol.values.append(record(t, y))
    return sol
