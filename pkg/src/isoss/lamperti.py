"""Lamperti-Kiu time change between self-similar and multiplicatively invariant paths.

The additive functional A_t = int_0^t |x_s|^(-1/alpha) ds turns an
alpha-self-similar process x into xbar_t = x_{T_t}, T = A^{-1}; conversely
T_t = int_0^t |xbar_u|^(1/alpha) du recovers x_t = xbar_{A_t}.

Integrals use the right-limit piecewise-constant rule on the stored grid, so
they are exact for paths whose modulus is constant between stored times.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .paths import CadlagPath, PathError


class TimeChangeError(ValueError):
    pass


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return alpha


@dataclass(frozen=True)
class TimeChange:
    """Continuous strictly increasing piecewise-linear map through (0, 0)."""

    t: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.value, dtype=float)
        if t.shape != v.shape or t.ndim != 1 or len(t) == 0:
            raise TimeChangeError("knot arrays must be 1-d, nonempty and of equal length")
        if t[0] != 0.0 or v[0] != 0.0:
            raise TimeChangeError("time change must start at (0, 0)")
        if np.any(np.diff(t) <= 0) or np.any(np.diff(v) <= 0):
            raise TimeChangeError("time change must be strictly increasing")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "value", v)

    @property
    def horizon(self) -> float:
        return float(self.t[-1])

    def __call__(self, s):
        return np.interp(s, self.t, self.value)

    def preimage(self, v):
        return np.interp(v, self.value, self.t)


def invert(tc: TimeChange) -> TimeChange:
    """Generalized inverse inf{s: tc(s) >= t}; for a strictly increasing
    piecewise-linear map this is the coordinate swap of its knots."""
    return TimeChange(tc.value, tc.t)


def _clock(path: CadlagPath, exponent: float) -> TimeChange:
    times = path.times
    rate = np.linalg.norm(path.states, axis=1) ** exponent
    knots = times
    if np.isfinite(path.lifetime):
        knots = np.append(times, path.lifetime)
    else:
        rate = rate[:-1]
    if len(knots) < 2:
        raise PathError("path has no time span to integrate over")
    values = np.concatenate([[0.0], np.cumsum(rate * np.diff(knots))])
    return TimeChange(knots, values)


def compute_A(path: CadlagPath, alpha: float) -> TimeChange:
    """A_t = int_0^t |x_s|^(-1/alpha) ds, with knots at every stored time."""
    return _clock(path, -1.0 / _check_alpha(alpha))


def compute_T_from_xbar(xbar: CadlagPath, alpha: float) -> TimeChange:
    """T_t = int_0^t |xbar_u|^(1/alpha) du, with knots at every stored time."""
    return _clock(xbar, 1.0 / _check_alpha(alpha))


def apply_time_change(path: CadlagPath, tc: TimeChange) -> CadlagPath:
    """Return y with y_t = path_{tc(t)} for t in [0, tc.horizon].

    Stored times s of the input become tc^{-1}(s); states and jump values are
    carried over untouched, so jumps keep their sizes and directions.
    """
    reach = float(tc.value[-1])
    if reach > path.end_time:
        raise TimeChangeError(f"time change reaches {reach}, past the path's end {path.end_time}")
    killed = np.isfinite(path.lifetime) and reach == path.lifetime
    keep = path.times <= reach
    times = tc.preimage(path.times[keep])
    states = path.states[keep]
    lifetime = np.inf
    if killed:
        lifetime = tc.horizon
    elif times[-1] < tc.horizon:
        times = np.append(times, tc.horizon)
        states = np.vstack([states, states[-1]])
    jk = path.jump_times <= reach
    return CadlagPath(times, states, tc.preimage(path.jump_times[jk]),
                      path.jump_left[jk], path.jump_right[jk], lifetime=lifetime)


def forward_transform(path: CadlagPath, alpha: float) -> CadlagPath:
    """xbar_t = x_{T_t} on [0, A_{end})."""
    return apply_time_change(path, invert(compute_A(path, alpha)))


def inverse_transform(xbar: CadlagPath, alpha: float) -> CadlagPath:
    """x_t = xbar_{A_t}, where A inverts T_t = int |xbar_u|^(1/alpha) du."""
    return apply_time_change(xbar, invert(compute_T_from_xbar(xbar, alpha)))
