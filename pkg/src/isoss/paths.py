"""Sampled cadlag paths in E = R^d minus the origin, with exact jump bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

RADIAL_ONLY = "radial-only"
ANGULAR_ONLY = "angular-only"
JOINT = "joint"
NEGLIGIBLE = "negligible"

DEFAULT_TOL = 1e-9


class PathError(ValueError):
    """Raised when a path violates its invariants (e.g. a state at the origin)."""


@dataclass(frozen=True)
class JumpRecord:
    time: float
    left_value: np.ndarray
    right_value: np.ndarray

    def __post_init__(self):
        left = np.asarray(self.left_value, dtype=float)
        right = np.asarray(self.right_value, dtype=float)
        if np.array_equal(left, right):
            raise PathError("jump record with equal left and right values")
        if np.linalg.norm(left) <= 0 or np.linalg.norm(right) <= 0:
            raise PathError("jump record touches the origin")
        object.__setattr__(self, "left_value", left)
        object.__setattr__(self, "right_value", right)


@dataclass(frozen=True)
class CadlagPath:
    """A cadlag trajectory stored at grid and event times.

    ``states[i]`` is the right limit at ``times[i]``. Jumps are kept as three
    parallel arrays (``jump_times``, ``jump_left``, ``jump_right``) so that
    paths with many events stay cheap; :meth:`jump_records` gives the record
    view. ``lifetime`` is the kill time, ``inf`` for a conservative path.
    """

    times: np.ndarray
    states: np.ndarray
    jump_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    jump_left: np.ndarray | None = None
    jump_right: np.ndarray | None = None
    lifetime: float = np.inf
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        d = states.shape[1]
        jt = np.asarray(self.jump_times, dtype=float).reshape(-1)
        jl = np.empty((0, d)) if self.jump_left is None else np.asarray(self.jump_left, dtype=float).reshape(-1, d)
        jr = np.empty((0, d)) if self.jump_right is None else np.asarray(self.jump_right, dtype=float).reshape(-1, d)
        for name, val in (("times", times), ("states", states), ("jump_times", jt), ("jump_left", jl), ("jump_right", jr)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "lifetime", float(self.lifetime))
        if self.validate:
            self.check()

    def check(self) -> None:
        times, states = self.times, self.states
        if times.ndim != 1 or len(times) == 0:
            raise PathError("empty path")
        if len(states) != len(times):
            raise PathError("times and states differ in length")
        if times[0] != 0.0:
            raise PathError("times must start at 0")
        if np.any(np.diff(times) <= 0):
            raise PathError("times must be strictly increasing")
        if not np.all(np.linalg.norm(states, axis=1) > 0):
            raise PathError("path leaves E: state at the origin")
        if not times[-1] < self.lifetime:
            raise PathError("stored times must precede the lifetime")
        if not (len(self.jump_times) == len(self.jump_left) == len(self.jump_right)):
            raise PathError("jump arrays differ in length")
        if len(self.jump_times):
            idx = np.searchsorted(times, self.jump_times)
            if np.any(idx >= len(times)) or np.any(times[np.minimum(idx, len(times) - 1)] != self.jump_times):
                raise PathError("jump time not among stored times")
            if not np.array_equal(states[idx], self.jump_right):
                raise PathError("jump right value differs from the stored state")
            if np.any(np.all(self.jump_left == self.jump_right, axis=1)):
                raise PathError("degenerate jump record")
            if not np.all(np.linalg.norm(self.jump_left, axis=1) > 0):
                raise PathError("jump left limit at the origin")

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def end_time(self) -> float:
        """Right end of the observation window: lifetime if killed, else last time."""
        return self.lifetime if np.isfinite(self.lifetime) else float(self.times[-1])

    @property
    def num_jumps(self) -> int:
        return len(self.jump_times)

    def jump_records(self) -> Iterator[JumpRecord]:
        for t, l, r in zip(self.jump_times, self.jump_left, self.jump_right):
            yield JumpRecord(float(t), l, r)

    def state_at(self, t: float) -> np.ndarray:
        """Sample-and-hold value at ``t``; NaNs once the path is dead or past its window."""
        if t < 0 or t >= self.lifetime or t > self.times[-1] and not np.isfinite(self.lifetime):
            return np.full(self.dim, np.nan)
        return self.states[np.searchsorted(self.times, t, side="right") - 1]

    def truncate(self, t_end: float) -> "CadlagPath":
        """Restrict to [0, t_end], appending a held knot at ``t_end`` if needed."""
        if t_end >= self.end_time:
            return self
        keep = self.times <= t_end
        times, states = self.times[keep], self.states[keep]
        if times[-1] < t_end:
            times = np.append(times, t_end)
            states = np.vstack([states, states[-1]])
        jk = self.jump_times <= t_end
        return CadlagPath(times, states, self.jump_times[jk], self.jump_left[jk], self.jump_right[jk],
                          lifetime=np.inf, validate=False)


def concat(first: CadlagPath, second: CadlagPath) -> CadlagPath:
    """Glue ``second`` (times relative to its own start) onto the end of ``first``.

    ``second.states[0]`` must equal the last state of ``first``; the shared
    knot is stored once.
    """
    if np.isfinite(first.lifetime):
        raise PathError("cannot extend a killed path")
    t0 = first.times[-1]
    if not np.array_equal(second.states[0], first.states[-1]):
        raise PathError("continuation does not start at the end state")
    return CadlagPath(
        np.concatenate([first.times, second.times[1:] + t0]),
        np.vstack([first.states, second.states[1:]]),
        np.concatenate([first.jump_times, second.jump_times + t0]),
        np.vstack([first.jump_left, second.jump_left]),
        np.vstack([first.jump_right, second.jump_right]),
        lifetime=second.lifetime + t0,
        validate=False,
    )


@dataclass(frozen=True)
class PolarView:
    times: np.ndarray
    r: np.ndarray
    theta: np.ndarray


def polar_decompose(path: CadlagPath) -> PolarView:
    r = np.linalg.norm(path.states, axis=1)
    if not np.all(r > 0):
        raise PathError("path leaves E: state at the origin")
    return PolarView(path.times, r, path.states / r[:, None])


def geodesic_angle(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Angle between directions of ``a`` and ``b`` along the last axis.

    Uses 2*atan2(|u - v|, |u + v|) on the unit vectors, which stays accurate
    near 0 and pi where arccos of the dot product does not.
    """
    u = a / np.linalg.norm(a, axis=-1, keepdims=True)
    v = b / np.linalg.norm(b, axis=-1, keepdims=True)
    return 2.0 * np.arctan2(np.linalg.norm(u - v, axis=-1), np.linalg.norm(u + v, axis=-1))


def classify_jumps(left, right, tol_r: float = DEFAULT_TOL, tol_theta: float = DEFAULT_TOL) -> np.ndarray:
    """Vectorized :func:`classify_jump` over arrays of left/right values."""
    if tol_r <= 0 or tol_theta <= 0:
        raise ValueError("tolerances must be positive")
    left = np.atleast_2d(np.asarray(left, dtype=float))
    right = np.atleast_2d(np.asarray(right, dtype=float))
    dr = np.abs(np.linalg.norm(right, axis=1) - np.linalg.norm(left, axis=1)) > tol_r
    dth = geodesic_angle(right, left) > tol_theta
    out = np.full(len(left), NEGLIGIBLE, dtype=object)
    out[dr & ~dth] = RADIAL_ONLY
    out[~dr & dth] = ANGULAR_ONLY
    out[dr & dth] = JOINT
    return out


def classify_jump(j: JumpRecord, tol_r: float = DEFAULT_TOL, tol_theta: float = DEFAULT_TOL) -> str:
    return classify_jumps(j.left_value, j.right_value, tol_r, tol_theta)[0]
