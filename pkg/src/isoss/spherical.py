"""O(d)-invariant processes on the unit sphere S^{d-1}.

The diffusion part has generator c_sph * Laplace-Beltrami and is stepped by
geodesic moves along a tangent Gaussian; the jump part is compound Poisson
with rotation-invariant direction and a configurable law of the jump angle.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from . import _events, rng as rngmod
from .laws import JumpLaw
from .paths import CadlagPath


@dataclass(frozen=True)
class AngularSpec:
    dim: int
    c_sph: float = 0.0
    jump_rate: float = 0.0
    jump_angle_law: JumpLaw = field(default_factory=lambda: JumpLaw("uniform", {"low": 0.0, "high": np.pi}))

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError("dim must be an integer >= 2")
        if self.c_sph < 0 or self.jump_rate < 0:
            raise ValueError("c_sph and jump_rate must be nonnegative")
        lo, hi = self.jump_angle_law.support()
        if lo < 0 or hi > np.pi or self.jump_angle_law.has_atom_at(0.0):
            raise ValueError("jump_angle_law must live on (0, pi]")


def _unit(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return theta / np.linalg.norm(theta, axis=-1, keepdims=True)


def _tangent(theta: np.ndarray, z: np.ndarray) -> np.ndarray:
    return z - np.sum(z * theta, axis=-1, keepdims=True) * theta


def _geodesic_move(theta: np.ndarray, direction: np.ndarray, length: np.ndarray) -> np.ndarray:
    """Move each row of ``theta`` by arc ``length`` along tangent ``direction`` (unit)."""
    out = np.cos(length)[:, None] * theta + np.sin(length)[:, None] * direction
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def sbm_steps(theta: np.ndarray, c_sph: float, h, z: np.ndarray) -> np.ndarray:
    """Batched geodesic step; ``z`` holds standard normal vectors in R^d.

    Rows with zero step length are returned unchanged.
    """
    scale = np.sqrt(2.0 * c_sph * np.broadcast_to(h, theta.shape[:1]))
    g = _tangent(theta, z)
    gn = np.linalg.norm(g, axis=1)
    move = (scale > 0) & (gn > 0)
    if not np.any(move):
        return theta
    out = theta.copy()
    out[move] = _geodesic_move(theta[move], g[move] / gn[move, None], scale[move] * gn[move])
    return out


def rotate_by_angle(theta: np.ndarray, delta: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Rotate rows of ``theta`` by geodesic angle ``delta`` towards the tangent part of ``z``."""
    g = _tangent(theta, z)
    return _geodesic_move(theta, g / np.linalg.norm(g, axis=1, keepdims=True), np.asarray(delta, dtype=float))


def sbm_step(theta, c_sph: float, h: float, rng: np.random.Generator) -> np.ndarray:
    if c_sph == 0:
        return np.array(theta, dtype=float)
    theta = _unit(theta)
    return sbm_steps(theta[None, :], c_sph, h, rng.standard_normal((1, theta.size)))[0]


def sample_angular_jump(theta, delta: float, rng: np.random.Generator) -> np.ndarray:
    if not 0 < delta <= np.pi:
        raise ValueError(f"jump angle must lie in (0, pi], got {delta}")
    theta = _unit(theta)
    return rotate_by_angle(theta[None, :], np.array([delta]), rng.standard_normal((1, theta.size)))[0]


class AngularDriver:
    """Pre-drawn randomness of the angular component for one chunk of paths.

    All draws come from a single stream in a fixed order: the Poisson event
    times, the jump angles, the jump directions, then per-column Gaussians on
    demand. ``evolve`` consumes a merged :class:`~isoss._events.EventGrid`.
    """

    def __init__(self, spec: AngularSpec, gen: np.random.Generator, t_end: float, n: int):
        self.spec = spec
        self.gen = gen
        self.event_times = _events.poisson_times(gen, spec.jump_rate, t_end, n)
        k = self.event_times.shape[1]
        self.angles = spec.jump_angle_law.sample(gen, (n, k)) if k else np.empty((n, 0))
        self.directions = gen.standard_normal((n, k, spec.dim))

    def evolve(self, theta0: np.ndarray, grid: _events.EventGrid, kind: int, keep_path: bool = True):
        """Return (theta, theta_left) of shape (n, M, d) along the merged grid.

        With ``keep_path=False`` only the final states (n, d) are returned.
        Padding columns have dt = 0 and no event, so they hold the last state.
        """
        n, m = grid.times.shape
        d = self.spec.dim
        cur = np.array(np.broadcast_to(theta0, (n, d)), dtype=float)
        diffuse = self.spec.c_sph > 0
        has_jumps = self.event_times.shape[1] > 0
        if not diffuse and not has_jumps:
            if not keep_path:
                return cur
            theta = np.broadcast_to(cur[:, None, :], (n, m, d)).copy()
            return theta, theta.copy()
        scale = np.sqrt(2.0 * self.spec.c_sph * grid.dt)
        jumps = grid.kind == kind
        delta = _events.gather(self.angles, grid, kind)
        direc = _events.gather(self.directions, grid, kind) if has_jumps else np.zeros((n, m, d))
        shape = (n, m, d) if keep_path else (0, 0, 0)
        theta, left = np.empty(shape), np.empty(shape)
        if keep_path:
            theta[:, 0] = left[:, 0] = cur
        for k0 in range(1, m, _BLOCK):
            k1 = min(m, k0 + _BLOCK)
            z = self.gen.standard_normal((k1 - k0, n, d)) if diffuse else np.zeros((k1 - k0, n, d))
            _angular_kernel(cur, scale, z, jumps, delta, direc, k0, keep_path, theta, left)
        return (theta, left) if keep_path else cur


_BLOCK = 256


@numba.njit(cache=True)
def _angular_kernel(cur, scale, z, jumps, delta, direc, k0, keep, theta, left):
    # Geodesic Gaussian step, then the jump (if any) at each column k0 + b.
    n, d = cur.shape
    for b in range(z.shape[0]):
        k = k0 + b
        for i in range(n):
            s = scale[i, k]
            if s > 0.0:
                dot = 0.0
                for j in range(d):
                    dot += z[b, i, j] * cur[i, j]
                gn = 0.0
                for j in range(d):
                    gn += (z[b, i, j] - dot * cur[i, j]) ** 2
                gn = np.sqrt(gn)
                if gn > 0.0:
                    c, sn = np.cos(s * gn), np.sin(s * gn)
                    nrm = 0.0
                    for j in range(d):
                        cur[i, j] = c * cur[i, j] + sn * (z[b, i, j] - dot * cur[i, j]) / gn
                        nrm += cur[i, j] ** 2
                    nrm = np.sqrt(nrm)
                    for j in range(d):
                        cur[i, j] /= nrm
            if keep:
                left[i, k] = cur[i]
            if jumps[i, k]:
                dot = 0.0
                for j in range(d):
                    dot += direc[i, k, j] * cur[i, j]
                gn = 0.0
                for j in range(d):
                    gn += (direc[i, k, j] - dot * cur[i, j]) ** 2
                gn = np.sqrt(gn)
                c, sn = np.cos(delta[i, k]), np.sin(delta[i, k])
                nrm = 0.0
                for j in range(d):
                    cur[i, j] = c * cur[i, j] + sn * (direc[i, k, j] - dot * cur[i, j]) / gn
                    nrm += cur[i, j] ** 2
                nrm = np.sqrt(nrm)
                for j in range(d):
                    cur[i, j] /= nrm
            if keep:
                theta[i, k] = cur[i]


def simulate_angular_batch(spec: AngularSpec, theta0, t_end: float, h: float, n: int, seed=None) -> list[CadlagPath]:
    """``n`` independent paths of the angular process, chunked for reproducibility."""
    theta0 = _unit(theta0)
    grid0 = _events.regular_grid(t_end, h)
    out = []
    for c, count in rngmod.chunks(n):
        drv = AngularDriver(spec, rngmod.stream(seed, c, rngmod.ANGULAR), t_end, count)
        grid = _events.merge(grid0, drv.event_times)
        theta, left = drv.evolve(theta0, grid, 1)
        out.extend(_events.to_paths(grid.times, theta, grid.kind == 1, left, np.full(count, np.inf)))
    return out


def simulate_angular(spec: AngularSpec, theta0, t_end: float, h: float, rng=None) -> CadlagPath:
    return simulate_angular_batch(spec, theta0, t_end, h, 1, rng)[0]


def final_angles(spec: AngularSpec, theta0, t_end: float, h: float, n: int, seed=None) -> np.ndarray:
    """States at ``t_end`` of ``n`` angular paths; the same draws as :func:`simulate_angular_batch`."""
    theta0 = _unit(theta0)
    grid0 = _events.regular_grid(t_end, h)
    out = []
    for c, count in rngmod.chunks(n):
        drv = AngularDriver(spec, rngmod.stream(seed, c, rngmod.ANGULAR), t_end, count)
        out.append(drv.evolve(theta0, _events.merge(grid0, drv.event_times), 1, keep_path=False))
    return np.vstack(out)
