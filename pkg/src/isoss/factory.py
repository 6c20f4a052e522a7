"""Construction of the three process families.

* ``simulate_invariant``: the G-invariant process xbar = rho * xi with a
  multiplicative Levy radial part, an independent spherical part and
  exponential killing at rate gamma.
* ``build_self_similar``: the isotropic alpha-self-similar skew product
  x_t = xbar_{A_t} obtained by the inverse Lamperti time change.
* ``simulate_isotropic_stable``: the rotation-invariant beta-stable Levy
  process, whose radial and angular parts jump together.

All batch functions simulate in chunks of :data:`isoss.rng.CHUNK` paths; each
chunk owns its radial, angular, killing (or stable) streams.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import gamma as gamma_fn, pi

import numpy as np

from . import _events, rng as rngmod
from .lamperti import compute_A, forward_transform, inverse_transform
from .laws import JumpLaw
from .paths import CadlagPath, concat
from .spherical import AngularDriver, AngularSpec

KILL_GUARD = 1e-12
# Continuation stretches double in length; 12 rounds reach 2^13 - 1 times the first stretch.
MAX_EXTENSIONS = 12


@dataclass(frozen=True)
class GeneratorSpec:
    """Normal-form generator data of a G-invariant process on E.

    ``a11`` and ``c1`` are the Gaussian variance and drift of log|xbar|;
    radial jumps act on log|xbar| with sizes from ``radial_jump_law``;
    ``angular`` carries the Laplace-Beltrami coefficient and the spherical
    jumps; ``gamma`` is the killing rate.
    """

    dim: int
    alpha: float
    a11: float = 0.0
    c1: float = 0.0
    angular: AngularSpec | None = None
    radial_jump_rate: float = 0.0
    radial_jump_law: JumpLaw = field(default_factory=lambda: JumpLaw("normal", {"mean": 0.0, "std": 1.0}))
    gamma: float = 0.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError("dim must be an integer >= 2")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.a11 < 0 or self.gamma < 0 or self.radial_jump_rate < 0:
            raise ValueError("a11, gamma and radial_jump_rate must be nonnegative")
        if self.radial_jump_law.has_atom_at(0.0):
            raise ValueError("radial_jump_law must not charge 0")
        if self.angular is None:
            object.__setattr__(self, "angular", AngularSpec(self.dim))
        elif self.angular.dim != self.dim:
            raise ValueError("angular.dim must match dim")


@dataclass(frozen=True)
class StableSpec:
    dim: int
    beta: float
    eps_trunc: float
    x0: tuple

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError("dim must be an integer >= 2")
        if not 0 < self.beta < 2:
            raise ValueError(f"beta must lie in (0, 2), got {self.beta}")
        if not self.eps_trunc > 0:
            raise ValueError("eps_trunc must be positive")
        x0 = tuple(float(v) for v in self.x0)
        if len(x0) != self.dim or not np.linalg.norm(x0) > 0:
            raise ValueError("x0 must be a nonzero vector of length dim")
        object.__setattr__(self, "x0", x0)

    @property
    def alpha(self) -> float:
        return 1.0 / self.beta


def sphere_area(d: int) -> float:
    """Surface measure of S^{d-1}."""
    return 2 * pi ** (d / 2) / gamma_fn(d / 2)


def stable_tail_mass(spec: StableSpec) -> float:
    """Rate of jumps longer than eps for the Levy measure |y|^{-d-beta} dy."""
    return sphere_area(spec.dim) * spec.eps_trunc ** (-spec.beta) / spec.beta


def stable_small_jump_variance(spec: StableSpec) -> float:
    """Per-coordinate variance rate of the jumps shorter than eps."""
    d, b, e = spec.dim, spec.beta, spec.eps_trunc
    return sphere_area(d) / d * e ** (2 - b) / (2 - b)


# ---------------------------------------------------------------- drivers

class RadialDriver:
    """Log-radius L = c1 t + sqrt(a11) W + compound Poisson, pre-drawn per chunk."""

    def __init__(self, spec: GeneratorSpec, gen: np.random.Generator, t_end: float, n: int):
        self.spec = spec
        self.gen = gen
        self.event_times = _events.poisson_times(gen, spec.radial_jump_rate, t_end, n)
        k = self.event_times.shape[1]
        self.sizes = spec.radial_jump_law.sample(gen, (n, k)) if k else np.empty((n, 0))

    def evolve(self, logr0: np.ndarray, grid: _events.EventGrid, kind: int):
        """Return (log r, log r left limits) on the merged grid."""
        dt = grid.dt
        incr = self.spec.c1 * dt
        if self.spec.a11 > 0:
            incr = incr + np.sqrt(self.spec.a11 * dt) * self.gen.standard_normal(dt.shape)
        jumps = _events.gather(self.sizes, grid, kind)
        logr = logr0[:, None] + np.cumsum(incr + jumps, axis=1)
        return logr, logr - jumps


def _generator_streams(seed, chunk: int):
    return tuple(rngmod.stream(seed, chunk, s) for s in (rngmod.RADIAL, rngmod.ANGULAR, rngmod.KILLING))


def _kill_times(spec: GeneratorSpec, gen: np.random.Generator, n: int) -> np.ndarray:
    if spec.gamma > 0:
        return gen.exponential(1.0 / spec.gamma, size=n)
    return np.full(n, np.inf)


def _map_chunks(fn, n: int, threads: int = 1) -> list:
    parts = list(rngmod.chunks(n))
    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(lambda p: fn(*p), parts))
    return [fn(*p) for p in parts]


def _flatten(parts):
    return [p for part in parts for p in part]


def _as_x0(x0, dim: int, n: int) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float)
    x0s = np.array(np.broadcast_to(x0, (n, dim)))
    if not np.all(np.linalg.norm(x0s, axis=1) > 0):
        raise ValueError("starting point must differ from the origin")
    return x0s


# ------------------------------------------------------------ radial only

def simulate_radial_levy_batch(spec: GeneratorSpec, r0: float, t_end: float, h: float, n: int,
                               seed=None, threads: int = 1) -> list[CadlagPath]:
    """rho_t = r0 * exp(L_t) as 1-d paths."""
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    grid0 = _events.regular_grid(t_end, h)

    def run(c, count):
        drv = RadialDriver(spec, rngmod.stream(seed, c, rngmod.RADIAL), t_end, count)
        grid = _events.merge(grid0, drv.event_times)
        logr, left = drv.evolve(np.full(count, np.log(r0)), grid, 1)
        r, rl = np.exp(logr), np.exp(left)
        r[:, 0] = rl[:, 0] = r0
        return _events.to_paths(grid.times, r[..., None], grid.kind == 1, rl[..., None], np.full(count, np.inf))

    return _flatten(_map_chunks(run, n, threads))


def simulate_radial_levy(spec: GeneratorSpec, r0: float, t_end: float, h: float, rng=None) -> CadlagPath:
    return simulate_radial_levy_batch(spec, r0, t_end, h, 1, rng)[0]


# --------------------------------------------------------- invariant xbar

def _invariant_segment(spec: GeneratorSpec, x0s: np.ndarray, t_end: float, h: float, gens, kill: np.ndarray,
                       keep_path: bool = True):
    n = len(x0s)
    r0 = np.linalg.norm(x0s, axis=1)
    theta0 = x0s / r0[:, None]
    rad = RadialDriver(spec, gens[0], t_end, n)
    ang = AngularDriver(spec.angular, gens[1], t_end, n)
    grid = _events.merge(_events.regular_grid(t_end, h), rad.event_times, ang.event_times)
    logr, logr_left = rad.evolve(np.log(r0), grid, 1)
    lifetimes = np.where(kill <= t_end, kill, np.inf)
    if not keep_path:
        final = np.exp(logr[:, -1])[:, None] * ang.evolve(theta0, grid, 2, keep_path=False)
        final[np.isfinite(lifetimes)] = np.nan
        return final
    theta, theta_left = ang.evolve(theta0, grid, 2)
    states = np.exp(logr)[..., None] * theta
    left = np.exp(logr_left)[..., None] * theta_left
    states[:, 0] = left[:, 0] = x0s
    return _events.to_paths(grid.times, states, grid.kind >= 1, left, lifetimes)


def simulate_invariant_batch(spec: GeneratorSpec, x0, t_end: float, h: float, n: int, seed=None,
                             threads: int = 1) -> list[CadlagPath]:
    def run(c, count):
        gens = _generator_streams(seed, c)
        kill = _kill_times(spec, gens[2], count)
        return _invariant_segment(spec, _as_x0(x0, spec.dim, count), t_end, h, gens, kill)

    return _flatten(_map_chunks(run, n, threads))


def simulate_invariant(spec: GeneratorSpec, x0, t_end: float, h: float, rng=None) -> CadlagPath:
    return simulate_invariant_batch(spec, x0, t_end, h, 1, rng)[0]


# ------------------------------------------------------- self-similar x

def _extend_until(paths: list[CadlagPath], clock, target: float, step: float, segment) -> list[CadlagPath]:
    """Append continuation segments to unkilled paths whose ``clock`` is below ``target``.

    ``segment(idx, x0s, offset, length)`` simulates one more stretch for the
    paths ``idx`` started at ``x0s`` at time ``offset``. Stretch lengths double
    each round; after :data:`MAX_EXTENSIONS` rounds the remaining paths end
    early (their states beyond the end read as NaN).
    """
    paths = list(paths)
    level = np.array([clock(p) for p in paths])
    offset = step
    for _ in range(MAX_EXTENSIONS):
        need = [i for i, p in enumerate(paths) if not np.isfinite(p.lifetime) and level[i] < target]
        if not need:
            break
        step *= 2
        more = segment(np.array(need), np.array([paths[i].states[-1] for i in need]), offset, step)
        for i, q in zip(need, more):
            paths[i] = concat(paths[i], q)
            level[i] = clock(paths[i])
        offset += step
    return paths


def _xbar_horizon(x0, alpha: float, t_end: float, h: float) -> float:
    return max(t_end * float(np.linalg.norm(x0)) ** (-1.0 / alpha), 10 * h)


def _xbar_clock(p: CadlagPath, alpha: float) -> np.ndarray:
    """Knot values of T = int |xbar|^(1/alpha), without the monotonicity check."""
    rate = np.linalg.norm(p.states, axis=1) ** (1.0 / alpha)
    knots = p.times if not np.isfinite(p.lifetime) else np.append(p.times, p.lifetime)
    return np.concatenate([[0.0], np.cumsum(rate[: len(knots) - 1] * np.diff(knots))])


def _trim_stalled(p: CadlagPath, alpha: float) -> CadlagPath:
    """Cut xbar where T stops increasing in floating point.

    That happens only when |xbar| is so small that the clock increments fall
    below one ulp of T, i.e. x has numerically reached the origin.
    """
    flat = np.nonzero(np.diff(_xbar_clock(p, alpha)) <= 0)[0]
    if len(flat) == 0:
        return p
    k = max(int(flat[0]), 1)
    jk = p.jump_times <= p.times[k - 1]
    return CadlagPath(p.times[:k], p.states[:k], p.jump_times[jk], p.jump_left[jk], p.jump_right[jk], validate=False)


def build_self_similar_batch(spec: GeneratorSpec, x0, t_end: float, h: float, n: int, seed=None,
                             threads: int = 1) -> list[CadlagPath]:
    """Skew-product paths x_t = xbar_{A_t} on [0, t_end].

    xbar is simulated in stretches until its clock T = int |xbar|^(1/alpha)
    passes ``t_end`` (or it is killed); ``h`` is the grid step in xbar time.
    """
    alpha = spec.alpha
    step = _xbar_horizon(x0, alpha, t_end, h)

    def clock(p):
        values = _xbar_clock(p, alpha)
        return np.inf if np.any(np.diff(values) <= 0) else values[-1]

    def run(c, count):
        gens = _generator_streams(seed, c)
        kill = _kill_times(spec, gens[2], count)
        xbar = _invariant_segment(spec, _as_x0(x0, spec.dim, count), step, h, gens, kill)

        def segment(idx, x0s, offset, length):
            return _invariant_segment(spec, x0s, length, h, gens, kill[idx] - offset)

        xbar = _extend_until(xbar, clock, t_end, step, segment)
        return [inverse_transform(_trim_stalled(p, alpha), alpha).truncate(t_end) for p in xbar]

    return _flatten(_map_chunks(run, n, threads))


def build_self_similar(spec: GeneratorSpec, x0, t_end: float, h: float, rng=None) -> CadlagPath:
    return build_self_similar_batch(spec, x0, t_end, h, 1, rng)[0]


# --------------------------------------------------------------- stable

def _stable_segment(spec: StableSpec, x0s: np.ndarray, t_end: float, h: float, gen: np.random.Generator,
                    keep_path: bool = True):
    n, d = x0s.shape
    ev = _events.poisson_times(gen, stable_tail_mass(spec), t_end, n)
    k = ev.shape[1]
    radii = spec.eps_trunc * (1.0 - gen.random((n, k))) ** (-1.0 / spec.beta)
    dirs = gen.standard_normal((n, k, d))
    dirs /= np.linalg.norm(dirs, axis=2, keepdims=True)
    grid = _events.merge(_events.regular_grid(t_end, h), ev)
    dt = grid.dt
    jumps = _events.gather(radii[..., None] * dirs, grid, 1)
    sigma = np.sqrt(stable_small_jump_variance(spec) * dt)
    states = x0s[:, None, :] + np.cumsum(sigma[..., None] * gen.standard_normal(dt.shape + (d,)) + jumps, axis=1)
    states[:, 0] = x0s
    left = states - jumps
    bad = (np.linalg.norm(states, axis=2) < KILL_GUARD) | (np.linalg.norm(left, axis=2) < KILL_GUARD)
    bad &= grid.valid
    lifetimes = np.where(bad.any(axis=1), grid.times[np.arange(n), bad.argmax(axis=1)], np.inf)
    if not keep_path:
        final = states[:, -1].copy()
        final[np.isfinite(lifetimes)] = np.nan
        return final
    return _events.to_paths(grid.times, states, grid.kind == 1, left, lifetimes)


def simulate_isotropic_stable_batch(spec: StableSpec, t_end: float, h: float, n: int, seed=None,
                                    threads: int = 1, x0=None) -> list[CadlagPath]:
    """Isotropic stable paths: exact large jumps, Gaussian small-jump part."""
    x0 = spec.x0 if x0 is None else x0

    def run(c, count):
        gen = rngmod.stream(seed, c, rngmod.STABLE)
        return _stable_segment(spec, _as_x0(x0, spec.dim, count), t_end, h, gen)

    return _flatten(_map_chunks(run, n, threads))


def simulate_isotropic_stable(spec: StableSpec, t_end: float, h: float, rng=None) -> CadlagPath:
    return simulate_isotropic_stable_batch(spec, t_end, h, 1, rng)[0]


# ------------------------------------------------------------- samplers
#
# A sampler is ``fn(x0, t, n, seed) -> (n, d)`` array of states at time t,
# with NaN rows for paths killed before t. They feed the checks in
# isoss.stats.

def _terminal(p: CadlagPath) -> np.ndarray:
    return p.states[-1] if not np.isfinite(p.lifetime) else np.full(p.dim, np.nan)


def invariant_sampler(spec: GeneratorSpec, h: float, threads: int = 1):
    """States of xbar at t; same draws as :func:`simulate_invariant_batch`."""
    def sample(x0, t, n, seed):
        def run(c, count):
            gens = _generator_streams(seed, c)
            kill = _kill_times(spec, gens[2], count)
            return _invariant_segment(spec, _as_x0(x0, spec.dim, count), t, h, gens, kill, keep_path=False)
        return np.vstack(_map_chunks(run, n, threads))
    return sample


def self_similar_sampler(spec: GeneratorSpec, h: float, threads: int = 1):
    """States at t of :func:`build_self_similar` paths."""
    def sample(x0, t, n, seed):
        return np.array([p.state_at(t) for p in build_self_similar_batch(spec, x0, t, h, n, seed, threads)])
    return sample


def time_changed_self_similar_sampler(spec: GeneratorSpec, h: float, threads: int = 1):
    """States at xbar-time t of forward_transform(inverse_transform(xbar)).

    The xbar paths are simulated on [0, t], mapped to the self-similar
    process and brought back by the forward time change.
    """
    def sample(x0, t, n, seed):
        xbar = simulate_invariant_batch(spec, x0, t, h, n, seed, threads)
        return np.array([_terminal(forward_transform(inverse_transform(p, spec.alpha), spec.alpha)) for p in xbar])
    return sample


def stable_sampler(spec: StableSpec, h: float, threads: int = 1):
    def sample(x0, t, n, seed):
        def run(c, count):
            gen = rngmod.stream(seed, c, rngmod.STABLE)
            return _stable_segment(spec, _as_x0(x0, spec.dim, count), t, h, gen, keep_path=False)
        return np.vstack(_map_chunks(run, n, threads))
    return sample


def time_changed_stable_paths(spec: StableSpec, x0, t: float, h: float, n: int, seed=None,
                              threads: int = 1) -> list[CadlagPath]:
    """forward_transform of stable paths, long enough to reach xbar-time t."""
    alpha = spec.alpha
    step = max(t * float(np.linalg.norm(x0)) ** (1.0 / alpha), 10 * h)

    def clock(p):
        return compute_A(p, alpha).value[-1]

    def run(c, count):
        gen = rngmod.stream(seed, c, rngmod.STABLE)
        xs = _stable_segment(spec, _as_x0(x0, spec.dim, count), step, h, gen)
        xs = _extend_until(xs, clock, t, step,
                           lambda idx, x0s, offset, length: _stable_segment(spec, x0s, length, h, gen))
        return [forward_transform(p, alpha) for p in xs]

    return _flatten(_map_chunks(run, n, threads))


def time_changed_stable_sampler(spec: StableSpec, h: float, threads: int = 1):
    def sample(x0, t, n, seed):
        return np.array([p.state_at(t) for p in time_changed_stable_paths(spec, x0, t, h, n, seed, threads)])
    return sample
