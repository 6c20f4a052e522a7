"""Monte Carlo checks of isotropy, self-similarity, multiplicative invariance,
radial/angular independence and jump simultaneity.

Distributional identities are tested on scalar functionals with the
two-sample Kolmogorov-Smirnov test; independence with a Spearman
permutation test. Every check returns :class:`TestReport` objects.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import special, stats as sps

from . import rng as rngmod
from .paths import DEFAULT_TOL, JOINT, CadlagPath, classify_jumps, geodesic_angle

LEVEL = 0.01

Sampler = Callable[[np.ndarray, float, int, object], np.ndarray]


@dataclass(frozen=True)
class TestReport:
    name: str
    statistic: float
    p_value: float
    n1: int
    n2: int
    params: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("sample sizes must be positive")

    def accepted(self, level: float = LEVEL) -> bool:
        return self.p_value > level

    def params_json(self) -> str:
        return json.dumps(self.params, sort_keys=True, default=float)


def passes(reports: Sequence[TestReport], level: float = LEVEL) -> bool:
    """Bonferroni: every report must have p > level / len(reports)."""
    return all(r.p_value > level / len(reports) for r in reports)


def default_probe(d: int) -> np.ndarray:
    v = np.arange(1.0, d + 1.0)
    return v / np.linalg.norm(v)


# ------------------------------------------------------------------- KS

def ks_two_sample(a, b, name: str = "ks_two_sample", params: dict | None = None) -> TestReport:
    """sup |F_a - F_b| with the asymptotic Kolmogorov p-value at n1 n2 / (n1 + n2)."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    n1, n2 = len(a), len(b)
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / n1
    cdf_b = np.searchsorted(b, pooled, side="right") / n2
    stat = float(np.max(np.abs(cdf_a - cdf_b)))
    en = n1 * n2 / (n1 + n2)
    p = float(np.clip(special.kolmogorov(np.sqrt(en) * stat), 0.0, 1.0))
    return TestReport(name, stat, p, n1, n2, dict(params or {}))


def ks_uniform(sample, low: float, high: float, name: str = "ks_uniform", params: dict | None = None) -> TestReport:
    """One-sample KS against Uniform(low, high) (scipy's exact/asymptotic p-value)."""
    sample = np.asarray(sample, dtype=float).ravel()
    res = sps.kstest(sample, sps.uniform(low, high - low).cdf)
    return TestReport(name, float(res.statistic), float(res.pvalue), len(sample), len(sample), dict(params or {}))


def _finite_rows(x: np.ndarray) -> np.ndarray:
    return x[np.all(np.isfinite(x), axis=1)]


def _two_samples(sample_a, sample_b):
    a, b = _finite_rows(sample_a), _finite_rows(sample_b)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("a sample has no surviving paths")
    return a, b


# ----------------------------------------------------- invariance checks

def self_similarity_check(sampler: Sampler, x0, lam: float, t_star: float, n: int, seed, alpha: float,
                          probe=None) -> list[TestReport]:
    """x_{lam t} from x0 against lam^alpha x_t from lam^-alpha x0.

    Returns a report on |x| and one on the probe coordinate.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    x0 = np.asarray(x0, dtype=float)
    probe = default_probe(len(x0)) if probe is None else np.asarray(probe, dtype=float)
    sa, sb = rngmod.split(seed, 2)
    a, b = _two_samples(sampler(x0, lam * t_star, n, sa), lam ** alpha * sampler(lam ** -alpha * x0, t_star, n, sb))
    params = {"lambda": lam, "t_star": t_star, "alpha": alpha}
    return [
        ks_two_sample(np.linalg.norm(a, axis=1), np.linalg.norm(b, axis=1), "self_similarity[norm]", params),
        ks_two_sample(a @ probe, b @ probe, "self_similarity[probe]", params),
    ]


def isotropy_check(sampler: Sampler, x0, phi, t_star: float, n: int, seed, probe=None) -> TestReport:
    """phi(x_t) from x0 against x_t from phi(x0), compared on a probe coordinate."""
    x0 = np.asarray(x0, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if not np.allclose(phi @ phi.T, np.eye(len(x0)), atol=1e-10):
        raise ValueError("phi must be orthogonal")
    probe = default_probe(len(x0)) if probe is None else np.asarray(probe, dtype=float)
    sa, sb = rngmod.split(seed, 2)
    a, b = _two_samples(sampler(x0, t_star, n, sa) @ phi.T, sampler(phi @ x0, t_star, n, sb))
    return ks_two_sample(a @ probe, b @ probe, "isotropy[probe]", {"t_star": t_star, "phi": phi.tolist()})


def multiplicative_invariance_check(sampler: Sampler, x0, lam: float, t_star: float, n: int, seed,
                                    probe=None) -> list[TestReport]:
    """lam * xbar_t from x0 against xbar_t from lam * x0, on |x| and the probe coordinate."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    x0 = np.asarray(x0, dtype=float)
    probe = default_probe(len(x0)) if probe is None else np.asarray(probe, dtype=float)
    sa, sb = rngmod.split(seed, 2)
    a, b = _two_samples(lam * sampler(x0, t_star, n, sa), sampler(lam * x0, t_star, n, sb))
    params = {"lambda": lam, "t_star": t_star}
    return [
        ks_two_sample(np.linalg.norm(a, axis=1), np.linalg.norm(b, axis=1), "multiplicative_invariance[norm]", params),
        ks_two_sample(a @ probe, b @ probe, "multiplicative_invariance[probe]", params),
    ]


# ----------------------------------------------------------- independence

def polar_functionals(states: np.ndarray, x0) -> np.ndarray:
    """Pairs (log(|x|/|x0|), geodesic angle between x and x0) for each finite row."""
    states = _finite_rows(np.asarray(states, dtype=float))
    x0 = np.asarray(x0, dtype=float)
    logr = np.log(np.linalg.norm(states, axis=1) / np.linalg.norm(x0))
    ang = geodesic_angle(states, np.broadcast_to(x0, states.shape))
    return np.column_stack([logr, ang])


def _spearman(rx: np.ndarray, ry: np.ndarray) -> np.ndarray:
    rx = rx - rx.mean(axis=-1, keepdims=True)
    ry = ry - ry.mean(axis=-1, keepdims=True)
    return np.sum(rx * ry, axis=-1) / np.sqrt(np.sum(rx * rx, axis=-1) * np.sum(ry * ry, axis=-1))


def independence_check(pairs, num_perm: int = 999, seed=None, name: str = "independence") -> TestReport:
    """Two-sided permutation test of Spearman's rank correlation.

    p = (1 + #{|rho_perm| >= |rho_obs|}) / (1 + num_perm).
    """
    pairs = np.asarray(pairs, dtype=float)
    if num_perm < 200:
        raise ValueError("num_perm must be at least 200")
    if pairs.ndim != 2 or pairs.shape[1] != 2 or len(pairs) < 3:
        raise ValueError("need at least three (x, y) pairs")
    rx = sps.rankdata(pairs[:, 0])
    ry = sps.rankdata(pairs[:, 1])
    if np.ptp(rx) == 0 or np.ptp(ry) == 0:
        # a constant coordinate carries no evidence of dependence
        return TestReport(name, 0.0, 1.0, len(pairs), len(pairs), {"num_perm": num_perm})
    gen = rngmod.stream(seed, 0, 0)
    obs = float(_spearman(rx, ry))
    perm = np.empty(num_perm)
    block = max(1, 2_000_000 // len(rx))
    for s in range(0, num_perm, block):
        k = min(block, num_perm - s)
        perm[s:s + k] = _spearman(rx, gen.permuted(np.tile(ry, (k, 1)), axis=1))
    count = int(np.sum(np.abs(perm) >= abs(obs) - 1e-12))
    p = (1 + count) / (1 + num_perm)
    return TestReport(name, obs, p, len(pairs), len(pairs), {"num_perm": num_perm})


# ------------------------------------------------------------------ jumps

@dataclass(frozen=True)
class JumpFraction:
    joint: int
    total: int

    @property
    def fraction(self) -> float:
        return self.joint / self.total if self.total else 0.0

    @property
    def empty(self) -> bool:
        return self.total == 0


def simultaneous_jump_fraction(paths: CadlagPath | Iterable[CadlagPath], tol_r: float = DEFAULT_TOL,
                               tol_theta: float = DEFAULT_TOL) -> JumpFraction:
    """Share of jump records in which radius and direction both move."""
    if isinstance(paths, CadlagPath):
        paths = [paths]
    joint = total = 0
    for p in paths:
        if p.num_jumps:
            cls = classify_jumps(p.jump_left, p.jump_right, tol_r, tol_theta)
            joint += int(np.sum(cls == JOINT))
            total += len(cls)
    return JumpFraction(joint, total)


# ------------------------------------------------------------ calibration

def uniformity_meta_test(p_values, name: str = "p_uniformity") -> TestReport:
    """KS of a collection of p-values against Uniform(0, 1)."""
    return ks_uniform(p_values, 0.0, 1.0, name)
