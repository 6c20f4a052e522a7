"""Generator of the G-invariant process applied to product test functions.

Test functions have the form f(x) = g(log|x|) * h(<x/|x|, o>) with o the
last basis vector, g a polynomial times a Gaussian bump and h a polynomial.
For such f the diffusion part has a closed form and the jump part reduces to
one-dimensional quadratures over the jump laws. The killing term -gamma f is
not included.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .factory import GeneratorSpec, invariant_sampler


@dataclass(frozen=True)
class TestFunction:
    """f(x) = radial(log|x|) * angular(cos angle(x, o)).

    radial(s) = poly(s) * exp(-(s - center)^2 / (2 width^2)); coefficient
    lists run from the constant term upwards.
    """

    radial_poly: tuple = (1.0,)
    center: float = 0.0
    width: float = 1.0
    angular_poly: tuple = (1.0,)

    __test__ = False

    def _bump(self, s):
        u = (np.asarray(s, dtype=float) - self.center) / self.width
        e = np.exp(-0.5 * u * u)
        return e, -u / self.width * e, (u * u - 1.0) / self.width ** 2 * e

    def g(self, s, order: int = 0):
        e, e1, e2 = self._bump(s)
        p = np.asarray(self.radial_poly, dtype=float)
        p0 = P.polyval(s, p)
        if order == 0:
            return p0 * e
        p1 = P.polyval(s, P.polyder(p))
        if order == 1:
            return p1 * e + p0 * e1
        return P.polyval(s, P.polyder(p, 2)) * e + 2 * p1 * e1 + p0 * e2

    def h(self, c, order: int = 0):
        q = np.asarray(self.angular_poly, dtype=float)
        return P.polyval(c, P.polyder(q, order) if order else q)

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = np.linalg.norm(x, axis=1)
        return self.g(np.log(r)) * self.h(x[:, -1] / r)


def sphere_coordinate_moment(k: int, n: int) -> float:
    """E[v^k] for v a coordinate of a uniform point on S^{n-1} (n >= 1)."""
    if k % 2:
        return 0.0
    m = k // 2
    out = 1.0
    for i in range(m):
        out *= (2 * i + 1) / (n + 2 * i)
    return out


def _angular_average(f: TestFunction, c: float, delta: float, d: int) -> float:
    """E h(cos angle to o) after rotating by delta in a uniform tangent direction.

    The new cosine is c cos(delta) + sin(delta) sqrt(1 - c^2) v with v a
    coordinate of a uniform point on S^{d-2}; h is polynomial, so the average
    is a finite sum of moments of v.
    """
    a = c * np.cos(delta)
    b = np.sin(delta) * np.sqrt(max(0.0, 1.0 - c * c))
    q = np.asarray(f.angular_poly, dtype=float)
    composed = np.zeros(1)
    for k, coef in enumerate(q):
        composed = P.polyadd(composed, coef * P.polypow([a, b], k))
    return float(sum(cf * sphere_coordinate_moment(k, d - 1) for k, cf in enumerate(composed)))


def generator_apply_numeric(spec: GeneratorSpec, f: TestFunction, x, full_output: bool = False):
    """L f(x) for the xbar generator given by ``spec``.

    Returns the value, or ``(value, abs_quadrature_error)`` with ``full_output``.
    """
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    s, c = np.log(r), x[-1] / r
    d = spec.dim
    g0, h0 = float(f.g(s)), float(f.h(c))
    radial_diff = 0.5 * spec.a11 * float(f.g(s, 2)) + spec.c1 * float(f.g(s, 1))
    lap = (1 - c * c) * float(f.h(c, 2)) - (d - 1) * c * float(f.h(c, 1))
    value = radial_diff * h0 + spec.angular.c_sph * g0 * lap
    err = 0.0
    if spec.radial_jump_rate > 0:
        m, e = spec.radial_jump_law.expect(lambda u: float(f.g(s + u)) - g0)
        value += spec.radial_jump_rate * m * h0
        err += spec.radial_jump_rate * e * abs(h0)
    ang = spec.angular
    if ang.jump_rate > 0:
        m, e = ang.jump_angle_law.expect(lambda dl: _angular_average(f, c, dl, d) - h0)
        value += ang.jump_rate * m * g0
        err += ang.jump_rate * e * abs(g0)
    return (value, err) if full_output else value


def mc_generator_estimate(spec: GeneratorSpec, f: TestFunction, x, h: float, n: int, seed=None):
    """(E f(xbar_h) - f(x)) / h from ``n`` simulated paths, with its standard error.

    Killed paths count as f = 0.
    """
    x = np.asarray(x, dtype=float)
    states = invariant_sampler(spec, h)(x, h, n, seed)
    vals = np.zeros(len(states))
    alive = np.all(np.isfinite(states), axis=1)
    vals[alive] = f(states[alive])
    diff = (vals - float(f(x)[0])) / h
    return float(diff.mean()), float(diff.std(ddof=1) / np.sqrt(n))
