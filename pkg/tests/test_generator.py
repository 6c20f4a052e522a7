import numpy as np
import pytest

from isoss.factory import GeneratorSpec
from isoss.generator import TestFunction, generator_apply_numeric, mc_generator_estimate, sphere_coordinate_moment
from isoss.laws import JumpLaw
from isoss.spherical import AngularSpec

X = np.array([0.3, 0.4, 1.0])
S, C = np.log(np.linalg.norm(X)), X[-1] / np.linalg.norm(X)
FLAT = np.inf  # width of a bump that is identically one


def spec(**kw):
    ang = kw.pop("angular", AngularSpec(3))
    return GeneratorSpec(3, 1.0, angular=ang, **kw)


def test_constant_function_is_annihilated():
    full = spec(a11=0.4, c1=0.3, angular=AngularSpec(3, c_sph=0.7, jump_rate=2.0), radial_jump_rate=1.5, gamma=2.0)
    assert generator_apply_numeric(full, TestFunction((1.0,), 0.0, FLAT), X) == pytest.approx(0.0, abs=1e-12)


def test_drift_only_on_log_radius():
    f = TestFunction((0.0, 1.0), 0.0, FLAT)
    assert generator_apply_numeric(spec(c1=0.37), f, X) == pytest.approx(0.37, abs=1e-14)


def test_second_order_radial():
    f = TestFunction((0.0, 0.0, 1.0), 0.0, FLAT)  # (log r)^2
    assert generator_apply_numeric(spec(a11=0.5, c1=0.2), f, X) == pytest.approx(0.5 + 0.4 * S, rel=1e-12)


@pytest.mark.parametrize("poly, eigen", [((0.0, 1.0), -2.0), ((-0.5, 0.0, 1.5), -6.0)])
def test_zonal_harmonics_are_eigenfunctions(poly, eigen):
    f = TestFunction((1.0,), 0.0, FLAT, poly)
    val = generator_apply_numeric(spec(angular=AngularSpec(3, c_sph=0.8)), f, X)
    assert val == pytest.approx(0.8 * eigen * float(f(X)[0]), rel=1e-12)


def test_angular_jump_of_first_harmonic():
    # rotating by delta multiplies the average of cos(angle to o) by cos(delta)
    law = JumpLaw("uniform", {"low": 0.2, "high": 2.0})
    f = TestFunction((1.0,), 0.0, FLAT, (0.0, 1.0))
    val, err = generator_apply_numeric(spec(angular=AngularSpec(3, jump_rate=3.0, jump_angle_law=law)), f, X,
                                       full_output=True)
    mean_cos = (np.sin(2.0) - np.sin(0.2)) / 1.8
    assert val == pytest.approx(3.0 * C * (mean_cos - 1), rel=1e-10)
    assert err < 1e-8


def test_radial_jump_polynomial():
    law = JumpLaw("normal", {"mean": 0.3, "std": 0.5})
    f = TestFunction((0.0, 0.0, 1.0), 0.0, FLAT)
    val, err = generator_apply_numeric(spec(radial_jump_rate=2.0, radial_jump_law=law), f, X, full_output=True)
    assert val == pytest.approx(2.0 * (2 * S * 0.3 + 0.09 + 0.25), rel=1e-10)
    assert err < 1e-8


@pytest.mark.parametrize("k, n, expected", [(2, 3, 1 / 3), (4, 3, 1 / 5), (2, 2, 1 / 2), (4, 2, 3 / 8), (3, 3, 0.0)])
def test_sphere_moments(k, n, expected):
    assert sphere_coordinate_moment(k, n) == pytest.approx(expected)
    v = np.random.default_rng(k + n).standard_normal((200_000, n))
    v = v[:, 0] / np.linalg.norm(v, axis=1)
    assert abs(np.mean(v ** k) - expected) < 5e-3


def test_test_function_derivatives():
    f = TestFunction((1.0, 0.5), 0.2, 0.6, (0.5, -1.0, 0.0, 2.0))
    s, eps = 0.13, 1e-5
    assert float(f.g(s, 1)) == pytest.approx((f.g(s + eps) - f.g(s - eps)) / (2 * eps), rel=1e-7)
    assert float(f.g(s, 2)) == pytest.approx((f.g(s + eps) - 2 * f.g(s) + f.g(s - eps)) / eps ** 2, rel=1e-4)


def test_matches_short_time_monte_carlo():
    ang = AngularSpec(3, jump_rate=5.0, jump_angle_law=JumpLaw("uniform", {"low": 0.0, "high": np.pi}))
    g = spec(angular=ang, radial_jump_rate=5.0, radial_jump_law=JumpLaw("normal", {"mean": 0.3, "std": 0.5}))
    f = TestFunction((0.0, 1.0), 0.5, 0.8, (1.0, 0.0, 1.0))
    exact = generator_apply_numeric(g, f, X)
    mean, se = mc_generator_estimate(g, f, X, 1e-3, 200_000, seed=1)
    assert abs(mean - exact) < 4 * se + 0.02 * abs(exact)
