import numpy as np
import pytest
from scipy import stats

from isoss.laws import JumpLaw
from isoss.paths import classify_jumps, geodesic_angle
from isoss.spherical import (
    AngularSpec, final_angles, sample_angular_jump, sbm_step, simulate_angular, simulate_angular_batch,
)
from isoss.stats import ks_two_sample


def random_rotation(d, seed):
    q, r = np.linalg.qr(np.random.default_rng(seed).standard_normal((d, d)))
    return q * np.sign(np.diag(r))


class TestSteps:
    def test_zero_diffusion_is_exact_copy(self):
        theta = np.array([0.6, 0.0, 0.8])
        assert np.array_equal(sbm_step(theta, 0.0, 0.1, np.random.default_rng(0)), theta)

    def test_step_stays_on_sphere(self):
        gen = np.random.default_rng(1)
        theta = np.array([0.0, 0.0, 1.0])
        for _ in range(200):
            theta = sbm_step(theta, 3.0, 0.05, gen)
            assert abs(np.linalg.norm(theta) - 1) < 1e-12

    def test_circle_variance(self):
        # on the circle the geodesic step is exact: the angle is N(0, 2 c t)
        t = 0.1
        theta = final_angles(AngularSpec(2, c_sph=1.0), [1.0, 0.0], t, 1e-3, 100_000, seed=11)
        phi = np.arctan2(theta[:, 1], theta[:, 0])
        assert abs(phi.var() / (2 * t) - 1) < 0.03


class TestAngularJump:
    def test_antipode_on_circle(self):
        out = sample_angular_jump([0.0, 1.0], np.pi, np.random.default_rng(0))
        np.testing.assert_allclose(out, [0.0, -1.0], atol=1e-15)

    def test_quarter_turn_is_orthogonal(self):
        out = sample_angular_jump([0.0, 0.0, 0.0, 1.0], np.pi / 2, np.random.default_rng(0))
        assert abs(out[-1]) < 1e-10

    def test_angle_and_longitude_uniformity(self):
        gen = np.random.default_rng(5)
        delta = 1.1
        theta0 = np.array([0.0, 0.0, 1.0])
        out = np.array([sample_angular_jump(theta0, delta, gen) for _ in range(10_000)])
        assert np.abs(geodesic_angle(out, np.broadcast_to(theta0, out.shape)) - delta).max() < 1e-10
        counts = np.histogram(np.arctan2(out[:, 1], out[:, 0]), bins=20, range=(-np.pi, np.pi))[0]
        assert stats.chisquare(counts).pvalue > 0.01

    @pytest.mark.parametrize("delta", [0.0, -0.5, 4.0])
    def test_rejects_bad_angle(self, delta):
        with pytest.raises(ValueError):
            sample_angular_jump([1.0, 0.0], delta, np.random.default_rng(0))


class TestSimulateAngular:
    def test_constant_path(self):
        p = simulate_angular(AngularSpec(3), [0.0, 1.0, 0.0], 2.0, 0.1, rng=0)
        assert p.num_jumps == 0
        assert np.all(p.states == [0.0, 1.0, 0.0])

    def test_poisson_jump_count(self):
        spec = AngularSpec(3, jump_rate=2.0)
        paths = simulate_angular_batch(spec, [0.0, 0.0, 1.0], 10.0, 0.5, 10_000, seed=3)
        mean = np.mean([p.num_jumps for p in paths])
        assert abs(mean / 20 - 1) < 0.03

    def test_states_unit_and_jumps_angular(self):
        spec = AngularSpec(3, c_sph=0.7, jump_rate=4.0, jump_angle_law=JumpLaw("beta", {"a": 2, "b": 2}))
        paths = simulate_angular_batch(spec, [1.0, 0.0, 0.0], 2.0, 1e-2, 50, seed=8)
        for p in paths:
            assert np.abs(np.linalg.norm(p.states, axis=1) - 1).max() < 1e-12
            if p.num_jumps:
                assert set(classify_jumps(p.jump_left, p.jump_right)) == {"angular-only"}

    @pytest.mark.parametrize("d", [2, 3])
    def test_long_horizon_is_uniform(self, d):
        theta0 = np.eye(d)[-1]
        theta = final_angles(AngularSpec(d, c_sph=1.0), theta0, 50.0, 0.01, 2000, seed=d)
        if d == 2:
            p = stats.kstest(np.arctan2(theta[:, 1], theta[:, 0]), stats.uniform(-np.pi, 2 * np.pi).cdf).pvalue
        else:
            p = stats.kstest(theta[:, -1], stats.uniform(-1, 2).cdf).pvalue
        assert p > 0.01

    def test_rotation_equivariance(self):
        spec = AngularSpec(3, c_sph=0.4, jump_rate=2.0)
        phi = random_rotation(3, 0)
        theta0 = np.array([0.0, 0.6, 0.8])
        a = final_angles(spec, theta0, 0.5, 1e-2, 4000, seed=1)
        b = final_angles(spec, phi @ theta0, 0.5, 1e-2, 4000, seed=2)
        da = geodesic_angle(a, np.broadcast_to(theta0, a.shape))
        db = geodesic_angle(b, np.broadcast_to(phi @ theta0, b.shape))
        assert ks_two_sample(da, db).p_value > 0.01


def test_spec_validation():
    with pytest.raises(ValueError):
        AngularSpec(1)
    with pytest.raises(ValueError):
        AngularSpec(3, jump_angle_law=JumpLaw("uniform", {"low": 0.0, "high": 4.0}))
    with pytest.raises(ValueError):
        AngularSpec(3, c_sph=-1.0)
