import numpy as np
import pytest
from scipy import stats as sps

from isoss import rng as rngmod
from isoss.paths import CadlagPath
from isoss.stats import (
    JumpFraction, TestReport, independence_check, isotropy_check, ks_two_sample, multiplicative_invariance_check,
    passes, polar_functionals, self_similarity_check, simultaneous_jump_fraction, uniformity_meta_test,
)


# Closed-form samplers: Brownian motion (1/2-self-similar, isotropic) and the
# multiplicatively invariant process x0 * exp(W_t).
def brownian(drift=None):
    def sample(x0, t, n, seed):
        gen = np.random.default_rng(rngmod.as_seed_sequence(seed))
        z = np.sqrt(t) * gen.standard_normal((n, len(x0)))
        if drift is not None:
            z = z + t * np.asarray(drift)
        return x0 + z
    return sample


def geometric(x0, t, n, seed):
    gen = np.random.default_rng(rngmod.as_seed_sequence(seed))
    r = np.exp(np.sqrt(t) * gen.standard_normal(n))
    return r[:, None] * x0


def rotation(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


class TestKS:
    def test_identical_samples(self):
        r = ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert r.statistic == 0.0 and r.p_value == 1.0

    def test_disjoint_support(self):
        assert ks_two_sample(np.zeros(5), np.full(7, 10.0)).statistic == 1.0

    def test_step_difference(self):
        assert ks_two_sample([1, 2, 3], [1.5, 2.5, 3.5]).statistic == pytest.approx(1 / 3)

    def test_matches_limiting_kolmogorov_law(self):
        gen = np.random.default_rng(0)
        a, b = gen.normal(size=700), gen.normal(0.1, 1.0, size=450)
        ours = ks_two_sample(a, b)
        ref = sps.ks_2samp(a, b)
        assert ours.statistic == pytest.approx(ref.statistic, abs=1e-15)
        en = 700 * 450 / 1150
        assert ours.p_value == pytest.approx(sps.kstwobign.sf(np.sqrt(en) * ref.statistic), rel=1e-9)

    def test_ties_match_scipy(self):
        gen = np.random.default_rng(1)
        a, b = gen.integers(0, 5, 100), gen.integers(0, 5, 80)
        assert ks_two_sample(a, b).statistic == pytest.approx(sps.ks_2samp(a, b).statistic, abs=1e-15)

    def test_empty(self):
        with pytest.raises(ValueError):
            ks_two_sample([], [1.0])


class TestReportType:
    def test_validation(self):
        with pytest.raises(ValueError):
            TestReport("x", 0.0, 1.5, 1, 1)
        with pytest.raises(ValueError):
            TestReport("x", 0.0, 0.5, 0, 1)

    def test_bonferroni(self):
        # threshold 0.01 / k per report
        reps = [TestReport("a", 0, 0.004, 1, 1), TestReport("b", 0, 0.9, 1, 1)]
        assert not passes(reps)
        assert passes(reps + [TestReport("c", 0, 0.5, 1, 1)])
        assert passes(reps[:1], level=0.003)
        assert not reps[0].accepted()


class TestScalingChecks:
    x0 = np.array([1.0, 0.5])

    def test_identity_scaling_accepts(self):
        reps = self_similarity_check(brownian(), self.x0, 1.0, 1.0, 4000, 3, alpha=0.5)
        assert passes(reps)

    def test_brownian_is_half_self_similar(self):
        reps = self_similarity_check(brownian(), self.x0, 4.0, 0.5, 10_000, 4, alpha=0.5)
        assert passes(reps)

    def test_misscaled_rejects(self):
        reps = self_similarity_check(brownian(), self.x0, 4.0, 0.5, 10_000, 4, alpha=0.25)
        assert max(r.p_value for r in reps) < 0.01

    def test_rejects_nonpositive_lambda(self):
        with pytest.raises(ValueError):
            self_similarity_check(brownian(), self.x0, 0.0, 1.0, 10, 0, alpha=0.5)

    def test_multiplicative_invariance(self):
        assert passes(multiplicative_invariance_check(geometric, self.x0, 2.0, 0.7, 4000, 5))
        assert passes(multiplicative_invariance_check(brownian(), self.x0, 1.0, 0.7, 4000, 5))
        assert not passes(multiplicative_invariance_check(brownian(), self.x0, 2.0, 0.7, 4000, 5))


class TestIsotropy:
    x0 = np.array([1.0, 0.0])

    def test_identity(self):
        assert isotropy_check(brownian(), self.x0, np.eye(2), 1.0, 3000, 1).accepted()

    def test_brownian_isotropic(self):
        assert isotropy_check(brownian(), self.x0, rotation(1.0), 1.0, 10_000, 2).accepted()

    def test_drift_breaks_isotropy(self):
        assert not isotropy_check(brownian(drift=[1.0, 0.0]), self.x0, rotation(2.0), 1.0, 10_000, 2).accepted()

    def test_requires_orthogonal(self):
        with pytest.raises(ValueError):
            isotropy_check(brownian(), self.x0, 2 * np.eye(2), 1.0, 10, 0)


class TestIndependence:
    def test_perfect_dependence(self):
        x = np.random.default_rng(0).normal(size=300)
        r = independence_check(np.column_stack([x, x ** 3]), num_perm=999, seed=1)
        assert r.p_value == pytest.approx(1 / 1000)
        assert r.statistic == pytest.approx(1.0)

    def test_independent_not_rejected(self):
        pairs = np.random.default_rng(2).normal(size=(500, 2))
        assert independence_check(pairs, seed=3).accepted()

    def test_rank_invariance(self):
        pairs = np.random.default_rng(4).normal(size=(200, 2))
        pairs[:, 1] += 0.2 * pairs[:, 0]
        a = independence_check(pairs, num_perm=499, seed=7)
        b = independence_check(np.column_stack([np.exp(pairs[:, 0]), pairs[:, 1] ** 3]), num_perm=499, seed=7)
        assert a.p_value == b.p_value and a.statistic == pytest.approx(b.statistic, abs=1e-14)

    def test_validation(self):
        with pytest.raises(ValueError):
            independence_check(np.zeros((10, 2)), num_perm=100)

    def test_constant_coordinate_is_not_evidence(self):
        pairs = np.column_stack([np.arange(20.0), np.ones(20)])
        assert independence_check(pairs, seed=0).p_value == 1.0

    def test_polar_functionals(self):
        out = polar_functionals(np.array([[0.0, 2.0], [np.nan, 1.0], [1.0, 0.0]]), [1.0, 0.0])
        np.testing.assert_allclose(out, [[np.log(2), np.pi / 2], [0.0, 0.0]], atol=1e-15)


class TestJumpFraction:
    def test_single_joint_jump(self):
        p = CadlagPath([0.0, 1.0], [[0.0, 1.0], [2.0, 0.0]], [1.0], [[0.0, 1.0]], [[2.0, 0.0]])
        assert simultaneous_jump_fraction(p) == JumpFraction(1, 1)
        assert simultaneous_jump_fraction(p).fraction == 1.0

    def test_empty_is_flagged(self):
        f = simultaneous_jump_fraction(CadlagPath([0.0, 1.0], [[0.0, 1.0]] * 2))
        assert f.empty and f.fraction == 0.0


def test_uniformity_meta_test():
    u = np.random.default_rng(0).random(100)
    assert uniformity_meta_test(u).accepted()
    assert not uniformity_meta_test(u ** 3).accepted()
