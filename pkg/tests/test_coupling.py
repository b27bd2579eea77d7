import math

import numpy as np
import pytest

from gainorder import BernoulliGain, Exponential, NakagamiGain
from gainorder.coupling import (
    comonotone_sample,
    comonotone_samples,
    copula_joint_ccdf,
    copula_joint_cdf,
    maximal_coupling_sample,
    maximal_coupling_samples,
    maximal_coupling_spec,
    min_copula,
    product_copula,
    residual_supports_separated,
    verify_copula_axioms,
)
from gainorder.stochastic_order import check_usual_order, total_variation


def open_uniform(rng, n):
    return np.clip(rng.random(n), 1e-12, 1.0 - 1e-12)


def ks_distance(samples, cdf):
    xs = np.sort(np.asarray(samples))
    n = xs.size
    f = np.asarray(cdf(xs))
    return float(max(np.max(np.arange(1, n + 1) / n - f), np.max(f - np.arange(n) / n)))


class TestMaximalCoupling:
    def test_overlap_mass_closed_form(self):
        spec = maximal_coupling_spec(Exponential(1.0), Exponential(2.0))
        assert spec.p == pytest.approx(0.75, abs=1e-10)
        assert spec.p + total_variation(Exponential(1.0), Exponential(2.0)) == pytest.approx(
            1.0, abs=1e-10
        )

    def test_identical_marginals_always_equal(self):
        spec = maximal_coupling_spec(Exponential(1.3), Exponential(1.3))
        assert spec.p == 1.0
        rng = np.random.default_rng(5)
        h1, h2, eq = maximal_coupling_samples(spec, open_uniform(rng, 500), open_uniform(rng, 500))
        assert np.all(eq)
        assert np.all(h1 == h2)

    def test_equal_branch_sets_h1_equals_h2_exactly(self):
        spec = maximal_coupling_spec(Exponential(1.0), Exponential(2.0))
        s = maximal_coupling_sample(spec, u_select=0.2, u_value=0.6)
        assert s.equal_flag is True
        assert s.h1 == s.h2

    def test_equality_fraction_matches_overlap(self):
        spec = maximal_coupling_spec(Exponential(1.0), Exponential(2.0))
        rng = np.random.default_rng(17)
        n = 100_000
        _, _, eq = maximal_coupling_samples(spec, open_uniform(rng, n), open_uniform(rng, n))
        p = spec.p
        assert abs(eq.mean() - p) <= 3.0 * math.sqrt(p * (1 - p) / n)

    def test_residual_branch_strictly_ordered(self):
        # residual supports split at 2 ln 2, so the unequal branch is always h1 < h2
        spec = maximal_coupling_spec(Exponential(1.0), Exponential(2.0))
        rng = np.random.default_rng(23)
        n = 20_000
        u_sel = np.full(n, 0.99)  # force the residual branch (p = 0.75)
        h1, h2, eq = maximal_coupling_samples(spec, u_sel, open_uniform(rng, n))
        assert not np.any(eq)
        assert np.all(h1 < h2)
        crossing = 2.0 * math.log(2.0)
        assert np.all(h1 <= crossing + 1e-9)
        assert np.all(h2 >= crossing - 1e-9)

    def test_marginals_preserved(self):
        d1, d2 = Exponential(1.0), Exponential(2.0)
        spec = maximal_coupling_spec(d1, d2)
        rng = np.random.default_rng(31)
        n = 100_000
        h1, h2, _ = maximal_coupling_samples(spec, open_uniform(rng, n), open_uniform(rng, n))
        crit = 1.628 / math.sqrt(n)  # 1% KS level
        assert ks_distance(h1, d1.cdf) < crit
        assert ks_distance(h2, d2.cdf) < crit

    def test_mixture_reconstructs_marginal_cdf(self):
        # p * shared + (1 - p) * residual_k equals F_k pointwise
        spec = maximal_coupling_spec(Exponential(1.0), Exponential(2.0))
        xs = np.linspace(0.01, 12.0, 200)
        for which, d in ((1, spec.d1), (2, spec.d2)):
            mix = spec.p * spec.shared_cdf(xs) + (1 - spec.p) * spec.residual_cdf(which, xs)
            assert np.max(np.abs(mix - np.asarray(d.cdf(xs)))) < 1e-12

    def test_discrete_inputs_rejected(self):
        with pytest.raises(ValueError, match="continuous"):
            maximal_coupling_spec(BernoulliGain(0.5), Exponential(1.0))

    def test_bad_uniforms_rejected(self):
        spec = maximal_coupling_spec(Exponential(1.0), Exponential(2.0))
        with pytest.raises(ValueError):
            maximal_coupling_sample(spec, 0.0, 0.5)
        with pytest.raises(ValueError):
            maximal_coupling_sample(spec, 0.5, 1.0)


class TestComonotoneCoupling:
    def test_identical_inputs_tie(self):
        d = Exponential(1.7)
        s = comonotone_sample(d, d, 0.42)
        assert s.h1 == s.h2
        assert s.equal_flag is None

    def test_exponential_medians(self):
        s = comonotone_sample(Exponential(1.0), Exponential(2.0), 0.5)
        assert s.h1 == pytest.approx(math.log(2.0), rel=1e-12)
        assert s.h2 == pytest.approx(2.0 * math.log(2.0), rel=1e-12)

    def test_bernoulli_generalized_inverses(self):
        s = comonotone_sample(BernoulliGain(0.3), BernoulliGain(0.7), 0.5)
        assert (s.h1, s.h2) == (0.0, 1.0)

    def test_pathwise_order_for_first_leq_pairs(self):
        pairs = [
            (Exponential(1.0), Exponential(2.0)),
            (BernoulliGain(0.3), BernoulliGain(0.7)),
            (NakagamiGain(2.0, 1.0), NakagamiGain(2.0, 3.0)),
        ]
        rng = np.random.default_rng(99)
        for d1, d2 in pairs:
            assert check_usual_order(d1, d2).first_leq
            h1, h2 = comonotone_samples(d1, d2, open_uniform(rng, 50_000))
            assert np.mean(h1 <= h2) == 1.0

    def test_joint_cdf_matches_min_copula(self):
        # empirical joint CDF of comonotone samples vs min{F1, F2} on a quantile grid
        d1, d2 = Exponential(1.0), Exponential(2.0)
        rng = np.random.default_rng(123)
        n = 100_000
        h1, h2 = comonotone_samples(d1, d2, open_uniform(rng, n))
        levels = np.arange(1, 21) / 21.0
        x_grid = np.asarray(d1.quantile(levels))
        y_grid = np.asarray(d2.quantile(levels))
        worst = 0.0
        for x in x_grid:
            for y in y_grid:
                emp = np.mean((h1 <= x) & (h2 <= y))
                worst = max(worst, abs(emp - float(copula_joint_cdf(d1, d2, x, y))))
        assert worst <= 0.01


class TestCopula:
    def test_margin_as_h1_grows(self):
        d1, d2 = Exponential(1.0), Exponential(2.0)
        assert copula_joint_cdf(d1, d2, 1e9, 1.0) == pytest.approx(float(d2.cdf(1.0)), abs=1e-12)

    def test_zero_boundary(self):
        d1, d2 = Exponential(1.0), Exponential(2.0)
        assert copula_joint_cdf(d1, d2, 1.0, 0.0) == 0.0

    def test_exponential_pair_value(self):
        d1, d2 = Exponential(1.0), Exponential(2.0)
        expected = min(1.0 - math.exp(-1.0), 1.0 - math.exp(-0.5))
        assert copula_joint_cdf(d1, d2, 1.0, 1.0) == pytest.approx(expected, abs=1e-14)

    def test_joint_ccdf_companion(self):
        d1, d2 = Exponential(1.0), Exponential(2.0)
        assert copula_joint_ccdf(d1, d2, 1.0, 1.0) == pytest.approx(
            min(math.exp(-1.0), math.exp(-0.5)), abs=1e-14
        )

    def test_min_copula_passes_axioms(self):
        report = verify_copula_axioms(min_copula)
        assert report.passed

    def test_product_copula_passes_axioms(self):
        report = verify_copula_axioms(product_copula)
        assert report.passed

    def test_average_fails_boundary(self):
        report = verify_copula_axioms(lambda u, v: (np.asarray(u) + np.asarray(v)) / 2.0)
        assert not report.passed
        assert not report.grounded_ok
        assert report.first_violation is not None

    def test_oversized_fgm_fails_two_increasing(self):
        def fgm(u, v):
            u = np.asarray(u, dtype=float)
            v = np.asarray(v, dtype=float)
            return u * v * (1.0 + 5.0 * (1.0 - u) * (1.0 - v))

        report = verify_copula_axioms(fgm)
        assert not report.passed
        assert report.grounded_ok and report.margins_ok
        assert not report.two_increasing_ok


class TestResidualSeparation:
    def test_ordered_exponentials_separated(self):
        assert residual_supports_separated(Exponential(1.0), Exponential(2.0)) is True

    def test_identical_vacuously_separated(self):
        d = Exponential(1.0)
        assert residual_supports_separated(d, d) is True

    def test_crossing_pair_not_separated(self):
        assert residual_supports_separated(Exponential(1.0), NakagamiGain(2.0, 1.0)) is False

    def test_iff_with_usual_order_on_continuous_pairs(self):
        pairs = [
            (Exponential(1.0), Exponential(2.0)),
            (Exponential(2.0), Exponential(1.0)),
            (Exponential(1.0), NakagamiGain(2.0, 1.0)),
            (NakagamiGain(0.5, 1.0), NakagamiGain(1.0, 2.0)),
            (NakagamiGain(2.0, 1.0), NakagamiGain(2.0, 3.0)),
            (Exponential(1.0), Exponential(1.0)),
        ]
        for d1, d2 in pairs:
            verdict = check_usual_order(d1, d2)
            assert residual_supports_separated(d1, d2) == verdict.first_leq, (d1, d2)
