import numpy as np
import pytest

from gainorder import BernoulliGain, Exponential, NakagamiGain, PointMass
from gainorder.classifier import (
    BCScenario,
    ICScenario,
    WTCScenario,
    classify_bc,
    classify_ic_strong,
    classify_ic_very_strong,
    classify_wtc,
    interference_ratio_distribution,
)


def exp_ic(m11, m12, m21, m22, p1=1.0, p2=1.0, dependence="independent"):
    return ICScenario(
        h11=Exponential(m11),
        h12=Exponential(m12),
        h21=Exponential(m21),
        h22=Exponential(m22),
        p1=p1,
        p2=p2,
        dependence=dependence,
    )


class TestClassifyBC:
    def test_two_exponentials_degraded(self):
        report = classify_bc(BCScenario((Exponential(1.0), Exponential(2.0)), power=1.0))
        assert report.verdict
        assert report.permutation == (1, 2)

    def test_nakagami_chain_from_magnitude_example(self):
        gains = (NakagamiGain(0.5, 1.0), NakagamiGain(1.0, 2.0), NakagamiGain(1.0, 3.0))
        report = classify_bc(BCScenario(gains, power=1.0))
        assert report.verdict
        assert report.permutation == (1, 2, 3)

    def test_crossing_pair_not_orderable(self):
        report = classify_bc(BCScenario((Exponential(1.0), NakagamiGain(2.0, 1.0)), power=1.0))
        assert not report.verdict
        assert report.witnesses  # incomparable pair exhibited

    def test_verdict_invariant_under_user_permutation(self):
        gains = (Exponential(2.0), Exponential(0.5), Exponential(1.0))
        forward = classify_bc(BCScenario(gains, power=1.0))
        backward = classify_bc(BCScenario(tuple(reversed(gains)), power=1.0))
        assert forward.verdict and backward.verdict
        # both permutations chain the same distributions weakest-first
        assert [gains[i - 1] for i in forward.permutation] == [
            tuple(reversed(gains))[i - 1] for i in backward.permutation
        ]

    def test_symbolic_region_note_present(self):
        report = classify_bc(BCScenario((Exponential(1.0), Exponential(2.0)), power=1.0))
        assert any("f_VX" in note for note in report.notes)

    def test_scenario_validation(self):
        with pytest.raises(ValueError):
            BCScenario((Exponential(1.0),), power=1.0)
        with pytest.raises(ValueError):
            BCScenario((Exponential(1.0), Exponential(2.0)), power=0.0)

    def test_degraded_chain_orders_comonotone_samples_pathwise(self):
        from gainorder.coupling import comonotone_samples

        gains = (NakagamiGain(0.5, 1.0), NakagamiGain(1.0, 2.0), NakagamiGain(1.0, 3.0))
        report = classify_bc(BCScenario(gains, power=1.0))
        assert report.verdict
        chain = [gains[i - 1] for i in report.permutation]
        rng = np.random.default_rng(55)
        u = np.clip(rng.random(100_000), 1e-12, 1 - 1e-12)
        for weak, strong in zip(chain[:-1], chain[1:]):
            h1, h2 = comonotone_samples(weak, strong, u)
            assert np.mean(h1 <= h2) == 1.0


class TestClassifyICStrong:
    def test_exponential_means_1221_strong(self):
        report = classify_ic_strong(exp_ic(1.0, 2.0, 2.0, 1.0))
        assert report.verdict

    def test_reversed_means_not_strong(self):
        report = classify_ic_strong(exp_ic(2.0, 1.0, 1.0, 2.0))
        assert not report.verdict
        assert report.witnesses

    def test_point_mass_perfect_csit_reduction(self):
        s = ICScenario(PointMass(1.0), PointMass(2.0), PointMass(2.0), PointMass(1.0), 1.0, 1.0)
        assert classify_ic_strong(s).verdict
        # equals the deterministic scalar comparisons h21 >= h11 and h12 >= h22
        s_bad = ICScenario(PointMass(2.0), PointMass(1.0), PointMass(1.0), PointMass(2.0), 1.0, 1.0)
        assert not classify_ic_strong(s_bad).verdict

    def test_binary_fading_strong(self):
        s = ICScenario(
            BernoulliGain(0.5), BernoulliGain(1.0), BernoulliGain(1.0), BernoulliGain(0.5),
            1.0, 1.0,
        )
        assert classify_ic_strong(s).verdict

    def test_comonotone_mode_rejected(self):
        with pytest.raises(ValueError, match="independent"):
            classify_ic_strong(exp_ic(1.0, 2.0, 2.0, 1.0, dependence="comonotone"))


class TestClassifyICVeryStrong:
    @pytest.mark.parametrize("a", [0.1, 0.3, 0.5])
    def test_symmetric_exponentials_small_direct_gain(self, a):
        report = classify_ic_very_strong(exp_ic(a, 1.0, 1.0, a))
        assert report.verdict
        assert report.confidence == "analytic"

    def test_a_07_fails(self):
        report = classify_ic_very_strong(exp_ic(0.7, 1.0, 1.0, 0.7))
        assert not report.verdict
        # CCDF difference dips to about -0.04 near h = 0.5
        assert any(0.1 < w < 2.0 for w in report.witnesses)

    @pytest.mark.parametrize("power,expected", [(1.0, True), (10.0, True), (50.0, True), (100.0, False)])
    def test_power_sweep_a_01(self, power, expected):
        report = classify_ic_very_strong(exp_ic(0.1, 1.0, 1.0, 0.1, p1=power, p2=power))
        assert report.verdict is expected

    def test_point_mass_reduction(self):
        # z1 = 2 / (1 + 1*1) = 1 >= h11 = 1 and symmetric
        s = ICScenario(PointMass(1.0), PointMass(2.0), PointMass(2.0), PointMass(1.0), 1.0, 1.0)
        assert classify_ic_very_strong(s).verdict

    def test_monte_carlo_fallback_flagged_statistical(self):
        s = ICScenario(
            h11=Exponential(0.05),
            h12=NakagamiGain(2.0, 1.0),
            h21=NakagamiGain(2.0, 1.0),
            h22=Exponential(0.05),
            p1=1.0,
            p2=1.0,
        )
        report = classify_ic_very_strong(s, seed=3, mc_samples=200_000)
        assert report.confidence == "statistical"
        repeat = classify_ic_very_strong(s, seed=3, mc_samples=200_000)
        assert report.verdict == repeat.verdict

    def test_comonotone_mode_records_pinned_joint(self):
        report = classify_ic_very_strong(exp_ic(0.1, 1.0, 1.0, 0.1, dependence="comonotone"))
        assert report.verdict
        assert any("min{F_Z1, F_H22}" in note for note in report.notes)


class TestInterferenceRatio:
    def test_zero_power_returns_numerator(self):
        num = Exponential(1.5)
        dist, exact = interference_ratio_distribution(num, Exponential(1.0), 0.0)
        assert dist is num and exact

    def test_exponential_pair_closed_form(self):
        dist, exact = interference_ratio_distribution(Exponential(1.0), Exponential(0.1), 1.0)
        assert exact
        assert dist.to_spec()["family"] == "ratio_exp_exp"

    def test_point_mass_denominator_scales_exponential(self):
        dist, exact = interference_ratio_distribution(Exponential(2.0), PointMass(1.0), 1.0)
        assert exact
        assert dist == Exponential(1.0)

    def test_mc_fallback_matches_exact_route(self):
        exact_dist, _ = interference_ratio_distribution(Exponential(1.0), Exponential(0.1), 1.0)
        mc_dist, exact = interference_ratio_distribution(
            NakagamiGain(1.0, 1.0), NakagamiGain(1.0, 0.1), 1.0, mc_samples=200_000, seed=9
        )
        assert not exact
        xs = np.linspace(0.01, 5.0, 64)
        gap = np.max(np.abs(np.asarray(mc_dist.cdf(xs)) - np.asarray(exact_dist.cdf(xs))))
        assert gap < 0.005


class TestClassifyWTC:
    def test_dominating_legitimate_channel(self):
        report = classify_wtc(WTCScenario(Exponential(2.0), Exponential(1.0), 1.0))
        assert report.verdict

    def test_equal_gains_boundary(self):
        report = classify_wtc(WTCScenario(Exponential(1.0), Exponential(1.0), 1.0))
        assert report.verdict

    def test_reversed_not_degraded(self):
        report = classify_wtc(WTCScenario(Exponential(1.0), Exponential(2.0), 1.0))
        assert not report.verdict
        assert report.witnesses

    def test_report_serializes(self):
        report = classify_wtc(WTCScenario(Exponential(2.0), Exponential(1.0), 1.0))
        payload = report.to_json()
        assert payload["topology"] == "wtc"
        assert payload["verdict"] is True
        assert payload["order_checks"][0]["relation"] == "first_leq"
