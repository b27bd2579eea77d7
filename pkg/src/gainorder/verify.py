"""Monte Carlo verification harness.

Every check is deterministic given (master seed, sample size): each test owns
an isolated RNG stream derived from the master seed and the test name, so the
suite can run concurrently and reruns are bit-identical.  Thresholds are
distribution-free KS/DKW-style bounds.  Negative controls deliberately break
a construction and are expected to fail their thresholds.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from .capacity import RateValue, c_of, exponential_rate_closed_form
from .classifier import ICScenario
from .coupling import (
    comonotone_samples,
    copula_joint_cdf,
    maximal_coupling_samples,
    maximal_coupling_spec,
)
from .distributions import BernoulliGain, Exponential, GainDistribution

__all__ = [
    "VerificationReport",
    "ks_statistic",
    "verify_same_marginals",
    "verify_strong_ic_independence",
    "mc_ergodic_rate",
    "verify_copula_equivalence",
    "verify_maximal_equality_fraction",
    "run_verification_suite",
]

KS_CRIT_1PCT = 1.628  # sup |F_emp - F| critical coefficient at the 1% level


@dataclass(frozen=True)
class VerificationReport:
    name: str
    sample_size: int
    statistic: float
    threshold: float
    passed: bool
    seed: int
    kind: str = "positive"  # "negative_control" entries are expected to fail

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "sample_size": self.sample_size,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "passed": self.passed,
            "seed": self.seed,
            "kind": self.kind,
        }


def _report(name, n, statistic, threshold, seed, kind="positive") -> VerificationReport:
    return VerificationReport(
        name=name,
        sample_size=int(n),
        statistic=float(statistic),
        threshold=float(threshold),
        passed=bool(statistic <= threshold),
        seed=int(seed),
        kind=kind,
    )


def _rng(seed: int, test_name: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(test_name.encode())]))


def _open_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    return np.clip(rng.random(n), 1e-12, 1.0 - 1e-12)


def ks_statistic(samples, d: GainDistribution) -> float:
    """sup_x |F_emp(x) - F_d(x)| via the sorted-sample formula.

    The lower excursion compares against the left limit F(x-), which matters
    for distributions with atoms (for continuous families it equals F(x)).
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    if n == 0:
        raise ValueError("empty sample")
    f_right = np.asarray(d.cdf(xs), dtype=float)
    f_left = 1.0 - np.asarray(d.ccdf_left(xs), dtype=float)
    upper = np.max(np.arange(1, n + 1) / n - f_right)
    lower = np.max(f_left - np.arange(0, n) / n)
    return float(max(upper, lower, 0.0))


def verify_same_marginals(
    construction: str,
    d1: GainDistribution,
    d2: GainDistribution,
    n: int = 100_000,
    seed: int = 0,
    corrupt: bool = False,
) -> tuple[VerificationReport, VerificationReport]:
    """KS test of both coupled marginals against their source CDFs at the 1% level.

    corrupt=True swaps the two residual components of the maximal coupling
    (a negative control that must fail).
    """
    rng = _rng(seed, f"same_marginals[{construction}]")
    threshold = KS_CRIT_1PCT / math.sqrt(n)
    if construction == "comonotone":
        h1, h2 = comonotone_samples(d1, d2, _open_uniform(rng, n))
    elif construction == "maximal":
        spec = maximal_coupling_spec(d1, d2)
        u_sel = _open_uniform(rng, n)
        u_val = _open_uniform(rng, n)
        h1, h2, eq = maximal_coupling_samples(spec, u_sel, u_val)
        if corrupt:
            swapped = ~eq
            h1[swapped], h2[swapped] = h2[swapped].copy(), h1[swapped].copy()
    else:
        raise ValueError(f"unknown construction {construction!r}")
    kind = "negative_control" if corrupt else "positive"
    name = f"same_marginals[{construction}{'-corrupted' if corrupt else ''}]"
    return (
        _report(name + ".h1", n, ks_statistic(h1, d1), threshold, seed, kind),
        _report(name + ".h2", n, ks_statistic(h2, d2), threshold, seed, kind),
    )


def verify_strong_ic_independence(
    s: ICScenario, n: int = 100_000, seed: int = 0, shared_uniform: bool = False
) -> VerificationReport:
    """Check that the strong-interference coupling keeps H21' independent of H22'.

    The coupling draws H21' and H22' from two independent uniforms, so the
    Pearson correlation of the probability-integral transforms must vanish;
    |rho| <= 3/sqrt(n) passes.  shared_uniform=True is the comonotone negative
    control (rank correlation 1).  Degenerate (zero-variance) transforms pass
    vacuously.
    """
    rng = _rng(seed, "strong_ic_independence")
    u1 = _open_uniform(rng, n)
    u2 = u1 if shared_uniform else _open_uniform(rng, n)
    h21 = np.asarray(s.h21.sample(u1))
    h22 = np.asarray(s.h22.sample(u2))
    pit1 = np.asarray(s.h21.cdf(h21))
    pit2 = np.asarray(s.h22.cdf(h22))
    name = "strong_ic_independence" + ("[shared-uniform]" if shared_uniform else "")
    kind = "negative_control" if shared_uniform else "positive"
    threshold = 3.0 / math.sqrt(n)
    if np.std(pit1) < 1e-12 or np.std(pit2) < 1e-12:
        return _report(name + "[degenerate]", n, 0.0, threshold, seed, kind)
    rho = float(np.corrcoef(pit1, pit2)[0, 1])
    return _report(name, n, abs(rho), threshold, seed, kind)


def mc_ergodic_rate(
    d: GainDistribution, power: float, n: int = 10**6, seed: int = 0
) -> RateValue:
    """Sample-mean estimate of E[C(H * power)] with its standard error."""
    if n < 10**4:
        raise ValueError("need at least 1e4 samples")
    rng = _rng(seed, "mc_ergodic_rate")
    h = np.asarray(d.sample(_open_uniform(rng, n)))
    values = np.asarray(c_of(h * power))
    stderr = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return RateValue(bits=float(np.mean(values)), method="monte_carlo", error_estimate=stderr)


def verify_copula_equivalence(
    d1: GainDistribution,
    d2: GainDistribution,
    n: int = 100_000,
    seed: int = 0,
    grid_levels: int = 20,
    independent_control: bool = False,
) -> VerificationReport:
    """Sup-gap between the empirical comonotone joint CDF and min{F1, F2}.

    Evaluated on a quantile grid; the DKW-style threshold is
    1.5 * sqrt(ln(2/0.01) / (2n)).  independent_control=True samples the two
    coordinates from independent uniforms instead, which must fail (the joint
    CDF then tracks F1*F2, not the minimum).
    """
    if n < 10**4:
        raise ValueError("need at least 1e4 samples")
    rng = _rng(seed, "copula_equivalence")
    u1 = _open_uniform(rng, n)
    u2 = _open_uniform(rng, n) if independent_control else u1
    h1 = np.asarray(d1.sample(u1))
    h2 = np.asarray(d2.sample(u2))
    levels = np.arange(1, grid_levels + 1) / (grid_levels + 1.0)
    xs = np.asarray(d1.quantile(levels))
    ys = np.asarray(d2.quantile(levels))
    worst = 0.0
    for x in xs:
        le_x = h1 <= x
        for y in ys:
            emp = np.mean(le_x & (h2 <= y))
            worst = max(worst, abs(emp - float(copula_joint_cdf(d1, d2, x, y))))
    threshold = 1.5 * math.sqrt(math.log(2.0 / 0.01) / (2.0 * n))
    name = "copula_equivalence" + ("[independent-uniforms]" if independent_control else "")
    kind = "negative_control" if independent_control else "positive"
    return _report(name, n, worst, threshold, seed, kind)


def verify_maximal_equality_fraction(
    d1: GainDistribution, d2: GainDistribution, n: int = 100_000, seed: int = 0
) -> VerificationReport:
    """Fraction of equal draws must sit within 3 sigma of the overlap mass p."""
    rng = _rng(seed, "maximal_equality_fraction")
    spec = maximal_coupling_spec(d1, d2)
    _, _, eq = maximal_coupling_samples(spec, _open_uniform(rng, n), _open_uniform(rng, n))
    p = spec.p
    threshold = 3.0 * math.sqrt(p * (1.0 - p) / n)
    return _report("maximal_equality_fraction", n, abs(float(np.mean(eq)) - p), threshold, seed)


def run_verification_suite(
    seed: int = 0, n: int = 100_000, include_negative_controls: bool = False
) -> list[VerificationReport]:
    """The full positive-control suite, optionally with the negative controls."""
    d1, d2 = Exponential(1.0), Exponential(2.0)
    ic = ICScenario(
        h11=Exponential(1.0), h12=Exponential(2.0), h21=Exponential(2.0), h22=Exponential(1.0),
        p1=1.0, p2=1.0,
    )
    reports: list[VerificationReport] = []
    reports += verify_same_marginals("maximal", d1, d2, n=n, seed=seed)
    reports += verify_same_marginals("comonotone", d1, d2, n=n, seed=seed)
    reports += verify_same_marginals("comonotone", BernoulliGain(0.3), BernoulliGain(0.7),
                                     n=n, seed=seed)
    reports.append(verify_maximal_equality_fraction(d1, d2, n=n, seed=seed))
    reports.append(verify_strong_ic_independence(ic, n=n, seed=seed))
    reports.append(verify_copula_equivalence(d1, d2, n=n, seed=seed))

    mc = mc_ergodic_rate(Exponential(1.0), 1.0, n=max(n, 10**4), seed=seed)
    closed = exponential_rate_closed_form(1.0, 1.0)
    reports.append(
        _report(
            "mc_rate_vs_closed_form",
            max(n, 10**4),
            abs(mc.bits - closed),
            max(1e-3, 3.0 * mc.error_estimate),
            seed,
        )
    )

    if include_negative_controls:
        reports += verify_same_marginals("maximal", d1, d2, n=n, seed=seed, corrupt=True)
        reports.append(verify_strong_ic_independence(ic, n=n, seed=seed, shared_uniform=True))
        reports.append(verify_copula_equivalence(d1, d2, n=n, seed=seed, independent_control=True))
    return reports
