"""Topology-level classification from channel statistics alone.

Each classifier applies a sufficient condition expressed through the usual
stochastic order: a broadcast channel is degraded when the user gains chain
up, an interference channel has strong interference when each cross gain
dominates the matching direct gain, very strong interference when the
interference-to-signal ratios dominate the direct gains, and a wiretap
channel is degraded when the legitimate gain dominates the eavesdropper's.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    Empirical,
    Exponential,
    GainDistribution,
    PointMass,
    build_ratio,
)
from .stochastic_order import OrderVerdict, Relation, check_usual_order

__all__ = [
    "BCScenario",
    "ICScenario",
    "WTCScenario",
    "ClassificationReport",
    "classify_bc",
    "classify_ic_strong",
    "classify_ic_very_strong",
    "classify_wtc",
    "interference_ratio_distribution",
]

INDEPENDENT = "independent"
COMONOTONE = "comonotone"

_MC_RATIO_SAMPLES = 10**6


def _check_power(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class BCScenario:
    """K-user broadcast channel: one gain distribution per user, total power."""

    gains: tuple
    power: float

    def __post_init__(self):
        if len(self.gains) < 2:
            raise ValueError("broadcast scenario needs at least 2 users")
        _check_power("power", self.power)


@dataclass(frozen=True)
class ICScenario:
    """Two-user interference channel; h_jk is the gain from transmitter k to receiver j.

    Zero powers are allowed as degenerate corners (they collapse the rate
    expressions to zero and make the interference ratios trivial).
    """

    h11: GainDistribution
    h12: GainDistribution
    h21: GainDistribution
    h22: GainDistribution
    p1: float
    p2: float
    dependence: str = INDEPENDENT

    def __post_init__(self):
        for name, p in (("p1", self.p1), ("p2", self.p2)):
            if not (isinstance(p, (int, float)) and math.isfinite(p) and p >= 0):
                raise ValueError(f"{name} must be nonnegative and finite, got {p!r}")
        if self.dependence not in (INDEPENDENT, COMONOTONE):
            raise ValueError(f"unknown dependence mode {self.dependence!r}")


@dataclass(frozen=True)
class WTCScenario:
    """Wiretap channel: legitimate gain, eavesdropper gain, transmit power."""

    legitimate: GainDistribution
    eavesdropper: GainDistribution
    power: float

    def __post_init__(self):
        _check_power("power", self.power)


@dataclass
class ClassificationReport:
    topology: str
    verdict: bool
    condition: str
    order_checks: list = field(default_factory=list)  # (name, OrderVerdict) pairs
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    confidence: str = "analytic"  # "statistical" when Monte Carlo CDFs were used
    permutation: tuple | None = None  # degraded BC user order, weakest first (1-based)

    def to_json(self) -> dict:
        out = {
            "topology": self.topology,
            "verdict": self.verdict,
            "condition": self.condition,
            "order_checks": [
                {"name": name, **verdict.to_json()} for name, verdict in self.order_checks
            ],
            "witnesses": list(self.witnesses),
            "confidence": self.confidence,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        if self.permutation is not None:
            out["permutation"] = list(self.permutation)
        return out


_BC_REGION_NOTE = (
    "degraded BC rate region = union over input splits f_VX with E[X^2] <= P_T of "
    "{R1 <= I(V;Y1|H1), R2 <= I(X;Y2|V,H2)}; the optimizing f_VX is an open problem, "
    "so the region is reported symbolically, not numerically"
)


def classify_bc(s: BCScenario, tol: float | None = None) -> ClassificationReport:
    """Search for a permutation that chains the user gains in the usual stochastic order.

    Sorting by mean is a sound pre-filter (the order implies ordered means); if
    the sorted chain fails, all permutations are tried for K <= 6.
    """
    gains = list(s.gains)
    k = len(gains)
    order = sorted(range(k), key=lambda i: gains[i].mean())
    chain = _try_chain(gains, order, tol)
    if chain is None and k <= 6:
        for perm in itertools.permutations(range(k)):
            chain = _try_chain(gains, list(perm), tol)
            if chain is not None:
                order = list(perm)
                break
    report = ClassificationReport(
        topology="bc",
        verdict=chain is not None,
        condition="degraded_chain",
        notes=[_BC_REGION_NOTE],
    )
    if chain is not None:
        report.order_checks = chain
        report.permutation = tuple(i + 1 for i in order)
    else:
        bad = _find_incomparable_pair(gains, tol)
        if bad is not None:
            i, j, verdict = bad
            report.order_checks = [(f"user{i + 1}_vs_user{j + 1}", verdict)]
            report.witnesses = sorted(
                set(verdict.witnesses_first_gt) | set(verdict.witnesses_second_gt)
            )
    return report


def _try_chain(gains, order, tol=None):
    checks = []
    for a, b in zip(order[:-1], order[1:]):
        verdict = check_usual_order(gains[a], gains[b], tol=tol)
        if not verdict.first_leq:
            return None
        checks.append((f"user{a + 1}_leq_user{b + 1}", verdict))
    return checks


def _find_incomparable_pair(gains, tol=None):
    for i, j in itertools.combinations(range(len(gains)), 2):
        verdict = check_usual_order(gains[i], gains[j], tol=tol)
        if verdict.relation is Relation.INCOMPARABLE:
            return i, j, verdict
    return None


def classify_ic_strong(s: ICScenario, tol: float | None = None) -> ClassificationReport:
    """Strong interference: each cross gain stochastically dominates the direct gain
    to the same receiver, with mutually independent gains."""
    if s.dependence != INDEPENDENT:
        raise ValueError("the strong-interference test requires independent channel gains")
    check1 = check_usual_order(s.h11, s.h21, tol=tol)
    check2 = check_usual_order(s.h22, s.h12, tol=tol)
    verdict = check1.first_leq and check2.first_leq
    report = ClassificationReport(
        topology="ic",
        verdict=verdict,
        condition="strong_interference",
        order_checks=[("h11_leq_h21", check1), ("h22_leq_h12", check2)],
    )
    if not verdict:
        report.witnesses = sorted(
            set(check1.witnesses_first_gt) | set(check2.witnesses_first_gt)
        )
    return report


def interference_ratio_distribution(
    numerator: GainDistribution,
    denominator: GainDistribution,
    power: float,
    mc_samples: int = _MC_RATIO_SAMPLES,
    seed: int = 0,
) -> tuple[GainDistribution, bool]:
    """Distribution of numerator / (1 + power * denominator) for independent gains.

    Returns (distribution, is_exact).  Exponential and point-mass combinations
    have closed forms; anything else falls back to a seeded Monte Carlo CDF.
    """
    if power == 0.0 or (isinstance(denominator, PointMass) and denominator.value == 0.0):
        return numerator, True
    if isinstance(numerator, Exponential) and isinstance(denominator, Exponential):
        return build_ratio(numerator.mean_gain, denominator.mean_gain, power), True
    if isinstance(numerator, PointMass) and isinstance(denominator, PointMass):
        return PointMass(numerator.value / (1.0 + power * denominator.value)), True
    if isinstance(numerator, Exponential) and isinstance(denominator, PointMass):
        return Exponential(numerator.mean_gain / (1.0 + power * denominator.value)), True
    rng = np.random.default_rng(seed)
    u1 = np.clip(rng.random(mc_samples), 1e-12, 1 - 1e-12)
    u2 = np.clip(rng.random(mc_samples), 1e-12, 1 - 1e-12)
    num = np.asarray(numerator.sample(u1))
    den = np.asarray(denominator.sample(u2))
    return Empirical.from_samples(num / (1.0 + power * den)), False


def classify_ic_very_strong(
    s: ICScenario,
    seed: int = 0,
    mc_samples: int = _MC_RATIO_SAMPLES,
    tol: float | None = None,
) -> ClassificationReport:
    """Very strong interference: the ratio Z1 = H21/(1 + P2 H22) dominates H11 and
    Z2 = H12/(1 + P1 H11) dominates H22."""
    z1, exact1 = interference_ratio_distribution(s.h21, s.h22, s.p2, mc_samples, seed=seed)
    z2, exact2 = interference_ratio_distribution(s.h12, s.h11, s.p1, mc_samples, seed=seed + 1)
    exact = exact1 and exact2
    if tol is None:
        tol = None if exact else 3.0 * 1.36 / math.sqrt(mc_samples)
    check1 = check_usual_order(s.h11, z1, tol=tol)
    check2 = check_usual_order(s.h22, z2, tol=tol)
    verdict = check1.first_leq and check2.first_leq
    report = ClassificationReport(
        topology="ic",
        verdict=verdict,
        condition="very_strong_interference",
        order_checks=[("h11_leq_z1", check1), ("h22_leq_z2", check2)],
        confidence="analytic" if exact else "statistical",
    )
    if s.dependence == COMONOTONE:
        report.notes.append(
            "comonotone mode: the admissible joint CDFs are pinned to "
            "min{F_Z1, F_H22} and min{F_Z2, F_H11} (one shared uniform drives both laws)"
        )
    if not verdict:
        report.witnesses = sorted(
            set(check1.witnesses_first_gt) | set(check2.witnesses_first_gt)
        )
    return report


def classify_wtc(s: WTCScenario, tol: float | None = None) -> ClassificationReport:
    """Degraded wiretap channel: the legitimate gain dominates the eavesdropper's."""
    check = check_usual_order(s.eavesdropper, s.legitimate, tol=tol)
    report = ClassificationReport(
        topology="wtc",
        verdict=check.first_leq,
        condition="degraded_wiretap",
        order_checks=[("eavesdropper_leq_legitimate", check)],
    )
    if not check.first_leq:
        report.witnesses = list(check.witnesses_first_gt)
    return report
