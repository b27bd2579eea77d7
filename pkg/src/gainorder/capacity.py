"""Ergodic rate expressions attached to each successful classification.

Rates are in bits per channel use with C(x) = (1/2) log2(1 + x); the 1/2
factor is kept uniformly, including for the complex-noise interference model,
to match the convention the sufficient conditions were stated under.
Expectations over continuous gains go through adaptive quadrature against the
density; discrete gains are summed exactly; a closed form via the exponential
integral covers exponential gains; Monte Carlo is available as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .classifier import (
    ClassificationReport,
    ICScenario,
    WTCScenario,
    classify_ic_strong,
    classify_ic_very_strong,
    classify_wtc,
)
from .distributions import Exponential, GainDistribution
from .special import exp_integral_e1_scaled

__all__ = [
    "RateValue",
    "RateRegion",
    "UnclassifiedScenarioError",
    "c_of",
    "ergodic_rate",
    "exponential_rate_closed_form",
    "pair_sum_rate",
    "region_from_constraints",
    "strong_ic_region",
    "very_strong_ic_region",
    "wtc_secrecy_capacity",
]

_LN2 = math.log(2.0)
_VERTEX_TOL = 1e-9


class UnclassifiedScenarioError(ValueError):
    """Raised when a rate expression is requested for a scenario whose
    sufficient condition failed and no override was given."""

    def __init__(self, report: ClassificationReport):
        self.report = report
        super().__init__(
            f"scenario does not satisfy the {report.condition} condition; "
            "pass force=True to evaluate the expression anyway"
        )


def c_of(x):
    """Shannon rate C(x) = (1/2) log2(1 + x) in bits per channel use."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0):
        raise ValueError("rate argument must be nonnegative")
    out = 0.5 * np.log2(1.0 + x_arr)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RateValue:
    """A nonnegative ergodic rate plus how it was computed."""

    bits: float
    method: str  # "quadrature" | "closed_form" | "monte_carlo"
    error_estimate: float

    def to_json(self) -> dict:
        return {"bits": self.bits, "method": self.method, "error_estimate": self.error_estimate}


def exponential_rate_closed_form(mean_gain: float, power: float) -> float:
    """E[C(H P)] for exponential H: e^(1/(P s)) E1(1/(P s)) / (2 ln 2)."""
    if power == 0.0:
        return 0.0
    arg = 1.0 / (power * mean_gain)
    return exp_integral_e1_scaled(arg) / (2.0 * _LN2)


def ergodic_rate(
    d: GainDistribution,
    power: float,
    method: str = "auto",
    mc_samples: int = 10**6,
    seed: int = 0,
) -> RateValue:
    """Ergodic rate E[C(H * power)] of a single fading link."""
    if power < 0.0 or not math.isfinite(power):
        raise ValueError("power must be nonnegative and finite")
    if not math.isfinite(d.mean()):
        raise ValueError("distribution has divergent mean")
    if power == 0.0:
        return RateValue(0.0, "closed_form" if method in ("auto", "closed_form") else method, 0.0)

    if method == "auto":
        method = "closed_form" if not d.continuous else "quadrature"

    if method == "closed_form":
        if not d.continuous:
            values, masses = d.atoms()
            bits = float(np.dot(masses, np.asarray(c_of(values * power))))
            return RateValue(bits, "closed_form", 0.0)
        if isinstance(d, Exponential):
            return RateValue(exponential_rate_closed_form(d.mean_gain, power), "closed_form", 1e-12)
        raise ValueError(f"no closed form for {type(d).__name__}")

    if method == "quadrature":
        if not d.continuous:
            values, masses = d.atoms()
            bits = float(np.dot(masses, np.asarray(c_of(values * power))))
            return RateValue(bits, "closed_form", 0.0)
        bits, err = _expectation_c(d, power)
        return RateValue(bits, "quadrature", err)

    if method == "monte_carlo":
        if mc_samples < 10**4:
            raise ValueError("monte_carlo needs at least 1e4 samples")
        rng = np.random.default_rng(seed)
        u = np.clip(rng.random(mc_samples), 1e-12, 1.0 - 1e-12)
        samples = np.asarray(c_of(np.asarray(d.sample(u)) * power))
        stderr = float(np.std(samples, ddof=1) / math.sqrt(mc_samples))
        return RateValue(float(np.mean(samples)), "monte_carlo", stderr)

    raise ValueError(f"unknown method {method!r}")


def _expectation_c(d: GainDistribution, power: float, offset: float = 0.0) -> tuple[float, float]:
    """E[C(offset + power * H)] for a continuous gain by adaptive quadrature."""

    def integrand(x: float) -> float:
        return float(c_of(offset + power * x)) * float(d.pdf(x))

    split = d.tail_quantile(1e-12)
    v1, e1 = quad(integrand, 0.0, split, limit=300, epsabs=1e-11, epsrel=1e-11)
    v2, e2 = quad(integrand, split, np.inf, limit=300, epsabs=1e-11)
    return v1 + v2, e1 + e2


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
_PANEL_BREAKS = np.array(
    [0.0, 0.5, 0.9, 0.99, 0.999, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10]
)
_PANEL_BREAKS[5:] = 1.0 - _PANEL_BREAKS[5:]


def _panel_nodes() -> tuple[np.ndarray, np.ndarray]:
    nodes = []
    weights = []
    for lo, hi in zip(_PANEL_BREAKS[:-1], _PANEL_BREAKS[1:]):
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (_GL_NODES + 1.0))
        weights.append(half * _GL_WEIGHTS)
    return np.concatenate(nodes), np.concatenate(weights)


def pair_sum_rate(
    d_a: GainDistribution, power_a: float, d_b: GainDistribution, power_b: float
) -> RateValue:
    """E[C(Ha * Pa + Hb * Pb)] for independent gains.

    Continuous pairs integrate on the unit square in quantile space with
    panel-refined tensor-product 64-node Gauss-Legendre rules (panels
    geometrically refined toward u = 1 where the quantiles diverge); mixtures
    with point masses split into one conditional expectation per atom.
    """
    for p in (power_a, power_b):
        if p < 0.0 or not math.isfinite(p):
            raise ValueError("powers must be nonnegative and finite")
    if power_a == 0.0:
        return ergodic_rate(d_b, power_b)
    if power_b == 0.0:
        return ergodic_rate(d_a, power_a)

    if not d_a.continuous and not d_b.continuous:
        va, ma = d_a.atoms()
        vb, mb = d_b.atoms()
        grid = np.asarray(c_of(np.add.outer(va * power_a, vb * power_b)))
        return RateValue(float(ma @ grid @ mb), "closed_form", 0.0)
    if not d_a.continuous:
        va, ma = d_a.atoms()
        total, err = 0.0, 0.0
        for v, m in zip(va, ma):
            val, e = _expectation_c(d_b, power_b, offset=v * power_a)
            total += m * val
            err += m * e
        return RateValue(total, "quadrature", err)
    if not d_b.continuous:
        return pair_sum_rate(d_b, power_b, d_a, power_a)

    nodes, weights = _panel_nodes()
    qa = np.asarray(d_a.quantile(nodes)) * power_a
    qb = np.asarray(d_b.quantile(nodes)) * power_b
    values = np.asarray(c_of(np.add.outer(qa, qb)))
    bits = float(weights @ values @ weights)
    # error indicator: compare against the half-resolution rule
    bits_half = float(weights[::2] @ values[::2, ::2] @ weights[::2] * 4.0)
    return RateValue(bits, "quadrature", abs(bits - bits_half))


@dataclass(frozen=True)
class RateRegion:
    """Intersection of half-planes a1*R1 + a2*R2 <= b in the nonnegative quadrant.

    Vertices are the extreme points, listed counterclockwise starting from the
    lexicographically smallest (the origin for any nonempty region here).
    """

    constraints: tuple  # of (a1, a2, b)
    vertices: tuple     # of (r1, r2)

    def contains(self, r1: float, r2: float, tol: float = _VERTEX_TOL) -> bool:
        if r1 < -tol or r2 < -tol:
            return False
        return all(a1 * r1 + a2 * r2 <= b + tol for a1, a2, b in self.constraints)

    def to_json(self) -> dict:
        return {
            "constraints": [{"a1": a1, "a2": a2, "b": b} for a1, a2, b in self.constraints],
            "vertices": [[r1, r2] for r1, r2 in self.vertices],
        }


def region_from_constraints(constraints) -> RateRegion:
    """Enumerate vertices of the intersection by pairwise boundary intersection."""
    cons = [(float(a1), float(a2), float(b)) for a1, a2, b in constraints]
    if not cons:
        raise ValueError("need at least one rate constraint")
    lines = [(a1, a2, b) for a1, a2, b in cons] + [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]
    # the axis lines stand in for the R1 >= 0 / R2 >= 0 boundaries
    candidates = []
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            a1, b1, c1 = lines[i]
            a2, b2, c2 = lines[j]
            det = a1 * b2 - a2 * b1
            if abs(det) < 1e-12:
                continue
            x = (c1 * b2 - c2 * b1) / det
            y = (a1 * c2 - a2 * c1) / det
            candidates.append((x, y))
    feasible = []
    for x, y in candidates:
        if x < -_VERTEX_TOL or y < -_VERTEX_TOL:
            continue
        if all(a1 * x + a2 * y <= b + _VERTEX_TOL for a1, a2, b in cons):
            feasible.append((max(x, 0.0) + 0.0, max(y, 0.0) + 0.0))
    if not feasible:
        raise ValueError("rate region is empty")
    unique: list[tuple[float, float]] = []
    for pt in feasible:
        if not any(abs(pt[0] - q[0]) <= _VERTEX_TOL and abs(pt[1] - q[1]) <= _VERTEX_TOL
                   for q in unique):
            unique.append(pt)
    if len(unique) > 2:
        cx = sum(p[0] for p in unique) / len(unique)
        cy = sum(p[1] for p in unique) / len(unique)
        unique.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
    start = unique.index(min(unique))
    ordered = unique[start:] + unique[:start]
    return RateRegion(constraints=tuple(cons), vertices=tuple(ordered))


def strong_ic_region(s: ICScenario, force: bool = False) -> RateRegion:
    """Capacity region under strong interference: the intersection of the two
    three-constraint multiple-access regions, one per receiver."""
    report = classify_ic_strong(s)
    if not report.verdict and not force:
        raise UnclassifiedScenarioError(report)
    constraints = []
    for gain_1, gain_2 in ((s.h11, s.h12), (s.h21, s.h22)):
        r1 = ergodic_rate(gain_1, s.p1).bits
        r2 = ergodic_rate(gain_2, s.p2).bits
        rsum = pair_sum_rate(gain_1, s.p1, gain_2, s.p2).bits
        constraints += [(1.0, 0.0, r1), (0.0, 1.0, r2), (1.0, 1.0, rsum)]
    return region_from_constraints(constraints)


def very_strong_ic_region(s: ICScenario, force: bool = False) -> RateRegion:
    """Capacity region under very strong interference: the interference-free
    rectangle R1 <= E[C(H11 P1)], R2 <= E[C(H22 P2)]."""
    report = classify_ic_very_strong(s)
    if not report.verdict and not force:
        raise UnclassifiedScenarioError(report)
    r1 = ergodic_rate(s.h11, s.p1).bits
    r2 = ergodic_rate(s.h22, s.p2).bits
    return region_from_constraints([(1.0, 0.0, r1), (0.0, 1.0, r2)])


def wtc_secrecy_capacity(s: WTCScenario, force: bool = False) -> RateValue:
    """Ergodic secrecy capacity E[C(H P)] - E[C(G P)] of the degraded wiretap channel.

    Linearity of the expectation makes the coupling irrelevant to the value;
    degradedness guarantees nonnegativity, which is asserted rather than
    clamped.
    """
    report = classify_wtc(s)
    if not report.verdict and not force:
        raise UnclassifiedScenarioError(report)
    top = ergodic_rate(s.legitimate, s.power)
    bottom = ergodic_rate(s.eavesdropper, s.power)
    bits = top.bits - bottom.bits
    err = top.error_estimate + bottom.error_estimate
    if report.verdict:
        assert bits >= -1e-9, "degraded wiretap channel produced a negative secrecy rate"
    return RateValue(bits, "quadrature", err)
