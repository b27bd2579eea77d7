"""Usual stochastic order between gain distributions, plus overlap/total-variation.

The usual stochastic order X <=_st Y holds iff the CCDF of X lies below the
CCDF of Y everywhere.  "Everywhere" is decided on a finite grid augmented
with every jump point of either CDF (evaluated from both sides), which is
exact for the step parts and dense enough for the smooth parts of the
implemented families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .distributions import Empirical, EvaluationGrid, GainDistribution

__all__ = [
    "Relation",
    "OrderVerdict",
    "check_usual_order",
    "check_usual_order_discrete",
    "overlap_mass",
    "total_variation",
    "density_segments",
    "DensitySegment",
    "default_order_tolerance",
]

DEFAULT_TOL = 1e-9
_MAX_WITNESSES = 3


class Relation(Enum):
    FIRST_LEQ = "first_leq"
    SECOND_LEQ = "second_leq"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class OrderVerdict:
    """Outcome of a usual-stochastic-order test between two distributions.

    witnesses_first_gt holds abscissae where ccdf1 exceeds ccdf2 beyond
    tolerance (evidence against first <=_st second); witnesses_second_gt the
    mirror image.  max_violation is the largest CCDF gap inconsistent with
    the declared relation.
    """

    relation: Relation
    witnesses_first_gt: tuple
    witnesses_second_gt: tuple
    max_violation: float
    tol: float

    def __post_init__(self):
        if self.relation is Relation.EQUAL:
            assert not self.witnesses_first_gt and not self.witnesses_second_gt
        if self.relation is Relation.INCOMPARABLE:
            assert self.witnesses_first_gt and self.witnesses_second_gt

    @property
    def first_leq(self) -> bool:
        """True when the first distribution is <=_st the second (ties count)."""
        return self.relation in (Relation.FIRST_LEQ, Relation.EQUAL)

    @property
    def second_leq(self) -> bool:
        return self.relation in (Relation.SECOND_LEQ, Relation.EQUAL)

    def to_json(self) -> dict:
        return {
            "relation": self.relation.value,
            "witnesses_first_gt": list(self.witnesses_first_gt),
            "witnesses_second_gt": list(self.witnesses_second_gt),
            "max_violation": self.max_violation,
            "tol": self.tol,
        }


def default_order_tolerance(d1: GainDistribution, d2: GainDistribution) -> float:
    """1e-9 for analytic families; twice the KS bound for empirical inputs."""
    tol = DEFAULT_TOL
    for d in (d1, d2):
        if isinstance(d, Empirical):
            tol = max(tol, 2.0 * 1.36 / math.sqrt(d.sample_size))
    return tol


def check_usual_order(
    d1: GainDistribution,
    d2: GainDistribution,
    grid: EvaluationGrid | None = None,
    tol: float | None = None,
) -> OrderVerdict:
    """Decide whether d1 <=_st d2, the reverse, both (equal), or neither."""
    if tol is None:
        tol = default_order_tolerance(d1, d2)
    if tol < 0.0:
        raise ValueError("tolerance must be nonnegative")
    if grid is None:
        grid = EvaluationGrid.for_pair(d1, d2)
    else:
        needed = max(d1.tail_quantile(), d2.tail_quantile())
        if grid.x_max < needed * (1.0 - 1e-12):
            raise ValueError(
                f"grid x_max={grid.x_max} does not cover both supports (need >= {needed})"
            )

    xs, c1, c2 = _ccdf_eval_points(d1, d2, grid)
    diff = c1 - c2
    gap1 = float(np.max(diff))   # evidence against d1 <=_st d2
    gap2 = float(np.max(-diff))  # evidence against d2 <=_st d1

    first_ok = gap1 <= tol
    second_ok = gap2 <= tol
    wit1 = _top_witnesses(xs, diff, tol)
    wit2 = _top_witnesses(xs, -diff, tol)

    if first_ok and second_ok:
        return OrderVerdict(Relation.EQUAL, (), (), max(gap1, gap2), tol)
    if first_ok:
        return OrderVerdict(Relation.FIRST_LEQ, (), wit2, max(gap1, 0.0), tol)
    if second_ok:
        return OrderVerdict(Relation.SECOND_LEQ, wit1, (), max(gap2, 0.0), tol)
    return OrderVerdict(Relation.INCOMPARABLE, wit1, wit2, min(gap1, gap2), tol)


def _ccdf_eval_points(d1, d2, grid):
    atoms1, _ = d1.atoms()
    atoms2, _ = d2.atoms()
    atoms = np.unique(np.concatenate([atoms1, atoms2])) if (atoms1.size or atoms2.size) else np.empty(0)
    xs = np.unique(np.concatenate([[0.0], grid.as_array(), atoms]))
    c1 = np.asarray(d1.ccdf(xs), dtype=float)
    c2 = np.asarray(d2.ccdf(xs), dtype=float)
    if atoms.size:
        # left limits Pr(X >= a) at every jump point of either cdf
        xs = np.concatenate([xs, atoms])
        c1 = np.concatenate([c1, np.atleast_1d(d1.ccdf_left(atoms))])
        c2 = np.concatenate([c2, np.atleast_1d(d2.ccdf_left(atoms))])
    return xs, c1, c2


def _top_witnesses(xs: np.ndarray, gaps: np.ndarray, tol: float) -> tuple:
    over = np.flatnonzero(gaps > tol)
    if over.size == 0:
        return ()
    ranked = over[np.argsort(gaps[over])[::-1][:_MAX_WITNESSES]]
    return tuple(sorted(float(xs[i]) for i in ranked))


def check_usual_order_discrete(p, q, tol: float = 1e-12) -> OrderVerdict:
    """Usual stochastic order between two pmfs over a shared increasing state index.

    FirstLeq iff every tail sum of p is below the matching tail sum of q:
    sum_{j>n} p_j <= sum_{j>n} q_j for all n.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError("probability vectors must be one-dimensional and equally long")
    for name, vec in (("p", p), ("q", q)):
        if np.any(vec < 0.0):
            raise ValueError(f"{name} has negative entries")
        if abs(vec.sum() - 1.0) > 1e-12:
            raise ValueError(f"{name} does not sum to 1 (got {vec.sum()!r})")

    tails_p = _tail_sums(p)
    tails_q = _tail_sums(q)
    diff = tails_p - tails_q
    gap1 = float(np.max(diff))
    gap2 = float(np.max(-diff))
    idx = np.arange(1, p.size + 1, dtype=float)  # 1-based state index n
    wit1 = _top_witnesses(idx, diff, tol)
    wit2 = _top_witnesses(idx, -diff, tol)

    if gap1 <= tol and gap2 <= tol:
        return OrderVerdict(Relation.EQUAL, (), (), max(gap1, gap2), tol)
    if gap1 <= tol:
        return OrderVerdict(Relation.FIRST_LEQ, (), wit2, max(gap1, 0.0), tol)
    if gap2 <= tol:
        return OrderVerdict(Relation.SECOND_LEQ, wit1, (), max(gap2, 0.0), tol)
    return OrderVerdict(Relation.INCOMPARABLE, wit1, wit2, min(gap1, gap2), tol)


def _tail_sums(vec: np.ndarray) -> np.ndarray:
    """tail_sums(v)[n-1] = sum_{j > n} v_j, n = 1..len(v); last entry is 0."""
    return (vec.sum() - np.cumsum(vec)).clip(min=0.0)


# -- density overlap ----------------------------------------------------------


@dataclass(frozen=True)
class DensitySegment:
    """Interval (lo, hi) on which one density lies pointwise below the other."""

    lo: float
    hi: float  # may be +inf
    min_is_first: bool


def density_segments(d1: GainDistribution, d2: GainDistribution) -> list[DensitySegment]:
    """Partition the union support at density crossings of two continuous families.

    Crossings are located by sign changes of f1 - f2 on a 4096-point log grid
    and refined by bracketed bisection to 1e-12.
    """
    _require_continuous(d1, d2)
    x_max = max(d1.tail_quantile(1e-12), d2.tail_quantile(1e-12))
    pts = np.concatenate([[0.0], np.geomspace(x_max * 1e-15, x_max, 4096)])
    with np.errstate(over="ignore", invalid="ignore"):
        diff = np.asarray(d1.pdf(pts), dtype=float) - np.asarray(d2.pdf(pts), dtype=float)
    diff = np.nan_to_num(diff, nan=0.0, posinf=np.inf, neginf=-np.inf)

    def gap(t: float) -> float:
        return float(d1.pdf(t)) - float(d2.pdf(t))

    crossings: list[float] = []
    sign = np.sign(diff)
    for i in range(len(pts) - 1):
        if sign[i] != 0.0 and sign[i + 1] != 0.0 and sign[i] != sign[i + 1]:
            crossings.append(float(brentq(gap, pts[i], pts[i + 1], xtol=1e-13, rtol=1e-15)))
    # drop degenerate slivers from endpoint artifacts
    crossings = [c for c in crossings if c > 1e-13 * x_max]

    bounds = [0.0] + crossings + [math.inf]
    segments = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        mid = lo + 0.5 * (min(hi, 2.0 * lo + x_max) - lo)
        f1 = float(d1.pdf(mid))
        f2 = float(d2.pdf(mid))
        segments.append(DensitySegment(lo=lo, hi=hi, min_is_first=f1 <= f2))
    return segments


def overlap_mass(d1: GainDistribution, d2: GainDistribution) -> float:
    """Integral of min(f1, f2) over the union support.

    Between consecutive density crossings the minimum is a single density, so
    each piece integrates exactly as a CDF increment of that density; the only
    numerical work is locating the crossings.
    """
    _require_continuous(d1, d2)
    if d1 == d2:
        return 1.0
    total = 0.0
    for seg in density_segments(d1, d2):
        d = d1 if seg.min_is_first else d2
        hi_cdf = 1.0 if math.isinf(seg.hi) else float(d.cdf(seg.hi))
        total += hi_cdf - float(d.cdf(seg.lo))
    return float(min(max(total, 0.0), 1.0))


def total_variation(d1: GainDistribution, d2: GainDistribution) -> float:
    """Total variation distance 1 - integral of the pointwise minimum density."""
    return 1.0 - overlap_mass(d1, d2)


def _require_continuous(d1, d2):
    for d in (d1, d2):
        if not d.continuous:
            raise ValueError(
                f"{type(d).__name__} has no density; overlap and total variation "
                "are defined for continuous families only"
            )
