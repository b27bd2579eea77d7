"""Degradedness certification for two-user finite-state Markov fading BCs.

A k-th order chain over N increasing state values is described by its
N^k x N^k transition matrix over super-states (the k most recent states,
enumerated lexicographically).  The certificate checks three conditions:

  (i)   the time-0 state of the weak chain is dominated in the usual
        stochastic order by that of the strong chain;
  (ii)  for every pair of elementwise-ordered histories of length < k, the
        supplied early-step conditional of the weak chain is dominated by the
        strong chain's (these conditionals are extra initial data and cannot
        be read off the transition matrices; at step k the conditional IS the
        transition row, which condition (iii) already covers);
  (iii) for every comparable super-state pair (g(l) <= g(s) elementwise), row
        l of the weak CCDF matrix lies below row s of the strong CCDF matrix.

Matrix validity and the CCDF matrices use exact rational arithmetic; path
simulation uses floats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .stochastic_order import check_usual_order_discrete

__all__ = [
    "MarkovChannelSpec",
    "MarkovCertificate",
    "super_state",
    "super_state_index",
    "ccdf_matrix",
    "comparable_pairs",
    "check_markov_degraded",
    "check_indecomposable",
    "coupled_paths",
    "stationary_distribution",
    "markov_spec_from_json",
]

_SUM_TOL = Fraction(1, 10**12)


def _to_fraction(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)  # exact binary value
    raise ValueError(f"cannot interpret {x!r} as a probability")


def super_state(l: int, k: int, N: int) -> tuple:
    """Row index l (1-based) -> k-tuple of 0-based state indices, lexicographic.

    l = 1 maps to (0, ..., 0); the last index varies fastest.
    """
    if not 1 <= l <= N**k:
        raise ValueError(f"row index {l} outside 1..{N ** k}")
    digits = []
    rem = l - 1
    for _ in range(k):
        digits.append(rem % N)
        rem //= N
    return tuple(reversed(digits))


def super_state_index(indices, N: int) -> int:
    """Inverse of super_state: k-tuple of 0-based state indices -> 1-based row."""
    l = 0
    for d in indices:
        if not 0 <= d < N:
            raise ValueError(f"state index {d} outside 0..{N - 1}")
        l = l * N + d
    return l + 1


@dataclass(frozen=True)
class MarkovChannelSpec:
    """One k-th order finite-state Markov fading channel.

    states holds the strictly increasing gain values; matrix is row-stochastic
    over super-states; initial is the joint law of the first super-state
    (H(0), ..., H(k-1)); early_conditionals optionally supplies, for each
    history of length 1..k-1 (as a tuple of state values), the pmf of the next
    state - data that condition (ii) needs but the matrix does not determine.
    """

    states: tuple
    order: int
    matrix: tuple            # of rows, each a tuple of Fraction
    initial: tuple           # of Fraction, length N^order
    early_conditionals: tuple = ()  # of (history value-tuple, pmf tuple)

    def __post_init__(self):
        states = tuple(float(v) for v in self.states)
        if len(states) < 1 or any(not math.isfinite(v) for v in states):
            raise ValueError("state values must be finite")
        if any(b <= a for a, b in zip(states, states[1:])):
            raise ValueError("state values must be strictly increasing")
        object.__setattr__(self, "states", states)
        if self.order < 1:
            raise ValueError("chain order must be >= 1")
        n_super = len(states) ** self.order

        matrix = tuple(tuple(_to_fraction(x) for x in row) for row in self.matrix)
        if len(matrix) != n_super or any(len(row) != n_super for row in matrix):
            raise ValueError(f"transition matrix must be {n_super}x{n_super}")
        for i, row in enumerate(matrix):
            if any(x < 0 for x in row):
                raise ValueError(f"row {i + 1} has negative entries")
            if abs(sum(row) - 1) > _SUM_TOL:
                raise ValueError(f"row {i + 1} does not sum to 1")
        if self.order >= 2:
            self._check_suffix_prefix_pattern(matrix, len(states))
        object.__setattr__(self, "matrix", matrix)

        initial = tuple(_to_fraction(x) for x in self.initial)
        if len(initial) != n_super:
            raise ValueError(f"initial distribution must have length {n_super}")
        if any(x < 0 for x in initial) or abs(sum(initial) - 1) > _SUM_TOL:
            raise ValueError("initial distribution must be a pmf over super-states")
        object.__setattr__(self, "initial", initial)

        cleaned = []
        for history, pmf in self.early_conditionals:
            hist = tuple(float(v) for v in history)
            if not 1 <= len(hist) <= self.order:
                raise ValueError("early conditional histories must have length 1..k")
            if any(v not in states for v in hist):
                raise ValueError(f"history {hist} uses unknown state values")
            probs = tuple(_to_fraction(x) for x in pmf)
            if len(probs) != len(states) or any(x < 0 for x in probs) or abs(sum(probs) - 1) > _SUM_TOL:
                raise ValueError(f"conditional pmf for history {hist} is not a pmf over states")
            cleaned.append((hist, probs))
        object.__setattr__(self, "early_conditionals", tuple(cleaned))

    @staticmethod
    def _check_suffix_prefix_pattern(matrix, n_states):
        k = round(math.log(len(matrix), n_states))
        for l, row in enumerate(matrix, start=1):
            s_row = super_state(l, k, n_states)
            for c, value in enumerate(row, start=1):
                s_col = super_state(c, k, n_states)
                if s_row[1:] != s_col[:-1] and value != 0:
                    raise ValueError(
                        f"entry ({l},{c}) must be zero: column state {s_col} does not "
                        f"extend row state {s_row}"
                    )

    # -- derived views -------------------------------------------------------

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_super(self) -> int:
        return self.n_states ** self.order

    def super_state_values(self, l: int) -> tuple:
        return tuple(self.states[i] for i in super_state(l, self.order, self.n_states))

    def matrix_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix])

    def initial_float(self) -> np.ndarray:
        return np.array([float(x) for x in self.initial])

    def initial_state_marginal(self) -> np.ndarray:
        """Law of H(0): the first coordinate of the initial super-state."""
        out = np.zeros(self.n_states)
        for l in range(1, self.n_super + 1):
            first = super_state(l, self.order, self.n_states)[0]
            out[first] += float(self.initial[l - 1])
        return out

    def conditional_after(self, history_idx: tuple) -> np.ndarray:
        """pmf of the next state given a history of 1..k-1 state indices.

        Prefers an explicitly supplied early conditional; otherwise conditions
        the initial super-state law on the history prefix.
        """
        m = len(history_idx)
        if not 1 <= m < self.order:
            raise ValueError("history length must be in 1..k-1")
        values = tuple(self.states[i] for i in history_idx)
        for hist, pmf in self.early_conditionals:
            if hist == values:
                return np.array([float(x) for x in pmf])
        joint = np.zeros(self.n_states)
        for l in range(1, self.n_super + 1):
            tup = super_state(l, self.order, self.n_states)
            if tup[:m] == tuple(history_idx):
                joint[tup[m]] += float(self.initial[l - 1])
        total = joint.sum()
        if total <= 0.0:
            raise ValueError(f"history {values} has zero probability and no explicit conditional")
        return joint / total

    def has_complete_early_conditionals(self) -> bool:
        """True when every history of each length 1..k-1 has an explicit conditional."""
        if self.order == 1:
            return True
        supplied = {hist for hist, _ in self.early_conditionals}
        for m in range(1, self.order):
            for combo in itertools.product(self.states, repeat=m):
                if combo not in supplied:
                    return False
        return True


def markov_spec_from_json(obj: dict) -> MarkovChannelSpec:
    """Build a chain spec from its JSON form:
    {"k": 1, "states": [...], "matrix": [[...]], "initial": [...],
     "early_conditionals": [{"history": [...], "pmf": [...]}, ...]}.
    Matrix entries may be numbers or fraction strings like "1/3"."""
    for fieldname in ("k", "states", "matrix", "initial"):
        if fieldname not in obj:
            raise ValueError(f"markov chain spec missing field '{fieldname}'")
    early = tuple(
        (tuple(entry["history"]), tuple(entry["pmf"]))
        for entry in obj.get("early_conditionals", [])
    )
    return MarkovChannelSpec(
        states=tuple(obj["states"]),
        order=int(obj["k"]),
        matrix=tuple(tuple(row) for row in obj["matrix"]),
        initial=tuple(obj["initial"]),
        early_conditionals=early,
    )


def ccdf_matrix(spec: MarkovChannelSpec) -> tuple:
    """Row-wise tail sums: entry (l, n) = sum_{j > n} P[l][j], exact rationals."""
    out = []
    for row in spec.matrix:
        tails = []
        running = sum(row)
        for x in row:
            running -= x
            tails.append(running)
        out.append(tuple(tails))
    return tuple(out)


def comparable_pairs(k: int, N: int) -> list:
    """All 1-based row pairs (l, s) whose super-states compare elementwise <=."""
    if k < 1 or N < 1:
        raise ValueError("need k >= 1 and N >= 1")
    pairs = []
    for l in range(1, N**k + 1):
        tl = super_state(l, k, N)
        for s in range(1, N**k + 1):
            ts = super_state(s, k, N)
            if all(a <= b for a, b in zip(tl, ts)):
                pairs.append((l, s))
    return pairs


@dataclass
class MarkovCertificate:
    verdict: bool
    conditional: bool  # (i) and (iii) hold but (ii) could not be verified
    initial_ok: bool
    early_status: str  # "passed" | "failed" | "unverified" | "vacuous"
    rows_ok: bool
    witnesses: list = field(default_factory=list)  # (condition, detail...) tuples
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "topology": "markov_bc",
            "verdict": self.verdict,
            "conditional": self.conditional,
            "conditions": {
                "initial_state_order": self.initial_ok,
                "early_conditionals": self.early_status,
                "transition_ccdf_rows": self.rows_ok,
            },
            "witnesses": [list(w) for w in self.witnesses],
            "notes": list(self.notes),
        }


def check_markov_degraded(weak: MarkovChannelSpec, strong: MarkovChannelSpec) -> MarkovCertificate:
    """Certify that (weak, strong) forms a degraded BC with weak as the degraded user."""
    if weak.states != strong.states:
        raise ValueError("both chains must share the same state values")
    if weak.order != strong.order:
        raise ValueError("both chains must have the same order")

    cert = MarkovCertificate(
        verdict=False, conditional=False, initial_ok=False, early_status="vacuous", rows_ok=False
    )

    init_verdict = check_usual_order_discrete(
        weak.initial_state_marginal(), strong.initial_state_marginal()
    )
    cert.initial_ok = init_verdict.first_leq
    if not cert.initial_ok:
        cert.witnesses.append(("initial", "H1(0) not <=_st H2(0)"))

    cert.early_status = _check_early_conditionals(weak, strong, cert)

    cert.rows_ok = True
    weak_ccdf = ccdf_matrix(weak)
    strong_ccdf = ccdf_matrix(strong)
    for l, s in comparable_pairs(weak.order, weak.n_states):
        for n, (a, b) in enumerate(zip(weak_ccdf[l - 1], strong_ccdf[s - 1]), start=1):
            if a > b:
                cert.rows_ok = False
                cert.witnesses.append(("rows", l, s, n))
                break
        if not cert.rows_ok:
            break

    fully_checked = cert.early_status in ("passed", "vacuous")
    cert.verdict = cert.initial_ok and cert.rows_ok and fully_checked
    cert.conditional = (
        cert.initial_ok and cert.rows_ok and cert.early_status == "unverified"
    )
    if cert.conditional:
        cert.notes.append(
            "early-step conditionals were not supplied; conditions on steps 1..k-1 "
            "are unverified and the certificate is conditional on them"
        )
    return cert


def _check_early_conditionals(weak, strong, cert) -> str:
    if weak.order == 1:
        return "vacuous"
    if not (weak.has_complete_early_conditionals() and strong.has_complete_early_conditionals()):
        return "unverified"
    status = "passed"
    for m in range(1, weak.order):
        for hw in itertools.product(range(weak.n_states), repeat=m):
            for hs in itertools.product(range(weak.n_states), repeat=m):
                if any(a > b for a, b in zip(hw, hs)):
                    continue
                verdict = check_usual_order_discrete(
                    weak.conditional_after(hw), strong.conditional_after(hs)
                )
                if not verdict.first_leq:
                    status = "failed"
                    cert.witnesses.append(("early", m, hw, hs))
    return status


def check_indecomposable(spec: MarkovChannelSpec) -> bool:
    """True iff some power P^n, n <= R(R-1)+1 with R = N^k, has an all-positive column."""
    reach = spec.matrix_float() > 0.0
    step = reach.copy()
    bound = spec.n_super * (spec.n_super - 1) + 1
    for _ in range(bound):
        if np.any(np.all(step, axis=0)):
            return True
        step = (step.astype(float) @ reach.astype(float)) > 0.0
    return False


def stationary_distribution(spec: MarkovChannelSpec) -> np.ndarray:
    """Stationary law of the super-state chain by eigenvector extraction."""
    mat = spec.matrix_float()
    vals, vecs = np.linalg.eig(mat.T)
    idx = int(np.argmin(np.abs(vals - 1.0)))
    pi = np.real(vecs[:, idx])
    pi = np.abs(pi)
    return pi / pi.sum()


def coupled_paths(
    weak: MarkovChannelSpec,
    strong: MarkovChannelSpec,
    length: int,
    uniforms: np.ndarray,
    force: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate both chains from one shared uniform stream per step.

    uniforms has shape (n_paths, length); entry (p, m) drives step m of path p
    for both chains through the discrete generalized inverse of each chain's
    current conditional law.  Returns two (n_paths, length) arrays of state
    values.  Refuses unverified pairs unless force=True.
    """
    if not force:
        cert = check_markov_degraded(weak, strong)
        if not cert.verdict:
            raise ValueError(
                "degradedness is not certified for this pair; pass force=True to simulate anyway"
            )
    u = np.atleast_2d(np.asarray(uniforms, dtype=float))
    if u.shape[1] != length:
        raise ValueError(f"uniform stream must have {length} columns, got {u.shape[1]}")
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise ValueError("uniforms must lie strictly inside (0, 1)")

    paths = [_simulate_chain(spec, length, u) for spec in (weak, strong)]
    return paths[0], paths[1]


def _simulate_chain(spec: MarkovChannelSpec, length: int, u: np.ndarray) -> np.ndarray:
    n_paths = u.shape[0]
    k, N = spec.order, spec.n_states
    states = np.asarray(spec.states)
    idx_path = np.empty((n_paths, length), dtype=int)

    cum0 = np.cumsum(spec.initial_state_marginal())
    idx_path[:, 0] = np.searchsorted(cum0, u[:, 0], side="left")

    for m in range(1, min(k, length)):
        # conditional law given each realized history of length m
        cums = np.empty((N**m, N))
        for flat, hist in enumerate(itertools.product(range(N), repeat=m)):
            try:
                cums[flat] = np.cumsum(spec.conditional_after(hist))
            except ValueError:
                cums[flat] = np.cumsum(np.full(N, 1.0 / N))  # unreachable history
        flat_hist = np.zeros(n_paths, dtype=int)
        for j in range(m):
            flat_hist = flat_hist * N + idx_path[:, j]
        rows = cums[flat_hist]
        idx_path[:, m] = _rowwise_ginv(rows, u[:, m])

    if length > k:
        # per-row next-state law: the zero pattern confines row l to the
        # contiguous column block that extends l's suffix, so slicing it out
        # yields the N-entry conditional pmf of the next state
        matf = spec.matrix_float()
        reduced = np.empty((N**k, N))
        for flat in range(N**k):
            start = (flat % (N ** (k - 1))) * N
            reduced[flat] = matf[flat, start:start + N]
        cums = np.cumsum(reduced, axis=1)
        rows_id = np.zeros(n_paths, dtype=int)
        for j in range(k):
            rows_id = rows_id * N + idx_path[:, j]
        for m in range(k, length):
            nxt = _rowwise_ginv(cums[rows_id], u[:, m])
            idx_path[:, m] = nxt
            rows_id = (rows_id % (N ** (k - 1))) * N + nxt

    return states[idx_path]


def _rowwise_ginv(cum_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Smallest index j with cum_rows[i, j] >= u[i], per row."""
    return (cum_rows < u[:, None]).sum(axis=1)
