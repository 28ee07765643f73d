"""Transport matrices on the forward-looking polytope and the crossing-repair sweep.

A feasible matrix sends unit mass from each a_i (i <= N) forward to the b's,
with every b_j (j <= N) receiving unit mass.  Four points a_k < a_i < b_j < b_l
carrying transversal mass form a crossing; repairing it moves the overlap to
the uncrossed pairs and, by concavity of the gauge, never increases cost.
All polytope arithmetic is exact rational; gauges touch floats only at the
final evaluation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, FeasibilityError, SizeLimitError
from .gauges import Gauge, eval_gauge
from .rng import BitStream
from .stable_alloc import PointConfig, StableMatch, compute_N, stable_allocation


@dataclass
class TransportMatrix:
    """Sparse nonnegative rational matrix over a PointConfig window.

    Row/column indices are 0-based into cfg.a / cfg.b; the constraint window
    is rows i < N and columns j < N.
    """

    cfg: PointConfig
    N: int
    entries: dict[tuple[int, int], Fraction] = field(default_factory=dict)

    def copy(self) -> "TransportMatrix":
        return TransportMatrix(self.cfg, self.N, dict(self.entries))

    def get(self, i: int, j: int) -> Fraction:
        return self.entries.get((i, j), Fraction(0))

    def set(self, i: int, j: int, v: Fraction) -> None:
        if v == 0:
            self.entries.pop((i, j), None)
        else:
            self.entries[(i, j)] = v

    def row_sum(self, i: int) -> Fraction:
        return sum((v for (r, _), v in self.entries.items() if r == i), Fraction(0))

    def col_sum(self, j: int) -> Fraction:
        return sum((v for (_, c), v in self.entries.items() if c == j), Fraction(0))

    def validate(self) -> None:
        """Raise FeasibilityError listing every violated constraint."""
        bad = []
        for (i, j), v in self.entries.items():
            if v < 0:
                bad.append(("nonnegative", (i, j), v))
            if self.cfg.a[i] > self.cfg.b[j]:
                bad.append(("forward_looking", (i, j), v))
        for i in range(self.N):
            s = self.row_sum(i)
            if s != 1:
                bad.append(("row_sum", i, s - 1))
        for j in range(self.N):
            s = self.col_sum(j)
            if s != 1:
                bad.append(("col_sum", j, s - 1))
        if bad:
            raise FeasibilityError(f"{len(bad)} constraint violations", bad)

    def cost(self, g: Gauge) -> float:
        """Window cost with the double-count convention (pairs i,j < N twice)."""
        total = 0.0
        for (i, j), v in self.entries.items():
            if v == 0:
                continue
            mult = (i < self.N) + (j < self.N)
            if mult:
                gap = self.cfg.b[j] - self.cfg.a[i]
                total += mult * float(v) * eval_gauge(g, float(gap))
        return total

    def to_json(self) -> dict:
        trips = sorted(
            [[i, j, v.numerator, v.denominator] for (i, j), v in self.entries.items()])
        return {"N": self.N, "entries": trips}

    @classmethod
    def from_json(cls, cfg: PointConfig, obj: dict) -> "TransportMatrix":
        try:
            entries = {(int(i), int(j)): Fraction(int(p), int(q))
                       for i, j, p, q in obj["entries"]}
            return cls(cfg, int(obj["N"]), entries)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed transport matrix: {obj!r}") from exc


@dataclass(frozen=True)
class Crossing:
    k: int
    i: int
    j: int
    l: int


@dataclass(frozen=True)
class CostReport:
    lhs: float
    rhs: float
    gauge: Gauge

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
                "gauge": self.gauge.to_json()}


def stable_indicator(cfg: PointConfig, N: int | None = None,
                     match: StableMatch | None = None) -> TransportMatrix:
    """The indicator matrix of the stable allocation, rows restricted to the window."""
    if match is None:
        match = stable_allocation(cfg)
    if N is None:
        N = compute_N(cfg)["N"]
    entries = {(i, match.tau[i]): Fraction(1) for i in range(N)}
    return TransportMatrix(cfg, N, entries)


def _is_crossing(pi: TransportMatrix, k: int, i: int, j: int, l: int) -> bool:
    a, b = pi.cfg.a, pi.cfg.b
    return (a[k] < a[i] < b[j] < b[l]
            and pi.get(k, j) > 0 and pi.get(i, l) > 0)


def find_crossing(pi: TransportMatrix) -> Crossing | None:
    """Next crossing in the prescribed four-level scan order.

    b_j left to right over the window; a_i < b_j right to left; a_k further
    left, right to left; b_l further right, left to right.  The last two
    scans run over the whole finite support (the finite stand-in for the
    limit steps).
    """
    rows = sorted({i for (i, _), v in pi.entries.items() if v > 0})
    cols = sorted({j for (_, j), v in pi.entries.items() if v > 0})
    if not rows or not cols:
        return None
    a, b = pi.cfg.a, pi.cfg.b
    n_cols = max(max(cols) + 1, pi.N)
    n_rows = max(max(rows) + 1, pi.N)
    for j in range(n_cols):
        for i in range(n_rows):
            if a[i] >= b[j]:
                continue
            for k in range(i + 1, n_rows):
                if pi.get(k, j) == 0 or a[k] >= a[i]:
                    continue
                for l in range(j + 1, len(b)):
                    if pi.get(i, l) > 0 and b[l] > b[j]:
                        return Crossing(k=k, i=i, j=j, l=l)
    return None


def repair_crossing(pi: TransportMatrix, c: Crossing) -> TransportMatrix:
    """Move delta = min(pi_kj, pi_il) to the uncrossed pairs (i,j) and (k,l)."""
    if not _is_crossing(pi, c.k, c.i, c.j, c.l):
        raise ConfigError(f"{c} is not a crossing of this matrix")
    out = pi.copy()
    delta = min(pi.get(c.k, c.j), pi.get(c.i, c.l))
    out.set(c.k, c.j, pi.get(c.k, c.j) - delta)
    out.set(c.i, c.l, pi.get(c.i, c.l) - delta)
    out.set(c.i, c.j, pi.get(c.i, c.j) + delta)
    out.set(c.k, c.l, pi.get(c.k, c.l) + delta)
    return out


def repair_sweep(pi: TransportMatrix, max_steps: int | None = None) -> dict:
    """Repair crossings until none remain or the step budget runs out.

    Returns {"matrix", "steps", "converged", "trace"} where trace holds the
    matrix after every repair (for cost-monotonicity checks).
    """
    n = max(len(pi.cfg.a), len(pi.cfg.b))
    if max_steps is None:
        max_steps = 10 * n ** 4
    trace = [pi]
    cur = pi
    steps = 0
    while steps < max_steps:
        c = find_crossing(cur)
        if c is None:
            return {"matrix": cur, "steps": steps, "converged": True,
                    "trace": trace}
        cur = repair_crossing(cur, c)
        trace.append(cur)
        steps += 1
    return {"matrix": cur, "steps": steps, "converged": False, "trace": trace}


def inequality_check(pi: TransportMatrix, cfg: PointConfig | None = None,
                     g: Gauge | None = None, N: int | None = None) -> CostReport:
    """Both sides of the window inequality: pi-cost >= 2 sum psi(tau(a_i) - a_i)."""
    if g is None:
        raise ConfigError("a gauge is required")
    cfg = cfg or pi.cfg
    N = N if N is not None else pi.N
    pi.validate()
    match = stable_allocation(cfg)
    rhs = 2.0 * sum(
        eval_gauge(g, float(cfg.b[match.tau[i]] - cfg.a[i])) for i in range(N))
    return CostReport(lhs=pi.cost(g), rhs=rhs, gauge=g)


_PERMS_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _perms(m: int, n: int) -> np.ndarray:
    if (m, n) not in _PERMS_CACHE:
        _PERMS_CACHE[m, n] = np.array(
            list(itertools.permutations(range(m), n)), dtype=np.int64)
    return _PERMS_CACHE[m, n]


def permutation_oracle(cfg: PointConfig, g: Gauge, N: int | None = None,
                       n_candidates: int | None = None) -> dict:
    """Exhaustive minimum over feasible window matchings (N <= 8).

    Default enumeration is over the square window (bijections of the N a's
    onto the N leftmost b's, the paper's constraint set with the identity
    tail); passing n_candidates > N widens the b-pool to injective
    forward-looking maps.
    """
    if N is None:
        N = compute_N(cfg)["N"]
    if N > 8:
        raise SizeLimitError(f"oracle limited to N <= 8, got {N}")
    m = N if n_candidates is None else n_candidates
    if m > 10:
        raise SizeLimitError(f"oracle limited to <= 10 b-candidates, got {m}")
    if m < N or m > len(cfg.b):
        raise ConfigError("b-candidate pool must cover the window")
    a = np.array([float(x) for x in cfg.a[:N]])
    b = np.array([float(x) for x in cfg.b[:m]])
    psi = np.full((N, m), np.inf)
    for i in range(N):
        for j in range(m):
            gap = b[j] - a[i]
            if gap > 0:
                psi[i, j] = eval_gauge(g, gap)
    sigmas = _perms(m, N)
    costs = psi[np.arange(N)[None, :], sigmas].sum(axis=1)
    best = int(np.argmin(costs))
    if not np.isfinite(costs[best]):
        raise FeasibilityError("no feasible matching in the window")
    return {"min_cost": float(costs[best]), "sigma": tuple(int(x) for x in sigmas[best])}


def sample_feasible_matrix(cfg: PointConfig, N: int, seed: int,
                           n_perturbations: int = 12) -> TransportMatrix:
    """Random feasible matrix: stable indicator plus random anti-repairs.

    Each perturbation picks two occupied cells (i, j), (k, l) with i < k and
    j < l (so a_k < a_i and b_j < b_l) and moves a random rational fraction
    of the available mass onto the crossed pairs (k, j), (i, l), preserving
    all constraints.  Deterministic in the seed.
    """
    pi = stable_indicator(cfg, N)
    rng = BitStream(seed, 0xFEA51B1E)
    a, b = cfg.a, cfg.b
    for _ in range(n_perturbations):
        occupied = sorted((i, j) for (i, j), v in pi.entries.items() if v > 0)
        cands = []
        for (i, j), (k, l) in itertools.combinations(occupied, 2):
            if i == k or j == l:
                continue
            if i > k:
                (i, j), (k, l) = (k, l), (i, j)
            if j > l:
                continue
            # Anti-repair feasibility: both new cells must stay forward-looking.
            if a[k] < b[j] and a[i] < b[l] and a[k] < a[i] and b[j] < b[l]:
                cands.append((i, j, k, l))
        if not cands:
            continue
        pick = int(rng.uniform_fraction() * len(cands))
        i, j, k, l = cands[min(pick, len(cands) - 1)]
        avail = min(pi.get(i, j), pi.get(k, l))
        # Random rational delta in (0, avail] with a small denominator.
        num = int(rng.uniform_fraction() * 8) + 1
        delta = avail * Fraction(num, 8)
        if delta == 0:
            continue
        pi.set(i, j, pi.get(i, j) - delta)
        pi.set(k, l, pi.get(k, l) - delta)
        pi.set(k, j, pi.get(k, j) + delta)
        pi.set(i, l, pi.get(i, l) + delta)
    pi.validate()
    return pi


def random_interleaved_config(seed: int, n_pairs: int,
                              value_range: int = 1000) -> tuple[PointConfig, int]:
    """A random disjoint interleaved instance with enough padding for compute_N.

    Returns (config, N).
    """
    rng = BitStream(seed, 0xC0F19)
    values: set[Fraction] = set()
    while len(values) < 2 * n_pairs:
        values.add(Fraction(int(rng.uniform_fraction() * value_range * 4), 4))
    vals = sorted(values)
    labels = []
    for v in vals:
        labels.append((v, int(rng.uniform_fraction() * 2)))
    a_vals = [v for v, t in labels if t == 0]
    b_vals = [v for v, t in labels if t == 1]
    # Guarantee nonempty sides and right-padding so every a matches and the
    # f-function reaches its target.
    top = vals[-1]
    pad = len(a_vals) + 2
    b_vals += [top + k for k in range(1, pad + 1)]
    bottom = vals[0]
    a_vals = sorted(a_vals, reverse=True) or [bottom - 1]
    cfg = PointConfig(tuple(a_vals), tuple(sorted(b_vals)))
    N = compute_N(cfg)["N"]
    if N > len(a_vals):
        # The window must be covered by the a-truncation; pad below b_1 (this
        # leaves f on [b_1, a_1], hence N, unchanged) and widen the b-padding
        # so every added a still matches.
        extra = N - len(a_vals)
        low = min(a_vals[-1], cfg.b[0])
        a_vals += [low - k for k in range(1, extra + 1)]
        b_vals += [b_vals[-1] + k for k in range(1, extra + 1)]
        cfg = PointConfig(tuple(a_vals), tuple(sorted(b_vals)))
        N = compute_N(cfg)["N"]
    return cfg, N
