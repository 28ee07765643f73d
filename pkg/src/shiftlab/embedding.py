"""The embedding time T*, allocation rule tau*, and excursion machinery.

T* is the first positive step at which the additive functional of nu catches
up with that of mu; tau* sends each step s to the first later step balancing
the two functionals over [s, t].  In exact mode (all effective down-steps of
size 1/q) the balance events are hit exactly and every identity below holds
with equality in rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError, HorizonExceededError
from .gauges import Gauge, eval_gauge
from .measures import MeasurePair
from .rng import BitStream, STREAM_UFLAG
from .walk import LocalTimeLedger

Mode = str  # "exact" | "crossing"


@dataclass(frozen=True)
class EmbeddingResult:
    t_star: int
    site: int
    mode: Mode
    u_flag: int
    censored: bool = False

    def to_json(self, dt: Fraction) -> dict:
        return {
            "t_star_steps": self.t_star,
            "t_star_time": float(self.t_star * dt),
            "site": self.site,
            "mode": self.mode,
            "u_flag": self.u_flag,
            "censored": self.censored,
        }


@dataclass(frozen=True)
class Excursion:
    """An interval [left, tau*(left-adjacent charged step)] in signed steps."""
    left: int
    right: int
    mass: Fraction

    def to_csv_row(self) -> str:
        return f"{self.left},{self.right},{self.mass}"


@dataclass(frozen=True)
class ExcursionChain:
    levels: tuple[Fraction, ...]
    sigma: tuple[int, ...]
    rho: tuple[int, ...]


def _require_exact(ledger: LocalTimeLedger) -> None:
    if not ledger.pair.exact_mode_ok:
        raise ConfigError(
            "exact mode requires every effective nu-atom to weigh exactly 1/q; "
            "use crossing mode for general weights")


def _draw_u_flag(ledger: LocalTimeLedger) -> int:
    """Remark-2 Bernoulli, measurable w.r.t. the start site.

    U ~ Bernoulli(mu~(start)/mu(start)); in the orthogonal case this is
    always 1.
    """
    pair = ledger.pair
    if pair.orthogonal:
        return 1
    start = ledger.path.start
    w = pair.mu.weight(start)
    if w == 0:
        raise ConfigError("start site carries no mu mass; start_law must be mu")
    p = pair.mu_tilde.weight(start) / w
    if p == 1:
        return 1
    if p == 0:
        return 0
    u = BitStream(ledger.path.cfg.seed, ledger.path.replica,
                  STREAM_UFLAG).uniform_fraction()
    return 1 if u < p else 0


def compute_t_star(ledger: LocalTimeLedger, pair: MeasurePair,
                   mode: Mode = "exact") -> EmbeddingResult:
    """First positive step with D = 0 (exact) or D <= 0 (crossing).

    Raises HorizonExceededError with the attained minimum of D when the
    event does not occur within the forward horizon.
    """
    if pair is not ledger.pair and pair.to_json() != ledger.pair.to_json():
        raise ConfigError("measure pair does not match the ledger")
    if mode not in ("exact", "crossing"):
        raise ConfigError(f"unknown embedding mode {mode!r}")
    if mode == "exact":
        _require_exact(ledger)
    u_flag = _draw_u_flag(ledger)
    if u_flag == 0:
        return EmbeddingResult(t_star=0, site=ledger.path.start, mode=mode,
                               u_flag=0)
    i0 = ledger.idx(0)
    base = ledger.X[i0]                    # C(-1)
    c_fwd = ledger.X[i0 + 2:]              # C(1), C(2), ...
    if mode == "exact":
        hits = np.flatnonzero(c_fwd == base)
    else:
        hits = np.flatnonzero(c_fwd <= base)
    if hits.size == 0:
        d_min = Fraction(int((c_fwd - base).min()), ledger.q) if c_fwd.size else None
        raise HorizonExceededError(
            "T* not reached within forward horizon",
            horizon=ledger.hf, attained=d_min)
    n = int(hits[0]) + 1
    return EmbeddingResult(t_star=n, site=int(ledger.pos_all[i0 + n]),
                           mode=mode, u_flag=1)


def compute_tau_star(ledger: LocalTimeLedger, s: int) -> int:
    """Smallest t > s with equal mu- and nu-mass over [s, t] (exact mode)."""
    _require_exact(ledger)
    i_s = ledger.idx(s)
    target = ledger.X[i_s]                 # C(s-1)
    c_later = ledger.X[i_s + 2:]           # C(s+1), ...
    hits = np.flatnonzero(c_later == target)
    if hits.size == 0:
        raise HorizonExceededError(
            f"tau*({s}) not reached within forward horizon", horizon=ledger.hf)
    return s + 1 + int(hits[0])


def mu_charged_steps(ledger: LocalTimeLedger, left: int, right: int) -> np.ndarray:
    """Signed steps in [left, right) carrying mu mass."""
    lo, hi = ledger.idx(left), ledger.idx(right)
    rel = np.flatnonzero(ledger.wmu[lo:hi] > 0)
    return rel + left


def excursion_mass(ledger: LocalTimeLedger, left: int, right: int) -> Fraction:
    """mu-mass of visits at steps in [left, right)."""
    return Fraction(
        int(ledger.Pmu[ledger.idx(right)] - ledger.Pmu[ledger.idx(left)]),
        ledger.q)


def excursion_from(ledger: LocalTimeLedger, a: int) -> Excursion:
    right = compute_tau_star(ledger, a)
    return Excursion(left=a, right=right, mass=excursion_mass(ledger, a, right))


def decompose_excursions(ledger: LocalTimeLedger, up_to_level: Fraction,
                         max_levels: int = 64):
    """rho(u)/sigma(u) for a grid of levels plus the excursion partition.

    The level grid is the attainable multiples of 1/q up to ``up_to_level``
    (thinned to at most ``max_levels`` entries).  The partition lists the
    maximal excursions [a, tau*(a)] covering all mu-charged steps of
    [sigma(u_max), rho(u_max)], scanned left to right.

    Discrete convention: sigma(u) is the first backward time at or below the
    nominal level C(0) - u*q (backward down-moves have mu-atom size and can
    skip a level exactly), and rho(u) is the first forward hit of the level
    actually attained at sigma(u).  Forward down-moves are unit in exact
    mode, so that hit exists and tau*(sigma(u)) = rho(u) holds exactly;
    u = 0 degenerates to [0, 0].
    """
    _require_exact(ledger)
    up_to_level = Fraction(up_to_level)
    if up_to_level < 0:
        raise ConfigError("level must be nonnegative")
    q = ledger.q
    i0 = ledger.idx(0)
    c0 = ledger.X[i0 + 1]                  # C(0)
    c_fwd = ledger.X[i0 + 1:]              # C(0), C(1), ...
    c_bwd = ledger.X[i0::-1]               # C(-1), C(-2), ... = X[i0], X[i0-1], ...

    units = int(up_to_level * q)
    ks = list(range(0, units + 1))
    if len(ks) > max_levels:
        stride = -(-len(ks) // max_levels)
        ks = ks[::stride]
        if ks[-1] != units:
            ks.append(units)

    levels, sigmas, rhos = [], [], []
    for k in ks:
        u = Fraction(k, q)
        if k == 0:
            levels.append(u)
            sigmas.append(0)
            rhos.append(0)
            continue
        level = c0 - k
        sig_hits = np.flatnonzero(c_bwd <= level)
        if sig_hits.size == 0:
            raise HorizonExceededError(
                f"level {u} not attained on both sides",
                attained=levels[-1] if levels else Fraction(0))
        j = int(sig_hits[0])
        attained_level = int(c_bwd[j])
        rho_hits = np.flatnonzero(c_fwd == attained_level)
        if rho_hits.size == 0:
            raise HorizonExceededError(
                f"level {u} not attained on both sides",
                attained=levels[-1] if levels else Fraction(0))
        levels.append(u)
        rhos.append(int(rho_hits[0]))
        # sigma(u) = max{t <= 0 : C(t-1) <= level}; c_bwd[j] = C(-1-j).
        sigmas.append(-j)
    chain = ExcursionChain(levels=tuple(levels), sigma=tuple(sigmas),
                           rho=tuple(rhos))

    # Greedy partition of the outermost interval into excursions [a, tau*(a)].
    left, right = chain.sigma[-1], chain.rho[-1]
    excursions = []
    charged = mu_charged_steps(ledger, left, right) if right > left else np.empty(0, int)
    pos = 0
    while pos < len(charged):
        a = int(charged[pos])
        exc = excursion_from(ledger, a)
        if exc.right > right:
            raise AssertionError("excursion escapes the sigma/rho window")
        excursions.append(exc)
        pos = int(np.searchsorted(charged, exc.right))
    return chain, excursions


def cost_of_tau_star(ledger: LocalTimeLedger, exc: Excursion, g: Gauge) -> float:
    """Sum over mu-charged steps s in [left, right) of mu(x_s) psi((tau*(s)-s) dt).

    One-pass evaluation: a charged step s waits for the first later step
    whose C value returns to C(s-1).  Tests cross-check the result against
    a direct per-step rescan.
    """
    _require_exact(ledger)
    dt = float(ledger.path.cfg.dt)
    lo, hi = ledger.idx(exc.left), ledger.idx(exc.right)
    waiting: dict[int, list[int]] = {}
    tau: dict[int, int] = {}
    for i in range(lo, hi + 1):
        step = i - ledger.hb
        c = int(ledger.X[i + 1])           # C(step)
        if c in waiting:
            for s in waiting.pop(c):
                tau[s] = step
        if ledger.wmu[i] > 0 and step < exc.right:
            waiting.setdefault(int(ledger.X[i]), []).append(step)  # C(step-1)
    total = 0.0
    for s, t in tau.items():
        w = float(ledger.wmu[ledger.idx(s)]) / ledger.q
        total += w * eval_gauge(g, (t - s) * dt)
    if waiting:
        raise HorizonExceededError(
            "tau* leaves the ledger range for some charged step in the excursion",
            horizon=ledger.hf)
    return total


def cost_of_tau_star_rescan(ledger: LocalTimeLedger, exc: Excursion,
                            g: Gauge) -> float:
    """Independent oracle: recompute tau* per charged step by direct scan."""
    dt = float(ledger.path.cfg.dt)
    total = 0.0
    for s in mu_charged_steps(ledger, exc.left, exc.right):
        w = float(ledger.wmu[ledger.idx(int(s))]) / ledger.q
        t = compute_tau_star(ledger, int(s))
        total += w * eval_gauge(g, (t - int(s)) * dt)
    return total


def tau_star_map(ledger: LocalTimeLedger, left: int, right: int
                 ) -> tuple[dict[int, int], list[int]]:
    """tau* for every mu-charged step in [left, right), in one forward pass.

    A charged step s waits for the first later step whose C value returns to
    C(s-1); the scan continues to the forward horizon so targets may lie
    beyond ``right``.  Returns (tau, unresolved) where unresolved lists the
    charged steps whose tau* exceeds the horizon.
    """
    _require_exact(ledger)
    lo = ledger.idx(left)
    hi_add = ledger.idx(right)
    waiting: dict[int, list[int]] = {}
    tau: dict[int, int] = {}
    n_wait = 0
    for i in range(lo, len(ledger.pos_all)):
        step = i - ledger.hb
        c = int(ledger.X[i + 1])
        if c in waiting:
            for s in waiting.pop(c):
                tau[s] = step
                n_wait -= 1
        if i >= hi_add and n_wait == 0:
            break
        if i < hi_add and ledger.wmu[i] > 0:
            waiting.setdefault(int(ledger.X[i]), []).append(step)
            n_wait += 1
    unresolved = sorted(s for lst in waiting.values() for s in lst)
    return tau, unresolved


def match_slots(ledger: LocalTimeLedger, left: int, right: int) -> list[tuple[int, int]]:
    """tau* as parenthesis matching of unit-mass slots on [left, right].

    Every mu-charged step contributes mu(x)*q open slots, every nu-charged
    step one close slot (exact mode).  Returns (source_step, target_step)
    pairs; in exact mode this reproduces tau* restricted to charged steps.
    """
    _require_exact(ledger)
    lo, hi = ledger.idx(left), ledger.idx(right)
    pairs: list[tuple[int, int]] = []
    stack: list[int] = []
    for i in range(lo, hi + 1):
        step = i - ledger.hb
        # Closes before opens: a slot's target is strictly later than its source.
        for _ in range(int(ledger.wnu[i])):
            if stack:
                pairs.append((stack.pop(), step))
        for _ in range(int(ledger.wmu[i])):
            stack.append(step)
    pairs.sort()
    return pairs
