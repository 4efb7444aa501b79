"""Operator-norm bounds and Monte-Carlo convergence experiments.

Bounds for the sampled operators::

    rho(N)           = 2 sqrt((L^2 - K^2) d_N^2 + K d_N)
    sampled_bound(N) = sqrt(4 log(2N / delta) / (kappa N)) + rho(N)

with ``d_N = 1/N`` for deterministic latents and
``d_N = 1/N + sqrt(8 log(N / delta) / (N + 1))`` for stochastic ones.
Experiments compare embedded centralities of sampled graphs with the graphon
centrality in L2 and fit rates and constants to the bounds.
"""
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, NamedTuple, Optional

import numpy as np

from . import numerics
from .centrality import graphon_centrality, l2_distance
from .errors import DomainError, GraphonError, NumericError
from .graph import embed_step, graph_centrality, rescale
from .graphon import SBMGraphon, graphon_to_dict
from .sampling import kappa_schedule, make_latents, probability_matrix, sample_adjacency

#: Runs with a larger share of failed trials are rejected.
MAX_EXCLUDED_FRACTION = 0.10


@dataclass(frozen=True)
class BoundParams:
    L: float = 0.0
    K: int = 0
    delta: float = 0.01
    mode: str = "deterministic"

    def __post_init__(self):
        if not self.L >= 0:
            raise DomainError(f"L must be >= 0, got {self.L}")
        if int(self.K) != self.K or self.K < 0:
            raise DomainError(f"K must be a nonnegative integer, got {self.K}")
        if self.mode not in ("deterministic", "stochastic"):
            raise DomainError(f"mode must be deterministic or stochastic, got {self.mode!r}")

    @classmethod
    def for_graphon(cls, W, delta=0.01, mode="deterministic"):
        return cls(W.metadata.lipschitz_L, W.metadata.K, delta, mode)


class Rho(NamedTuple):
    rho: float
    d_N: float


def check_delta(N, delta):
    lo, hi = N * math.exp(-N / 5.0), math.exp(-1.0)
    if not lo < delta < hi:
        raise DomainError(f"delta={delta} outside the admissible range ({lo:.4g}, {hi:.4g}) for N={N}; increase N or change delta")


def order_stat_bound(N, delta):
    return math.sqrt(8.0 * math.log(N / delta) / (N + 1))


def d_N(N, bp):
    if bp.mode == "deterministic":
        return 1.0 / N
    check_delta(N, bp.delta)
    return 1.0 / N + order_stat_bound(N, bp.delta)


def rho(N, bp):
    """Operator-norm bound between the sampled and the true graphon operator."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    d = d_N(N, bp)
    rad = (bp.L ** 2 - bp.K ** 2) * d * d + bp.K * d
    if rad < 0:
        raise DomainError(f"rho radicand is negative ({rad:.3g}) for N={N}; use a larger N")
    return Rho(2.0 * math.sqrt(rad), d)


def sampled_bound(N, kappa, bp):
    if not 0.0 < kappa <= 1.0:
        raise DomainError(f"kappa must lie in (0, 1], got {kappa}")
    return math.sqrt(4.0 * math.log(2.0 * N / bp.delta) / (kappa * N)) + rho(N, bp).rho


class DegreeCondition(NamedTuple):
    holds: bool
    spacing_holds: bool
    degree_holds: bool
    lhs: float
    rhs: float
    spacing_lhs: float
    spacing_rhs: float


def max_degree(W):
    """``max_x int W(x, y) dy``."""
    c = graphon_centrality(W, "degree", resolution=256)
    if c.is_step:
        return float(np.max(c.values))
    x = np.linspace(0.0, 1.0, 4097)
    return float(np.max(c(x)))


def max_degree_condition(W, N, bp, delta=None, C_d=None):
    """Whether N is large enough for the maximum-degree lower bound to apply.

    Checks ``2 d_N < Delta_min`` (shortest Lipschitz interval) and
    ``log(2N / delta) / N + d_N (2K + 3L) < C^d`` with ``C^d`` the maximum degree.
    """
    delta = bp.delta if delta is None else delta
    bp = BoundParams(bp.L, bp.K, delta, bp.mode)
    try:
        d = d_N(N, bp)
    except DomainError:
        return DegreeCondition(False, False, False, math.inf, 0.0, math.inf, W.metadata.min_spacing)
    C_d = max_degree(W) if C_d is None else C_d
    spacing = W.metadata.min_spacing
    lhs = math.log(2.0 * N / delta) / N + d * (2 * bp.K + 3 * bp.L)
    s_ok, d_ok = 2 * d < spacing, lhs < C_d
    return DegreeCondition(s_ok and d_ok, s_ok, d_ok, lhs, C_d, 2 * d, spacing)


# ---------------------------------------------------------------------------
# Monte-Carlo experiments
# ---------------------------------------------------------------------------


def trial_seed(master, N, trial):
    """Seed of one (N, trial) work unit, hashed from the master seed."""
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, int(N), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def grid_aligned(W, N):
    """True when every discontinuity of W lies on the grid ``{i / N}``; None for smooth graphons."""
    pts = set(W.metadata.breakpoints)
    if isinstance(W, SBMGraphon):
        pts |= set(W.boundaries[1:-1].tolist())
    if not pts:
        return None
    return all((Fraction(p).limit_denominator(10 ** 9) * N).denominator == 1 for p in pts)


def _stats(errors):
    e = np.sort(np.asarray(errors, dtype=np.float64))
    if e.size == 0:
        return math.nan, math.nan, math.nan
    std = float(np.std(e, ddof=1)) if e.size > 1 else 0.0
    return float(np.mean(e)), std, float(np.median(e))


def fit_rate(N_values, errors):
    """Slope of log(error) against log(N); None with fewer than two usable points."""
    N = np.asarray(N_values, dtype=np.float64)
    e = np.asarray(errors, dtype=np.float64)
    ok = np.isfinite(e) & (e > 0)
    if ok.sum() < 2:
        return None
    return float(np.polyfit(np.log(N[ok]), np.log(e[ok]), 1)[0])


def fit_constant(errors, bounds):
    """Least-squares scale in log space: ``exp(mean(log e - log b))``."""
    e = np.asarray(errors, dtype=np.float64)
    b = np.asarray(bounds, dtype=np.float64)
    ok = np.isfinite(e) & np.isfinite(b) & (e > 0) & (b > 0)
    if not ok.any():
        return None
    return float(np.exp(np.mean(np.log(e[ok]) - np.log(b[ok]))))


def _timestamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def config_hash(doc):
    return hashlib.sha256(json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


@dataclass
class ConvergenceReport:
    graphon_id: str
    kind: str
    params: dict
    mode: str
    tau: float
    delta: float
    N_values: List[int]
    rows: List[dict]
    fitted_rate: Optional[float]
    fitted_C: Optional[float]
    fitted_rate_det: Optional[float]
    fitted_C_rho: Optional[float]
    flags: List[str] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def column(self, key):
        return [r[key] for r in self.rows]

    def to_dict(self):
        return {
            "graphon_id": self.graphon_id,
            "kind": self.kind,
            "params": dict(self.params),
            "mode": self.mode,
            "tau": self.tau,
            "delta": self.delta,
            "N_values": list(self.N_values),
            "rows": [dict(r) for r in self.rows],
            "fitted_rate": self.fitted_rate,
            "fitted_C": self.fitted_C,
            "fitted_rate_det": self.fitted_rate_det,
            "fitted_C_rho": self.fitted_C_rho,
            "flags": list(self.flags),
            "provenance": dict(self.provenance),
        }


CSV_STATS = ("mean_error", "std_error", "median_error", "mean_error_det", "rho_bound", "sampled_bound")


def report_csv_rows(report):
    """One row per (N, statistic)."""
    out = [("N", "statistic", "value")]
    for r in report.rows:
        for s in CSV_STATS + ("n_seeds", "n_excluded", "aligned", "bound_guaranteed"):
            out.append((r["N"], s, r[s]))
    return out


def _centrality_error(M, kind, alpha, beta, reference):
    c = graph_centrality(M, kind, alpha, beta)
    if kind == "eigenvector" and c.meta.get("degenerate"):
        raise NumericError("dominant eigenvalue of the sample is not simple")
    return l2_distance(embed_step(c), reference)


def run_convergence(W, kind, N_values, seeds_per_N=20, mode="deterministic", tau=0.0, reference=None,
                    alpha=None, beta=None, master_seed=0, delta=0.01, jobs=1, with_det=True):
    """Error of sampled-graph centralities against the graphon centrality, per N.

    For every N and trial the graph ``S`` is drawn, rescaled to ``S / (N kappa)``
    and its centrality embedded as a step function; ``mean_error`` and
    ``std_error`` summarise ``|c_hat_N - c|`` over trials.  ``mean_error_det``
    is the same for ``P / N`` (no edge sampling).  Failed trials are excluded
    and counted; more than 10% of failures raises ``NumericError``.
    """
    N_values = [int(n) for n in N_values]
    if N_values != sorted(N_values) or len(set(N_values)) != len(N_values):
        raise DomainError("N_values must be strictly ascending")
    if seeds_per_N < 1:
        raise DomainError("seeds_per_N must be >= 1")
    params = {"alpha": alpha} if kind == "katz" else {"beta": beta} if kind == "pagerank" else {}
    if reference is None:
        reference = graphon_centrality(W, kind, alpha, beta)
    bp = BoundParams.for_graphon(W, delta, mode)
    C_d = max_degree(W)

    units = [(N, t) for N in N_values for t in range(seeds_per_N)]
    seeds = {u: trial_seed(master_seed, *u) for u in units}
    det_cache = {}

    def det_error(N, lat_seed):
        key = N if mode == "deterministic" else (N, lat_seed)
        if key not in det_cache:
            P = probability_matrix(W, make_latents(N, mode, lat_seed))
            try:
                det_cache[key] = _centrality_error(rescale(P, "over_N"), kind, alpha, beta, reference)
            except GraphonError:
                det_cache[key] = math.nan
        return det_cache[key]

    def work(unit):
        N, _ = unit
        seed = seeds[unit]
        lat = make_latents(N, mode, seed)
        P = probability_matrix(W, lat)
        kappa = kappa_schedule(N, tau)
        S = sample_adjacency(P, kappa, seed)
        try:
            err = _centrality_error(rescale(S, "over_N_kappa", kappa), kind, alpha, beta, reference)
        except GraphonError as exc:
            return unit, None, f"{type(exc).__name__}: {exc}"
        return unit, err, None

    # deterministic-latent errors are computed serially so the cache is filled once
    det = {}
    if with_det:
        for N in N_values:
            vals = [det_error(N, seeds[(N, t)]) for t in range(seeds_per_N if mode == "stochastic" else 1)]
            det[N] = float(np.mean(np.sort(vals)))

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=int(jobs)) as pool:
            results = list(pool.map(work, units))
    else:
        results = [work(u) for u in units]
    by_unit = {u: (e, msg) for u, e, msg in results}

    rows, flags = [], []
    total_excluded = 0
    for N in N_values:
        errs = [by_unit[(N, t)][0] for t in range(seeds_per_N) if by_unit[(N, t)][0] is not None]
        reasons = sorted({by_unit[(N, t)][1] for t in range(seeds_per_N) if by_unit[(N, t)][1]})
        n_exc = seeds_per_N - len(errs)
        total_excluded += n_exc
        mean, std, med = _stats(errs)
        kappa = kappa_schedule(N, tau)
        try:
            r = rho(N, bp).rho
            sb = sampled_bound(N, kappa, bp)
        except DomainError:
            r = sb = None
        cond = max_degree_condition(W, N, bp, C_d=C_d)
        rows.append({
            "N": N,
            "mean_error": mean,
            "std_error": std,
            "median_error": med,
            "mean_error_det": det.get(N),
            "n_seeds": len(errs),
            "n_excluded": n_exc,
            "excluded_reasons": reasons,
            "kappa": kappa,
            "rho_bound": r,
            "sampled_bound": sb,
            "bound_guaranteed": bool(cond.holds),
            "aligned": grid_aligned(W, N),
        })
    if total_excluded > MAX_EXCLUDED_FRACTION * len(units):
        raise NumericError(f"{total_excluded} of {len(units)} trials failed (more than 10%)", achieved=total_excluded / len(units))

    if len(N_values) < 2:
        flags.append("single N: no fitted rate")
    if not all(r["bound_guaranteed"] for r in rows):
        flags.append("bound not guaranteed for some N (sample-size condition fails)")
    means = [r["mean_error"] for r in rows]
    sbs = [r["sampled_bound"] if r["sampled_bound"] is not None else math.nan for r in rows]
    dets = [r["mean_error_det"] if r["mean_error_det"] is not None else math.nan for r in rows]
    rhos = [r["rho_bound"] if r["rho_bound"] is not None else math.nan for r in rows]
    config = {
        "graphon": graphon_to_dict(W),
        "kind": kind,
        "params": params,
        "N_values": N_values,
        "seeds_per_N": seeds_per_N,
        "mode": mode,
        "tau": tau,
        "delta": delta,
        "master_seed": master_seed,
    }
    provenance = {
        "master_seed": master_seed,
        "seeds": {str(N): [seeds[(N, t)] for t in range(seeds_per_N)] for N in N_values},
        "config_hash": config_hash(config),
        "timestamp": _timestamp(),
    }
    return ConvergenceReport(
        graphon_id=W.name or W.variant,
        kind=kind,
        params=params,
        mode=mode,
        tau=tau,
        delta=delta,
        N_values=N_values,
        rows=rows,
        fitted_rate=fit_rate(N_values, means) if len(N_values) > 1 else None,
        fitted_C=fit_constant(means, sbs),
        fitted_rate_det=fit_rate(N_values, dets) if len(N_values) > 1 and with_det else None,
        fitted_C_rho=fit_constant(dets, rhos) if with_det else None,
        flags=flags,
        provenance=provenance,
    )


class DeterministicFit(NamedTuple):
    N_values: list
    errors: list
    rho: list
    rate: Optional[float]
    C_fit: float


def deterministic_convergence(W, kind, N_values, reference=None, alpha=None, beta=None):
    """``|c_N - c|`` for deterministic latents, with the smallest C such that error <= C rho(N)."""
    if reference is None:
        reference = graphon_centrality(W, kind, alpha, beta)
    bp = BoundParams.for_graphon(W)
    errs, rhos = [], []
    for N in N_values:
        P = probability_matrix(W, make_latents(N))
        errs.append(_centrality_error(rescale(P, "over_N"), kind, alpha, beta, reference))
        rhos.append(rho(N, bp).rho)
    ratios = np.asarray(errs) / np.asarray(rhos)
    return DeterministicFit(list(N_values), errs, rhos, fit_rate(N_values, errs), float(ratios.max()))


# ---------------------------------------------------------------------------
# two-realisation robustness
# ---------------------------------------------------------------------------


@dataclass
class RobustnessReport:
    N1: int
    N2: int
    distances: np.ndarray
    errors_N1: np.ndarray
    errors_N2: np.ndarray
    C_prime: Optional[float]
    bound: Optional[float]

    @property
    def p95(self):
        return float(np.percentile(self.distances, 95))

    def to_dict(self):
        return {
            "N1": self.N1,
            "N2": self.N2,
            "mean_distance": float(np.mean(self.distances)),
            "p95_distance": self.p95,
            "C_prime": self.C_prime,
            "bound": self.bound,
        }


def two_sample_robustness(W, kind, N1, N2, seeds=50, alpha=None, beta=None, mode="deterministic",
                          tau=0.0, master_seed=0, delta=0.01, reference=None):
    """Distances between centralities of graphs sampled at two sizes.

    The bound ``2 C' sampled_bound(N1)`` uses ``C'`` fitted from the errors of
    both samples against the graphon centrality.
    """
    if N1 > N2:
        raise DomainError(f"need N1 <= N2, got {N1} > {N2}")
    if reference is None:
        reference = graphon_centrality(W, kind, alpha, beta)
    bp = BoundParams.for_graphon(W, delta, mode)

    def draw(N, t):
        seed = trial_seed(master_seed, N, t)
        lat = make_latents(N, mode, seed)
        kappa = kappa_schedule(N, tau)
        S = sample_adjacency(probability_matrix(W, lat), kappa, seed)
        return embed_step(graph_centrality(rescale(S, "over_N_kappa", kappa), kind, alpha, beta))

    dist, e1, e2 = [], [], []
    for t in range(int(seeds)):
        c1, c2 = draw(N1, t), draw(N2, t)
        dist.append(l2_distance(c1, c2))
        e1.append(l2_distance(c1, reference))
        e2.append(l2_distance(c2, reference))
    try:
        b1 = sampled_bound(N1, kappa_schedule(N1, tau), bp)
        b2 = sampled_bound(N2, kappa_schedule(N2, tau), bp)
        C = fit_constant(e1 + e2, [b1] * len(e1) + [b2] * len(e2))
        bound = 2.0 * C * b1 if C is not None else None
    except DomainError:
        C = bound = None
    return RobustnessReport(N1, N2, np.array(dist), np.array(e1), np.array(e2), C, bound)


# ---------------------------------------------------------------------------
# empirical checks of auxiliary inequalities
# ---------------------------------------------------------------------------


class OrderStatResult(NamedTuple):
    violation_rate: float
    bound: float
    max_deviation: float


def order_stat_check(N, delta, n_trials=10000, seed=0, chunk=None):
    """Fraction of trials where some ``|U_(i) - i/(N+1)|`` exceeds the concentration bound."""
    if N < 20:
        raise DomainError(f"order-statistics bound needs N >= 20, got {N}")
    check_delta(N, delta)
    bound = order_stat_bound(N, delta)
    rng = np.random.Generator(np.random.Philox(seed))
    expected = np.arange(1, N + 1) / (N + 1)
    chunk = chunk or max(1, 2_000_000 // N)
    hits, worst, done = 0, 0.0, 0
    while done < n_trials:
        k = min(chunk, n_trials - done)
        u = np.sort(rng.random((k, N)), axis=1)
        dev = np.abs(u - expected).max(axis=1)
        hits += int(np.sum(dev > bound))
        worst = max(worst, float(dev.max()))
        done += k
    return OrderStatResult(hits / n_trials, bound, worst)


class DavisKahanResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool
    applicable: bool


def davis_kahan_check(M, H):
    """Check ``|phi_hat - phi| <= sqrt(2) |H| / (|l1 - l2| - |l1_hat - l1|)`` for the top eigenvector."""
    M = np.asarray(M, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    s = numerics.sym_eig(M, top=2)
    sh = numerics.sym_eig(M + H, top=1)
    l1, phi = s.principal
    l2 = s.eigenvalues[1] if len(s.eigenvalues) > 1 else -math.inf
    l1h, phih = sh.principal
    if phih @ phi < 0:
        phih = -phih
    h_norm = float(np.abs(np.linalg.eigvalsh(0.5 * (H + H.T))).max()) if H.size else 0.0
    lhs = float(np.linalg.norm(phih - phi))
    denom = abs(l1 - l2) - abs(l1h - l1)
    if not denom > 0:
        return DavisKahanResult(lhs, math.inf, False, False)
    rhs = math.sqrt(2.0) * h_norm / denom
    return DavisKahanResult(lhs, rhs, bool(lhs <= rhs + 1e-12), True)
