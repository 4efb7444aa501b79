"""Centrality functions of graphons.

Closed forms are used for SBM and finite-rank graphons; kernel graphons are
discretised onto a uniform SBM and the result refined once to estimate the
discretisation error.  ``wg_reference`` holds the known closed forms for the
kernel ``min(x, y)(1 - max(x, y))``.
"""
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import numerics
from .errors import DomainError
from .graphon import AnalyticKernelGraphon, FiniteRankGraphon, SBMGraphon, discretize_to_sbm, effective_matrices, ensure_valid

KINDS = ("degree", "eigenvector", "katz", "pagerank")
#: Katz parameters must stay below (1 - KATZ_GUARD) / lambda_1.
KATZ_GUARD = 1e-9
#: Eigenvalue gaps below this are reported as a degenerate dominant eigenvalue.
GAP_TOL = 1e-10


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------


def _step_lookup(boundaries, values, x):
    idx = np.searchsorted(boundaries[1:-1], np.asarray(x, dtype=np.float64), side="right")
    return values[idx]


@dataclass(frozen=True, eq=False)
class StepFunction:
    boundaries: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.boundaries, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if b.ndim != 1 or len(b) != len(v) + 1:
            raise DomainError("step function needs one more boundary than values")
        if b[0] != 0.0 or b[-1] != 1.0 or np.any(np.diff(b) <= 0):
            raise DomainError("step function boundaries must increase strictly from 0 to 1")
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        return _step_lookup(self.boundaries, self.values, x)

    def to_dict(self):
        return {"representation": "StepFunction", "boundaries": self.boundaries.tolist(), "values": self.values.tolist()}


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Piecewise constant on the uniform ``n``-grid; ``values[i]`` is attached to the midpoint of cell i."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.n,):
            raise DomainError(f"grid function with n={self.n} needs {self.n} values, got {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def boundaries(self):
        return np.arange(self.n + 1) / self.n

    @property
    def midpoints(self):
        return (np.arange(self.n) + 0.5) / self.n

    def __call__(self, x):
        return _step_lookup(self.boundaries, self.values, x)

    def to_dict(self):
        return {"representation": "GridFunction", "n": self.n, "values": self.values.tolist()}


FAMILIES = ("polynomial", "sine_series", "parabolic")


@dataclass(frozen=True, eq=False)
class AnalyticForm:
    """Closed-form function.

    ``polynomial``: ascending coefficients ``[c0, c1, ...]``;
    ``sine_series``: ``c0 + sum_n a_n sin(n pi x)`` stored as ``[c0, a1, a2, ...]``;
    ``parabolic``: ``a x (1 - x)`` stored as ``[a]``.
    """

    family: str
    coefficients: np.ndarray

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown analytic family {self.family!r}")
        object.__setattr__(self, "coefficients", np.asarray(self.coefficients, dtype=np.float64))

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        c = self.coefficients
        if self.family == "polynomial":
            return npoly.polyval(x, c)
        if self.family == "parabolic":
            return c[0] * x * (1.0 - x)
        out = np.full(x.shape, c[0])
        for start in range(1, len(c), 256):
            n = np.arange(start, min(len(c), start + 256))
            out = out + np.sin(np.pi * np.multiply.outer(x, n)) @ c[n]
        return out

    def to_dict(self):
        return {"representation": "AnalyticForm", "family": self.family, "coefficients": self.coefficients.tolist()}


@dataclass(frozen=True, eq=False)
class CentralityFunction:
    rep: object
    kind: str
    params: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.rep(x)

    @property
    def values(self):
        return self.rep.values

    @property
    def coefficients(self):
        return self.rep.coefficients

    @property
    def is_step(self):
        return isinstance(self.rep, (StepFunction, GridFunction))

    def to_dict(self):
        meta = {k: v for k, v in self.meta.items() if isinstance(v, (bool, int, float, str)) or v is None}
        return {"kind": self.kind, "params": dict(self.params), **self.rep.to_dict(), "meta": meta}

    def samples(self, n=512):
        x = (np.arange(n) + 0.5) / n
        return x, np.asarray(self(x), dtype=np.float64)


def function_from_dict(doc):
    rep = doc["representation"]
    if rep == "StepFunction":
        r = StepFunction(doc["boundaries"], doc["values"])
    elif rep == "GridFunction":
        r = GridFunction(int(doc["n"]), doc["values"])
    elif rep == "AnalyticForm":
        r = AnalyticForm(doc["family"], doc["coefficients"])
    else:
        raise DomainError(f"unknown representation {rep!r}")
    return CentralityFunction(r, doc["kind"], dict(doc.get("params", {})), dict(doc.get("meta", {})))


# ---------------------------------------------------------------------------
# L2 algebra
# ---------------------------------------------------------------------------


def _rep(c):
    return c.rep if isinstance(c, CentralityFunction) else c


def _is_step(r):
    return isinstance(r, (StepFunction, GridFunction))


def l2_distance(c1, c2):
    """L2 distance on [0, 1]; exact for two step functions, quadrature otherwise."""
    a, b = _rep(c1), _rep(c2)
    edges = np.union1d(
        a.boundaries if _is_step(a) else [0.0, 1.0],
        b.boundaries if _is_step(b) else [0.0, 1.0],
    )
    if _is_step(a) and _is_step(b):
        mid = 0.5 * (edges[:-1] + edges[1:])
        diff = a(mid) - b(mid)
        return float(np.sqrt(np.sum(diff * diff * np.diff(edges))))
    if len(edges) < 65:
        # smooth pieces: subdivide so that the quadrature resolves oscillations
        edges = np.unique(np.concatenate([edges, np.linspace(0.0, 1.0, 65)]))
    total = numerics.piecewise_integral(lambda x: (a(x) - b(x)) ** 2, edges, tol=1e-10)
    return float(np.sqrt(max(total, 0.0)))


def l2_norm(c):
    r = _rep(c)
    if _is_step(r):
        return float(np.sqrt(np.sum(r.values ** 2 * np.diff(r.boundaries))))
    return l2_distance(r, StepFunction([0.0, 1.0], [0.0]))


# ---------------------------------------------------------------------------
# parameter checks
# ---------------------------------------------------------------------------


def _check_kind(kind):
    if kind not in KINDS:
        raise DomainError(f"unknown centrality kind {kind!r}; expected one of {KINDS}")


def check_alpha(alpha, lam1):
    if alpha is None or not alpha > 0:
        raise DomainError(f"Katz needs alpha > 0, got {alpha}")
    if lam1 > 0 and alpha * lam1 >= 1.0 - KATZ_GUARD:
        raise DomainError(
            f"Katz alpha={alpha:.6g} is outside (0, 1/lambda1) with lambda1={lam1:.6g}; "
            f"choose alpha < {1.0 / lam1:.6g}",
        )


def check_beta(beta):
    if beta is None or not 0.0 < beta < 1.0:
        raise DomainError(f"PageRank needs beta in (0, 1), got {beta}")


def _params(kind, alpha, beta):
    if kind == "katz":
        return {"alpha": float(alpha)} if alpha is not None else {}
    if kind == "pagerank":
        return {"beta": float(beta)} if beta is not None else {}
    return {}


# ---------------------------------------------------------------------------
# SBM graphons
# ---------------------------------------------------------------------------


def sbm_spectrum(W, top=2):
    """Leading eigenpairs of E = P Q through the similar symmetric matrix Q^1/2 P Q^1/2."""
    s = np.sqrt(W.block_sizes)
    return numerics.sym_eig(s[:, None] * W.P * s[None, :], top=top)


def sbm_centrality(W, kind, alpha=None, beta=None, dagger=False):
    """Centrality step function of an SBM graphon on its own blocks.

    With ``dagger=True`` blocks of zero degree get zero PageRank column weight
    instead of raising.
    """
    _check_kind(kind)
    mats = effective_matrices(W)
    q = W.block_sizes
    meta = {}
    m = W.m
    if kind == "degree":
        vals = mats.E.sum(axis=1)
    elif kind == "eigenvector":
        spec = sbm_spectrum(W)
        lam, w = spec.principal
        meta.update(lambda1=lam, gap=spec.gap, degenerate=bool(spec.gap < GAP_TOL))
        # v = Q^-1/2 w already satisfies v^T Q v = 1
        vals = w / np.sqrt(q)
        vals = np.where(np.abs(vals) <= 1e-12 * np.abs(vals).max(), 0.0, vals)
    elif kind == "katz":
        lam = sbm_spectrum(W, top=1).eigenvalues[0]
        check_alpha(alpha, lam)
        meta["lambda1"] = float(lam)
        vals = numerics.linear_solve(np.eye(m) - alpha * mats.E, np.ones(m))
    else:
        check_beta(beta)
        d = mats.E.sum(axis=1)
        if np.any(d <= 0) and not dagger:
            bad = int(np.flatnonzero(d <= 0)[0]) + 1
            raise DomainError(f"block {bad} has zero degree; PageRank needs positive degrees (eta > 0)")
        dinv = np.divide(1.0, d, out=np.zeros_like(d), where=d > 0)
        vals = (1.0 - beta) * numerics.linear_solve(np.eye(m) - beta * mats.E * dinv[None, :], np.ones(m))
    return CentralityFunction(StepFunction(W.boundaries, vals), kind, _params(kind, alpha, beta), meta)


# ---------------------------------------------------------------------------
# finite-rank graphons
# ---------------------------------------------------------------------------


def fr_centrality(W, kind, alpha=None, beta=None, quad=None, grid=1024):
    """Centrality of ``W = g^T h`` as ``c0 + a^T g(x)``.

    Returned as a polynomial ``AnalyticForm`` when every g_k is a polynomial,
    otherwise sampled on a ``grid``-point ``GridFunction``.
    """
    _check_kind(kind)
    if kind == "pagerank":
        check_beta(beta)
    mats = effective_matrices(W, quad, pagerank=(kind == "pagerank"))
    m = W.m
    meta = {}
    c0 = 0.0
    if kind == "degree":
        a = mats.h_bar
    elif kind == "eigenvector":
        lam, v = numerics.general_eig_dominant(mats.E)
        if mats.g_bar @ v < 0:
            v = -v
        meta["lambda1"] = lam
        a = v / np.sqrt(v @ mats.Q @ v)
    elif kind == "katz":
        lam, _ = numerics.general_eig_dominant(mats.E)
        check_alpha(alpha, lam)
        meta["lambda1"] = lam
        c0 = 1.0
        a = alpha * numerics.linear_solve(np.eye(m) - alpha * mats.E, mats.h_bar)
    else:
        c0 = 1.0 - beta
        a = (1.0 - beta) * beta * numerics.linear_solve(np.eye(m) - beta * mats.E_nor, mats.h_nor)
    meta["coefficients_g"] = [float(c0)] + [float(t) for t in a]

    if W.polynomial:
        deg = max(len(f.coeffs) for f in W.g)
        coeffs = np.zeros(deg)
        coeffs[0] = c0
        for ak, f in zip(a, W.g):
            coeffs[: len(f.coeffs)] += ak * np.asarray(f.coeffs)
        rep = AnalyticForm("polynomial", coeffs)
    else:
        x = (np.arange(grid) + 0.5) / grid
        rep = GridFunction(grid, c0 + a @ W.g_values(x))
    return CentralityFunction(rep, kind, _params(kind, alpha, beta), meta)


# ---------------------------------------------------------------------------
# kernel graphons
# ---------------------------------------------------------------------------


def degree_at(W, x, quad=None):
    """``int_0^1 W(x_i, y) dy`` for each x_i, splitting the integral at y = x_i."""
    x = np.asarray(x, dtype=np.float64)
    spec = quad or numerics.QuadratureSpec(panels=2, nodes_per_panel=12, abs_tol=1e-13)
    bps = [b for b in W.kinks()]
    if bps:
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            out[i] = numerics.integrate(lambda y: W(np.full_like(y, xi), y), spec=spec, breakpoints=[xi, *bps]).value
        return out

    def split(t):
        lo = x[:, None] * t[None, :]
        hi = x[:, None] + (1.0 - x[:, None]) * t[None, :]
        xx = np.broadcast_to(x[:, None], lo.shape)
        return x[:, None] * W(xx, lo) + (1.0 - x)[:, None] * W(xx, hi)

    return numerics.integrate(split, spec=spec).value


def analytic_centrality(W, kind, alpha=None, beta=None, resolution=512, threshold=1e-2):
    """Centrality of a kernel graphon by uniform discretisation.

    Runs at ``resolution`` and ``2 * resolution`` and returns the finer grid.
    ``meta["error_estimate"]`` is the L2 distance between the two, and
    ``meta["converged"]`` records whether it is below ``threshold``.  Degree
    is integrated directly at the cell midpoints.  PageRank uses the
    zero-degree convention of the graph case, since kernels may vanish on a
    whole row of the grid.
    """
    _check_kind(kind)
    if not isinstance(resolution, (int, np.integer)) or resolution < 16 or not numerics.is_power_of_two(int(resolution)):
        raise DomainError(f"resolution must be a power of two >= 16, got {resolution}")
    ensure_valid(W)
    results = []
    for n in (int(resolution), 2 * int(resolution)):
        if kind == "degree":
            grid = GridFunction(n, degree_at(W, (np.arange(n) + 0.5) / n))
            meta = {}
        else:
            S = discretize_to_sbm(W, n)
            c = sbm_centrality(S, kind, alpha, beta, dagger=True)
            grid = GridFunction(n, c.values)
            meta = dict(c.meta)
        results.append((grid, meta))
    (coarse, _), (fine, meta) = results
    err = l2_distance(coarse, fine)
    meta.update(resolution=2 * int(resolution), error_estimate=err, converged=bool(err <= threshold))
    return CentralityFunction(fine, kind, _params(kind, alpha, beta), meta)


def wg_reference(kind, alpha=None, n_terms=2000):
    """Closed-form centralities of the kernel ``min(x, y)(1 - max(x, y))``.

    Its operator has eigenpairs ``1 / (n pi)^2`` and ``sqrt(2) sin(n pi x)``.
    """
    if kind == "degree":
        return CentralityFunction(AnalyticForm("parabolic", [0.5]), kind)
    if kind == "eigenvector":
        return CentralityFunction(AnalyticForm("sine_series", [0.0, np.sqrt(2.0)]), kind, meta={"lambda1": 1.0 / np.pi ** 2})
    if kind == "katz":
        check_alpha(alpha, 1.0 / np.pi ** 2)
        n = np.arange(1, int(n_terms) + 1, dtype=np.float64)
        odd = (1.0 - (-1.0) ** n) / (np.pi * n)
        coeffs = np.concatenate([[1.0], 2.0 * alpha / (n * n * np.pi ** 2 - alpha) * odd])
        return CentralityFunction(AnalyticForm("sine_series", coeffs), kind, {"alpha": float(alpha)})
    raise DomainError(f"no closed form for {kind!r}; use analytic_centrality")


def graphon_centrality(W, kind, alpha=None, beta=None, resolution=512, quad=None):
    """Dispatch on the graphon variant."""
    if isinstance(W, SBMGraphon):
        return sbm_centrality(W, kind, alpha, beta)
    if isinstance(W, FiniteRankGraphon):
        return fr_centrality(W, kind, alpha, beta, quad)
    if isinstance(W, AnalyticKernelGraphon):
        return analytic_centrality(W, kind, alpha, beta, resolution)
    raise DomainError(f"unsupported graphon {W!r}")


def principal_eigenvalue(W, resolution=512):
    """Largest eigenvalue of the graphon operator (discretised for kernels)."""
    if isinstance(W, SBMGraphon):
        return float(sbm_spectrum(W, top=1).eigenvalues[0])
    if isinstance(W, FiniteRankGraphon):
        return numerics.general_eig_dominant(effective_matrices(W).E)[0]
    return float(sbm_spectrum(discretize_to_sbm(W, 2 * resolution), top=1).eigenvalues[0])
