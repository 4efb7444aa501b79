"""Centralities of finite (weighted) graphs and their step-function embedding."""
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .centrality import GAP_TOL, KINDS, CentralityFunction, StepFunction, check_alpha, check_beta
from .errors import DomainError

SCALINGS = ("raw", "over_N", "over_N_kappa")


@dataclass(frozen=True, eq=False)
class CentralityVector:
    values: np.ndarray
    kind: str
    params: dict = field(default_factory=dict)
    matrix_scaling: str = "raw"
    meta: dict = field(default_factory=dict)

    @property
    def N(self):
        return len(self.values)

    def to_dict(self):
        return {
            "kind": self.kind,
            "params": dict(self.params),
            "matrix_scaling": self.matrix_scaling,
            "values": self.values.tolist(),
            "meta": dict(self.meta),
        }

    def csv_rows(self):
        """``(node_index, value)`` rows with a header, 0-based nodes."""
        return [("node_index", "value")] + [(i, float(v)) for i, v in enumerate(self.values)]


def _adjacency(A):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DomainError(f"adjacency matrix must be square and non-empty, got shape {A.shape}")
    if np.any(A < 0) or not np.all(np.isfinite(A)):
        raise DomainError("adjacency matrix must have finite nonnegative entries")
    return A


def degree(A, scaling="raw"):
    A = _adjacency(A)
    return CentralityVector(A.sum(axis=1), "degree", {}, scaling)


def eigenvector(A, scaling="raw"):
    """``sqrt(N) v_1`` with the Perron orientation.

    A (near) repeated dominant eigenvalue, e.g. from a disconnected graph,
    sets ``meta["degenerate"]`` instead of failing.
    """
    A = _adjacency(A)
    n = A.shape[0]
    spec = numerics.sym_eig(A, top=2)
    lam, v = spec.principal
    gap = spec.gap
    vals = np.sqrt(n) * v
    vals = np.where(np.abs(vals) <= 1e-12 * max(np.abs(vals).max(), 1.0), 0.0, vals)
    meta = {"lambda1": lam, "gap": gap, "degenerate": bool(gap < GAP_TOL * max(1.0, abs(lam)))}
    return CentralityVector(vals, "eigenvector", {}, scaling, meta)


def spectral_radius_sym(A):
    return float(numerics.sym_eig(A, top=1).eigenvalues[0])


def katz(A, alpha, scaling="raw", lam1=None):
    """``(I - alpha A)^{-1} 1`` for ``0 < alpha < 1 / lambda_1``."""
    A = _adjacency(A)
    lam = spectral_radius_sym(A) if lam1 is None else lam1
    check_alpha(alpha, lam)
    n = A.shape[0]
    vals = numerics.linear_solve(np.eye(n) - alpha * A, np.ones(n))
    return CentralityVector(vals, "katz", {"alpha": float(alpha)}, scaling, {"lambda1": lam})


def pagerank(A, beta, scaling="raw"):
    """``(1 - beta)(I - beta A D^+)^{-1} 1``; zero-degree nodes get zero column weight."""
    A = _adjacency(A)
    check_beta(beta)
    d = A.sum(axis=0)
    dinv = np.divide(1.0, d, out=np.zeros_like(d), where=d > 0)
    n = A.shape[0]
    vals = (1.0 - beta) * numerics.linear_solve(np.eye(n) - beta * A * dinv[None, :], np.ones(n))
    return CentralityVector(vals, "pagerank", {"beta": float(beta)}, scaling, {"isolated": int(np.sum(d == 0))})


def graph_centrality(A, kind, alpha=None, beta=None, scaling="raw"):
    if kind == "degree":
        return degree(A, scaling)
    if kind == "eigenvector":
        return eigenvector(A, scaling)
    if kind == "katz":
        return katz(A, alpha, scaling)
    if kind == "pagerank":
        return pagerank(A, beta, scaling)
    raise DomainError(f"unknown centrality kind {kind!r}; expected one of {KINDS}")


def rescale(M, scaling, kappa=1.0):
    """``M / N`` or ``M / (N kappa)``."""
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    if scaling == "raw":
        return M.copy()
    if scaling == "over_N":
        return M / n
    if scaling == "over_N_kappa":
        if not kappa > 0:
            raise DomainError(f"kappa must be positive, got {kappa}")
        return M / (n * kappa)
    raise DomainError(f"scaling must be one of {SCALINGS}, got {scaling!r}")


def embed_step(c):
    """Piecewise-constant function on the uniform N-grid carrying the node values."""
    vals = c.values if isinstance(c, CentralityVector) else np.asarray(c, dtype=np.float64)
    n = len(vals)
    kind = c.kind if isinstance(c, CentralityVector) else "degree"
    params = dict(c.params) if isinstance(c, CentralityVector) else {}
    meta = dict(c.meta) if isinstance(c, CentralityVector) else {}
    return CentralityFunction(StepFunction(np.arange(n + 1) / n, vals), kind, params, meta)
