"""Dense linear algebra and quadrature shared by every other module."""
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from . import _kernels
from .errors import DomainError, NumericError

#: Matrices up to this size go through the Jacobi kernel, larger ones through LAPACK.
JACOBI_MAX_N = 64
#: Linear systems with an estimated 1-norm condition number above this are refused.
CONDITION_LIMIT = 1e12
#: Hard cap on the number of quadrature nodes used for one integral.
MAX_QUAD_NODES = 10 ** 6

_SYM_RTOL = 1e-10
_EIG_RESIDUAL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Eigenpairs sorted by decreasing eigenvalue.

    ``eigenvectors[:, i]`` belongs to ``eigenvalues[i]``.  Every vector is
    oriented so that its entries sum to a nonnegative number.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def gap(self):
        if len(self.eigenvalues) < 2:
            return float("inf")
        return float(self.eigenvalues[0] - self.eigenvalues[1])

    @property
    def principal(self):
        return float(self.eigenvalues[0]), self.eigenvectors[:, 0]


@dataclass(frozen=True)
class QuadratureSpec:
    panels: int = 4
    nodes_per_panel: int = 10
    abs_tol: float = 1e-13
    max_refinements: int = 14

    def __post_init__(self):
        if self.panels < 1 or self.nodes_per_panel < 1 or self.max_refinements < 1:
            raise DomainError("quadrature panels, nodes and refinements must be positive")
        if not self.abs_tol > 0:
            raise DomainError("quadrature abs_tol must be positive")
        if self.panels * self.nodes_per_panel > MAX_QUAD_NODES:
            raise DomainError(f"panels * nodes_per_panel exceeds {MAX_QUAD_NODES}")


class Quadrature(NamedTuple):
    value: np.ndarray
    error: float


def orient(v):
    """Flip ``v`` so that its entry sum is nonnegative (first nonzero entry on ties)."""
    total = v.sum()
    if abs(total) <= 1e-14 * np.abs(v).sum():
        nz = np.flatnonzero(np.abs(v) > 1e-14 * np.abs(v).max()) if v.size else []
        total = v[nz[0]] if len(nz) else 1.0
    return -v if total < 0 else v


def _as_square(m, name="matrix"):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DomainError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError(f"{name} has non-finite entries")
    return m


def sym_eig(m, top=None):
    """Eigendecomposition of a symmetric matrix.

    Small matrices (n <= ``JACOBI_MAX_N``) use cyclic Jacobi rotations, larger
    ones LAPACK's tridiagonal reduction.  With ``top=k`` only the k largest
    eigenpairs are returned.  The residual ``|Mv - lambda v|`` of every returned
    pair is checked against ``1e-10 * |M|_F``.
    """
    m = _as_square(m)
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.T).max() > _SYM_RTOL * scale:
        raise DomainError("matrix is not symmetric")
    m = 0.5 * (m + m.T)
    n = m.shape[0]
    k = n if top is None else max(1, min(int(top), n))

    if n <= JACOBI_MAX_N:
        w, v, sweeps = _kernels.jacobi_eig(m)
        if sweeps < 0:
            raise NumericError("Jacobi iteration did not converge")
        order = np.argsort(-w, kind="stable")[:k]
        w, v = w[order], v[:, order]
    elif k < n:
        w, v = scipy.linalg.eigh(m, subset_by_index=[n - k, n - 1])
        w, v = w[::-1], v[:, ::-1]
    else:
        w, v = np.linalg.eigh(m)
        w, v = w[::-1], v[:, ::-1]

    v = np.column_stack([orient(v[:, i]) for i in range(v.shape[1])])
    fro = np.linalg.norm(m)
    resid = np.linalg.norm(m @ v - v * w, axis=0)
    if resid.size and resid.max() > _EIG_RESIDUAL * max(fro, np.finfo(float).tiny):
        raise NumericError("eigenpair residual above tolerance", achieved=float(resid.max()))
    return Spectrum(np.ascontiguousarray(w), np.ascontiguousarray(v))


def general_eig_dominant(m, tol=1e-12, max_iter=20000):
    """Dominant eigenpair of a (possibly non-symmetric) matrix by power iteration.

    Intended for effective connectivity matrices, whose dominant eigenvalue is
    real, simple and carries a nonnegative eigenvector.  Returns
    ``(lambda1, v1)`` with ``|v1| = 1`` and a nonnegative entry sum.
    """
    m = _as_square(m)
    n = m.shape[0]
    fro = np.linalg.norm(m)
    x = np.full(n, 1.0 / np.sqrt(n))
    if fro == 0.0:
        return 0.0, x
    resid = np.inf
    for _ in range(max_iter):
        y = m @ x
        lam = float(x @ y)
        resid = float(np.linalg.norm(y - lam * x))
        if resid <= tol * fro:
            return lam, orient(x)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0, orient(x)
        x = y / ny
    raise NumericError(
        f"power iteration did not converge in {max_iter} steps (residual {resid:.3e})",
        achieved=resid,
    )


def linear_solve(m, b):
    """Solve ``M x = b`` by LU with partial pivoting, refusing ill-conditioned systems."""
    m = _as_square(m)
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != m.shape[0]:
        raise DomainError(f"right-hand side has length {b.shape[0]}, expected {m.shape[0]}")
    lu, piv, info = lapack.dgetrf(m)
    if info > 0:
        raise NumericError("matrix is singular", achieved=np.inf)
    anorm = np.abs(m).sum(axis=0).max()
    rcond, _ = lapack.dgecon(lu, anorm, norm="1")
    cond = np.inf if rcond == 0 else 1.0 / rcond
    if cond > CONDITION_LIMIT:
        raise NumericError(f"matrix is ill-conditioned (condition estimate {cond:.3e})", achieved=cond)
    x = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    resid = np.linalg.norm(m @ x - b)
    if resid > 1e-10 * (np.linalg.norm(m) * np.linalg.norm(x) + np.linalg.norm(b)):
        raise NumericError("linear solve residual above tolerance", achieved=float(resid))
    return x


def spectral_radius(m):
    m = _as_square(m)
    return float(np.abs(np.linalg.eigvals(m)).max())


def neumann_apply(m, alpha, b, terms):
    """Truncated Neumann series ``sum_{k=0}^{terms} alpha^k M^k b``.

    Computed by repeated multiplication only, so that it can serve as an
    independent check of solves against ``I - alpha M``.
    """
    m = _as_square(m)
    b = np.asarray(b, dtype=np.float64)
    if alpha == 0:
        return b.copy()
    rho = spectral_radius(m)
    if abs(alpha) * rho >= 1.0:
        raise DomainError(f"Neumann series diverges: |alpha| * spectral radius = {abs(alpha) * rho:.6g} >= 1")
    term = b.copy()
    total = b.copy()
    for _ in range(int(terms)):
        term = alpha * (m @ term)
        total += term
        if not np.all(np.isfinite(term)):
            raise DomainError("Neumann series terms diverged")
    return total


_GL_CACHE = {}


def gauss_legendre(k):
    if k not in _GL_CACHE:
        _GL_CACHE[k] = np.polynomial.legendre.leggauss(k)
    return _GL_CACHE[k]


def _composite(f, edges, k, panels):
    """Composite Gauss-Legendre over the pieces given by ``edges``, ``panels`` sub-panels each."""
    x, w = gauss_legendre(k)
    a = np.repeat(edges[:-1], panels)
    h = np.repeat(np.diff(edges), panels) / panels
    a = a + h * np.tile(np.arange(panels), len(edges) - 1)
    nodes = (a[:, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    vals = np.asarray(f(nodes), dtype=np.float64)
    return vals @ weights if vals.ndim > 1 else float(vals @ weights)


def integrate(f, a=0.0, b=1.0, spec=None, breakpoints: Sequence[float] = ()):
    """Integrate a vectorised function over ``[a, b]``.

    ``f`` receives a 1-D array of nodes and returns values of shape
    ``(len(nodes),)`` or ``(..., len(nodes))`` for component-wise integrals.
    Panels are doubled until two successive estimates differ by less than
    ``spec.abs_tol``.  Interior ``breakpoints`` (kinks, jumps) are honoured as
    panel edges.
    """
    spec = spec or QuadratureSpec()
    if not a < b:
        raise DomainError(f"integration interval [{a}, {b}] is empty")
    inner = sorted(p for p in breakpoints if a < p < b)
    edges = np.array([a, *inner, b], dtype=np.float64)
    panels = spec.panels
    prev = _composite(f, edges, spec.nodes_per_panel, panels)
    delta = np.inf
    for _ in range(spec.max_refinements):
        if 2 * panels * spec.nodes_per_panel * (len(edges) - 1) > MAX_QUAD_NODES:
            break
        panels *= 2
        cur = _composite(f, edges, spec.nodes_per_panel, panels)
        delta = float(np.max(np.abs(np.asarray(cur) - np.asarray(prev))))
        prev = cur
        if delta < spec.abs_tol:
            return Quadrature(cur, delta)
    raise NumericError(f"quadrature did not reach abs_tol={spec.abs_tol:g} (last delta {delta:.3e})", achieved=delta)


def piecewise_integral(f, edges, tol=1e-10, k=8, max_refinements=12):
    """Integral of ``f`` over [edges[0], edges[-1]] with every cell treated as a smooth piece.

    Like :func:`integrate` but designed for many pieces at once (merged
    partitions of step functions), with a relative-or-absolute stopping rule.
    """
    edges = np.asarray(edges, dtype=np.float64)
    panels = 1
    prev = _composite(f, edges, k, panels)
    delta = np.inf
    for _ in range(max_refinements):
        panels *= 2
        if panels * k * (len(edges) - 1) > 4 * MAX_QUAD_NODES:
            break
        cur = _composite(f, edges, k, panels)
        delta = abs(cur - prev)
        prev = cur
        if delta < tol:
            return cur
    raise NumericError(f"piecewise quadrature stalled (last delta {delta:.3e})", achieved=delta)


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def check_probability(name: str, value: Optional[float]):
    if value is None or not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value}")
