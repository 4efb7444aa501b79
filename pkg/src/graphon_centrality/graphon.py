"""Graphon representations, validation, effective matrices and discretisation.

Three variants are supported:

``SBMGraphon``
    piecewise constant on blocks ``[b_{k-1}, b_k)`` with a symmetric matrix P;
``FiniteRankGraphon``
    ``W(x, y) = g(x)^T h(y)`` with factors from :mod:`.expressions`;
``AnalyticKernelGraphon``
    a kernel expression in ``x`` and ``y``.

All three carry :class:`Metadata` (Lipschitz constant, interior breakpoints and
a lower bound ``eta`` on the degree function) and are immutable.
"""
import json
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import numerics
from .errors import ConfigError, DomainError, PreconditionError
from .expressions import BUILTIN_KERNELS, KernelExpression, Polynomial, integrate_product, parse_function

VARIANTS = ("SBM", "FiniteRank", "AnalyticKernel")


@dataclass(frozen=True)
class Metadata:
    """Regularity data supplied with a graphon.

    ``eta`` is a lower bound on the degree function ``c^d(x) = int W(x, y) dy``;
    it must be positive for PageRank quantities of finite-rank graphons.
    """

    lipschitz_L: float = 0.0
    breakpoints: Tuple[float, ...] = ()
    eta: float = 0.0

    @property
    def K(self):
        return len(self.breakpoints)

    @property
    def min_spacing(self):
        """Length of the shortest Lipschitz interval."""
        return float(np.diff([0.0, *self.breakpoints, 1.0]).min())

    def to_dict(self):
        return {"lipschitz_L": self.lipschitz_L, "breakpoints": list(self.breakpoints), "eta": self.eta}


def _readonly(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


class Graphon:
    variant = None
    name = None

    def __init__(self, metadata=None, name=None):
        self.metadata = metadata if metadata is not None else Metadata()
        self.name = name
        self._report = None

    def __call__(self, x, y):
        """Vectorised evaluation without range checks."""
        raise NotImplementedError

    def kinks(self):
        """Locations where ``W(x, .)`` may fail to be smooth, besides ``y = x``."""
        return tuple(self.metadata.breakpoints)

    def to_dict(self):
        raise NotImplementedError

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<{type(self).__name__}{label}>"


class SBMGraphon(Graphon):
    variant = "SBM"

    def __init__(self, boundaries, P, metadata=None, name=None):
        super().__init__(metadata, name)
        self.boundaries = _readonly(boundaries)
        self.P = _readonly(P)
        m = len(self.boundaries) - 1
        if self.boundaries.ndim != 1 or m < 1:
            raise ConfigError("SBM boundaries must be a list of at least two numbers")
        if self.P.shape != (m, m):
            raise ConfigError(f"SBM P must be {m}x{m} to match {m} blocks, got shape {self.P.shape}")

    @property
    def m(self):
        return len(self.boundaries) - 1

    @property
    def block_sizes(self):
        return np.diff(self.boundaries)

    def block_index(self, x, closed="left"):
        """Block containing ``x``.

        ``closed="left"`` uses ``[b_{k-1}, b_k)`` with the last block closed at 1;
        ``closed="right"`` uses ``(b_{k-1}, b_k]`` with the first block closed at 0,
        i.e. it reads W just left of a boundary.
        """
        inner = self.boundaries[1:-1]
        side = "right" if closed == "left" else "left"
        return np.searchsorted(inner, np.asarray(x, dtype=np.float64), side=side)

    def values(self, x, y, closed="left"):
        return self.P[self.block_index(x, closed), self.block_index(y, closed)]

    def __call__(self, x, y):
        return self.values(x, y)

    def kinks(self):
        return tuple(sorted(set(self.metadata.breakpoints) | set(self.boundaries[1:-1].tolist())))

    def to_dict(self):
        return {
            "variant": "SBM",
            "boundaries": self.boundaries.tolist(),
            "P": self.P.tolist(),
            "metadata": self.metadata.to_dict(),
            **({"name": self.name} if self.name else {}),
        }


class FiniteRankGraphon(Graphon):
    variant = "FiniteRank"

    def __init__(self, g, h, metadata=None, name=None):
        super().__init__(metadata, name)
        self.g = tuple(g)
        self.h = tuple(h)
        if not self.g or len(self.g) != len(self.h):
            raise ConfigError(f"finite-rank g and h must be non-empty and of equal length, got {len(self.g)} and {len(self.h)}")

    @property
    def m(self):
        return len(self.g)

    @property
    def polynomial(self):
        return all(isinstance(f, Polynomial) for f in self.g + self.h)

    def g_values(self, x):
        return np.stack([np.broadcast_to(f(x), np.shape(x)) for f in self.g])

    def h_values(self, y):
        return np.stack([np.broadcast_to(f(y), np.shape(y)) for f in self.h])

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
        return np.einsum("k...,k...->...", self.g_values(x), self.h_values(y))

    def to_dict(self):
        return {
            "variant": "FiniteRank",
            "g": [f.to_dict() for f in self.g],
            "h": [f.to_dict() for f in self.h],
            "metadata": self.metadata.to_dict(),
            **({"name": self.name} if self.name else {}),
        }


class AnalyticKernelGraphon(Graphon):
    variant = "AnalyticKernel"

    def __init__(self, kernel, metadata=None, name=None, builtin=None):
        super().__init__(metadata, name)
        self.kernel = kernel if isinstance(kernel, KernelExpression) else KernelExpression(kernel)
        self.builtin = builtin

    def __call__(self, x, y):
        return self.kernel(x, y)

    def to_dict(self):
        w = {"kind": "builtin", "name": self.builtin} if self.builtin else {"kind": "expr", "expr": self.kernel.source}
        return {
            "variant": "AnalyticKernel",
            "w": w,
            "metadata": self.metadata.to_dict(),
            **({"name": self.name} if self.name else {}),
        }


# ---------------------------------------------------------------------------
# evaluation and validation
# ---------------------------------------------------------------------------


def evaluate(W, x, y):
    """``W(x, y)`` for scalar or array arguments in [0, 1]."""
    xa, ya = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    for name, v in (("x", xa), ("y", ya)):
        if not np.all(np.isfinite(v)) or np.any(v < 0.0) or np.any(v > 1.0):
            raise DomainError(f"{name} must lie in [0, 1], got {v if v.ndim == 0 else 'an array outside it'}")
    out = W(xa, ya)
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class Violation:
    check: str
    location: tuple
    detail: str


@dataclass
class ValidationReport:
    ok: bool
    violations: List[Violation] = field(default_factory=list)

    @property
    def first(self) -> Optional[Violation]:
        return self.violations[0] if self.violations else None

    def summary(self):
        if self.ok:
            return "ok"
        v = self.first
        return f"{v.check} violated at {v.location}: {v.detail}"


def validate(W, grid=128):
    """Check symmetry, range and structural constraints; never raises."""
    out = []
    md = W.metadata
    if not (np.isfinite(md.lipschitz_L) and md.lipschitz_L >= 0):
        out.append(Violation("metadata", ("lipschitz_L",), f"lipschitz_L must be >= 0, got {md.lipschitz_L}"))
    bp = np.asarray(md.breakpoints, dtype=np.float64)
    if bp.size and (np.any(np.diff(bp) <= 0) or bp[0] <= 0 or bp[-1] >= 1):
        out.append(Violation("metadata", ("breakpoints",), "breakpoints must be strictly increasing and inside (0, 1)"))
    if not (np.isfinite(md.eta) and md.eta >= 0):
        out.append(Violation("metadata", ("eta",), f"eta must be >= 0, got {md.eta}"))

    if isinstance(W, SBMGraphon):
        b = W.boundaries
        if b[0] != 0.0 or b[-1] != 1.0:
            out.append(Violation("boundaries", (0, len(b) - 1), "boundaries must start at 0 and end at 1"))
        bad = np.flatnonzero(np.diff(b) <= 0)
        if bad.size:
            out.append(Violation("boundaries", (int(bad[0]), int(bad[0]) + 1), "boundaries must be strictly increasing"))
        asym = np.argwhere(W.P != W.P.T)
        asym = asym[asym[:, 0] < asym[:, 1]]
        if asym.size:
            i, j = asym[0]
            out.append(Violation("symmetry", (int(i) + 1, int(j) + 1), f"P[{i + 1},{j + 1}]={W.P[i, j]} but P[{j + 1},{i + 1}]={W.P[j, i]}"))
        rng = np.argwhere((W.P < 0) | (W.P > 1) | ~np.isfinite(W.P))
        if rng.size:
            i, j = rng[0]
            out.append(Violation("range", (int(i) + 1, int(j) + 1), f"P[{i + 1},{j + 1}]={W.P[i, j]} outside [0, 1]"))
        return ValidationReport(not out, out)

    t = np.linspace(0.0, 1.0, grid)
    X, Y = np.meshgrid(t, t, indexing="ij")
    try:
        vals = np.asarray(W(X, Y), dtype=np.float64)
    except Exception as exc:  # pragma: no cover - grammar guarantees evaluability
        return ValidationReport(False, [Violation("evaluation", (), str(exc))])
    tol = 1e-12 if isinstance(W, AnalyticKernelGraphon) else 0.0
    asym = np.argwhere(np.abs(vals - vals.T) > tol)
    if asym.size:
        i, j = asym[0]
        out.append(Violation("symmetry", (float(t[i]), float(t[j])), f"|W(x,y) - W(y,x)| = {abs(vals[i, j] - vals[j, i]):.3e}"))
    rng = np.argwhere(~np.isfinite(vals) | (vals < 0.0) | (vals > 1.0))
    if rng.size:
        i, j = rng[0]
        out.append(Violation("range", (float(t[i]), float(t[j])), f"W = {vals[i, j]} outside [0, 1]"))
    return ValidationReport(not out, out)


def ensure_valid(W):
    """Validate once per graphon object and raise on failure."""
    if W._report is None:
        W._report = validate(W)
    if not W._report.ok:
        raise DomainError(f"invalid graphon: {W._report.summary()}")
    return W


# ---------------------------------------------------------------------------
# effective matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EffectiveMatrices:
    Q: np.ndarray
    E: np.ndarray
    g_bar: np.ndarray
    h_bar: np.ndarray
    h_nor: Optional[np.ndarray]
    E_nor: Optional[np.ndarray]
    D_E: Optional[np.ndarray] = None
    quad_error: float = 0.0


def _sbm_matrices(W):
    q = W.block_sizes
    E = W.P * q[None, :]
    d = E.sum(axis=1)
    h_nor = E_nor = None
    if np.all(d > 0):
        E_nor = E / d[None, :]
        h_nor = E_nor.sum(axis=1)
    return EffectiveMatrices(Q=np.diag(q), E=E, g_bar=q.copy(), h_bar=d.copy(), h_nor=h_nor, E_nor=E_nor, D_E=np.diag(d))


def _fr_matrices(W, quad, pagerank):
    m = W.m
    spec = quad or numerics.QuadratureSpec()
    bps = W.kinks()
    one = Polynomial((1.0,))
    err = 0.0

    exact = W.polynomial
    if exact:
        Q = np.array([[integrate_product(W.g[i], W.g[j]) for j in range(m)] for i in range(m)])
        E = np.array([[integrate_product(W.h[i], W.g[j]) for j in range(m)] for i in range(m)])
        g_bar = np.array([integrate_product(f, one) for f in W.g])
        h_bar = np.array([integrate_product(f, one) for f in W.h])
    else:
        def first_moments(y):
            g, h = W.g_values(y), W.h_values(y)
            return np.concatenate([
                np.einsum("in,jn->ijn", g, g).reshape(m * m, -1),
                np.einsum("in,jn->ijn", h, g).reshape(m * m, -1),
                g, h,
            ])

        res = numerics.integrate(first_moments, spec=spec, breakpoints=bps)
        err = max(err, res.error)
        v = res.value
        Q = v[: m * m].reshape(m, m)
        E = v[m * m: 2 * m * m].reshape(m, m)
        g_bar, h_bar = v[2 * m * m: 2 * m * m + m], v[2 * m * m + m:]
        Q = 0.5 * (Q + Q.T)

    h_nor = E_nor = None
    if pagerank:
        eta = W.metadata.eta
        if not eta > 0:
            raise PreconditionError(
                "PageRank of a finite-rank graphon needs a positive degree lower bound: set metadata.eta > 0"
            )
        y = np.linspace(0.0, 1.0, 4097)
        floor = float((g_bar @ W.h_values(y)).min())
        if floor < eta * (1.0 - 1e-9):
            raise PreconditionError(f"degree function drops to {floor:.6g}, below metadata.eta = {eta:.6g}")

        def normalised(y):
            g, h = W.g_values(y), W.h_values(y)
            inv = 1.0 / (g_bar @ h)
            return np.concatenate([(h * inv), np.einsum("in,jn->ijn", h, g * inv).reshape(m * m, -1)])

        res = numerics.integrate(normalised, spec=spec, breakpoints=bps)
        err = max(err, res.error)
        h_nor, E_nor = res.value[:m], res.value[m:].reshape(m, m)
    return EffectiveMatrices(Q=Q, E=E, g_bar=g_bar, h_bar=h_bar, h_nor=h_nor, E_nor=E_nor, quad_error=err)


def effective_matrices(W, quad=None, pagerank=False):
    """Effective measure and connectivity matrices of an SBM or finite-rank graphon.

    ``Q = int g g^T``, ``E = int h g^T``, ``g_bar = int g``, ``h_bar = int h``,
    and the normalised ``h_nor``, ``E_nor`` whose integrands are divided by the
    degree ``g_bar^T h(y)``.  For SBM graphons everything is closed form and the
    normalised pair is filled whenever every block degree is positive.  For
    finite-rank graphons the normalised pair is computed only when
    ``pagerank=True``, which requires ``metadata.eta > 0``.
    """
    ensure_valid(W)
    if isinstance(W, SBMGraphon):
        return _sbm_matrices(W)
    if isinstance(W, FiniteRankGraphon):
        return _fr_matrices(W, quad, pagerank)
    raise DomainError("effective matrices exist only for SBM and finite-rank graphons; discretize the kernel first")


def discretize_to_sbm(W, n_blocks, sbm_closed="right"):
    """SBM on the uniform ``n_blocks`` grid with ``P_ij = W(i/n, j/n)``.

    SBM inputs are read with right-closed blocks (the value just left of each
    grid point), so a grid that contains every block boundary reproduces the
    SBM exactly.
    """
    n = int(n_blocks)
    if n < 1:
        raise DomainError(f"n_blocks must be >= 1, got {n_blocks}")
    u = np.arange(1, n + 1) / n
    P = sample_kernel(W, u, sbm_closed)
    return SBMGraphon(np.arange(n + 1) / n, P, metadata=W.metadata, name=f"{W.name or W.variant}@{n}")


def sample_kernel(W, u, sbm_closed="right"):
    """Matrix ``W(u_i, u_j)``, exactly symmetric."""
    u = np.asarray(u, dtype=np.float64)
    if isinstance(W, SBMGraphon):
        k = W.block_index(u, closed=sbm_closed)
        P = W.P[np.ix_(k, k)]
    else:
        P = W(u[:, None], u[None, :])
    P = np.triu(P) + np.triu(P, 1).T
    return np.clip(P, 0.0, 1.0)


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------


def _metadata_from(doc):
    if doc is None:
        return Metadata()
    if not isinstance(doc, dict):
        raise ConfigError("metadata must be an object")
    extra = set(doc) - {"lipschitz_L", "breakpoints", "eta"}
    if extra:
        raise ConfigError(f"unknown metadata keys: {sorted(extra)}")
    try:
        L = float(doc.get("lipschitz_L", 0.0))
        bp = tuple(float(b) for b in doc.get("breakpoints", []))
        eta = float(doc.get("eta", 0.0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad metadata value: {exc}") from None
    return Metadata(L, bp, eta)


def _matrix(doc, key):
    val = doc.get(key)
    if not isinstance(val, list) or not all(isinstance(r, list) for r in val):
        raise ConfigError(f"{key!r} must be an array of arrays")
    try:
        return np.array(val, dtype=np.float64)
    except ValueError:
        raise ConfigError(f"{key!r} must be a rectangular numeric array") from None


def graphon_from_dict(doc):
    """Build a graphon from its JSON document (see README for the schema)."""
    if not isinstance(doc, dict):
        raise ConfigError("graphon document must be a JSON object")
    variant = doc.get("variant")
    common = {"variant", "metadata", "name"}
    md = _metadata_from(doc.get("metadata"))
    name = doc.get("name")
    if variant == "SBM":
        allowed = common | {"boundaries", "P"}
        b = doc.get("boundaries")
        if not isinstance(b, list):
            raise ConfigError("'boundaries' must be an array")
        W = SBMGraphon(np.array(b, dtype=np.float64), _matrix(doc, "P"), md, name)
    elif variant == "FiniteRank":
        allowed = common | {"g", "h"}
        g, h = doc.get("g"), doc.get("h")
        if not isinstance(g, list) or not isinstance(h, list):
            raise ConfigError("'g' and 'h' must be arrays of functions")
        W = FiniteRankGraphon([parse_function(f) for f in g], [parse_function(f) for f in h], md, name)
    elif variant == "AnalyticKernel":
        allowed = common | {"w"}
        w = doc.get("w")
        if not isinstance(w, dict):
            raise ConfigError("'w' must be an object")
        if w.get("kind") == "builtin":
            if w.get("name") not in BUILTIN_KERNELS or set(w) != {"kind", "name"}:
                raise ConfigError(f"unknown built-in kernel {w.get('name')!r}; available: {sorted(BUILTIN_KERNELS)}")
            W = AnalyticKernelGraphon(BUILTIN_KERNELS[w["name"]], md, name, builtin=w["name"])
        elif w.get("kind") == "expr":
            if set(w) != {"kind", "expr"}:
                raise ConfigError("expression kernel takes exactly the keys 'kind' and 'expr'")
            W = AnalyticKernelGraphon(w["expr"], md, name)
        else:
            raise ConfigError("'w.kind' must be 'builtin' or 'expr'")
    else:
        raise ConfigError(f"'variant' must be one of {VARIANTS}, got {variant!r}")
    extra = set(doc) - allowed
    if extra:
        raise ConfigError(f"unknown keys for {variant} graphon: {sorted(extra)}")
    return W


def graphon_to_dict(W):
    return W.to_dict()


def load_graphon(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read graphon file {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return graphon_from_dict(doc)
