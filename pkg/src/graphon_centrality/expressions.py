"""Closed grammars for the functions that define graphons.

Two small languages are supported, both serialisable to JSON:

* scalar functions on [0, 1] (factors of finite-rank graphons): polynomials
  with ascending coefficients and scaled sines ``a * sin(n pi x)``;
* kernel expressions ``w(x, y)`` built from numbers, ``x``, ``y``, ``+``,
  ``-``, ``*``, division by a constant, squaring, ``min`` and ``max``.

Kernel strings are parsed with :mod:`ast` and compiled into a tree of numpy
closures, so evaluation never calls ``eval``.
"""
import ast
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ConfigError


@dataclass(frozen=True)
class Polynomial:
    coeffs: Tuple[float, ...]

    def __call__(self, x):
        return npoly.polyval(np.asarray(x, dtype=np.float64), self.coeffs)

    def to_dict(self):
        return {"kind": "poly", "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class Sine:
    """``scale * sin(freq * pi * x)``."""

    freq: int
    scale: float = 1.0

    def __call__(self, x):
        return self.scale * np.sin(self.freq * np.pi * np.asarray(x, dtype=np.float64))

    def to_dict(self):
        return {"kind": "builtin", "name": "sine", "freq": self.freq, "scale": self.scale}


def _number(doc, key, default=None):
    val = doc.get(key, default)
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not np.isfinite(val):
        raise ConfigError(f"function field {key!r} must be a finite number, got {val!r}")
    return float(val)


def parse_function(doc):
    """Build a scalar function from its JSON description."""
    if not isinstance(doc, dict):
        raise ConfigError(f"function must be an object, got {doc!r}")
    kind = doc.get("kind")
    if kind == "poly":
        allowed = {"kind", "coeffs"}
        coeffs = doc.get("coeffs")
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError("poly function needs a non-empty 'coeffs' list")
        coeffs = tuple(_number({"c": c}, "c") for c in coeffs)
        out = Polynomial(coeffs)
    elif kind == "builtin":
        name = doc.get("name")
        if name == "constant":
            allowed = {"kind", "name", "value"}
            out = Polynomial((_number(doc, "value"),))
        elif name == "monomial":
            allowed = {"kind", "name", "power", "scale"}
            k = doc.get("power")
            if isinstance(k, bool) or not isinstance(k, int) or k < 0:
                raise ConfigError(f"monomial power must be a nonnegative integer, got {k!r}")
            out = Polynomial((0.0,) * k + (_number(doc, "scale", 1.0),))
        elif name == "sine":
            allowed = {"kind", "name", "freq", "scale"}
            n = doc.get("freq", 1)
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise ConfigError(f"sine freq must be a positive integer, got {n!r}")
            out = Sine(n, _number(doc, "scale", 1.0))
        else:
            raise ConfigError(f"unknown built-in function {name!r} (expected constant, monomial or sine)")
    else:
        raise ConfigError(f"function kind must be 'poly' or 'builtin', got {kind!r}")
    extra = set(doc) - allowed
    if extra:
        raise ConfigError(f"unknown keys in function description: {sorted(extra)}")
    return out


def integrate_product(f, g):
    """Exact ``int_0^1 f g`` when both factors are polynomials, else None."""
    if isinstance(f, Polynomial) and isinstance(g, Polynomial):
        anti = npoly.polyint(npoly.polymul(f.coeffs, g.coeffs))
        return float(npoly.polyval(1.0, anti) - npoly.polyval(0.0, anti))
    return None


# ---------------------------------------------------------------------------
# kernel expressions
# ---------------------------------------------------------------------------

BUILTIN_KERNELS = {
    "minmax": "min(x, y) * (1 - max(x, y))",
}


class KernelExpression:
    """A compiled kernel expression ``w(x, y)``."""

    def __init__(self, source):
        if not isinstance(source, str) or not source.strip():
            raise ConfigError("kernel expression must be a non-empty string")
        try:
            tree = ast.parse(source.strip(), mode="eval")
        except SyntaxError as exc:
            raise ConfigError(f"cannot parse kernel expression {source!r}: {exc.msg}") from None
        self.source = source.strip()
        self._fn = _compile(tree.body)

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
        return np.broadcast_to(self._fn(x, y), x.shape).astype(np.float64)

    def __repr__(self):
        return f"KernelExpression({self.source!r})"

    def __eq__(self, other):
        return isinstance(other, KernelExpression) and other.source == self.source

    def __hash__(self):
        return hash(self.source)


def _constant_value(node):
    fn = _compile(node)
    if getattr(fn, "constant", None) is None:
        return None
    return fn.constant


def _const(c):
    fn = lambda x, y: np.float64(c)  # noqa: E731
    fn.constant = float(c)
    return fn


def _compile(node):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ConfigError(f"unsupported literal {node.value!r} in kernel expression")
        return _const(node.value)
    if isinstance(node, ast.Name):
        if node.id == "x":
            return lambda x, y: x
        if node.id == "y":
            return lambda x, y: y
        raise ConfigError(f"unknown variable {node.id!r} in kernel expression (only x and y)")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _compile(node.operand)
        if isinstance(node.op, ast.UAdd):
            return inner
        if getattr(inner, "constant", None) is not None:
            return _const(-inner.constant)
        return lambda x, y: -inner(x, y)
    if isinstance(node, ast.BinOp):
        op = node.op
        if isinstance(op, ast.Pow):
            if _constant_value(node.right) != 2.0:
                raise ConfigError("only squaring (** 2) is allowed in kernel expressions")
            base = _compile(node.left)
            return lambda x, y: base(x, y) ** 2
        left, right = _compile(node.left), _compile(node.right)
        lc, rc = getattr(left, "constant", None), getattr(right, "constant", None)
        if lc is not None and rc is not None and isinstance(op, (ast.Add, ast.Sub, ast.Mult)):
            folded = {ast.Add: lc + rc, ast.Sub: lc - rc, ast.Mult: lc * rc}[type(op)]
            return _const(folded)
        if isinstance(op, ast.Add):
            return lambda x, y: left(x, y) + right(x, y)
        if isinstance(op, ast.Sub):
            return lambda x, y: left(x, y) - right(x, y)
        if isinstance(op, ast.Mult):
            return lambda x, y: left(x, y) * right(x, y)
        if isinstance(op, ast.Div):
            c = getattr(right, "constant", None)
            if c is None or c == 0.0:
                raise ConfigError("division is only allowed by a nonzero constant")
            return lambda x, y: left(x, y) / c
        raise ConfigError(f"operator {type(op).__name__} is not part of the kernel grammar")
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in ("min", "max"):
        if node.keywords or len(node.args) != 2:
            raise ConfigError(f"{node.func.id} takes exactly two arguments")
        a, b = _compile(node.args[0]), _compile(node.args[1])
        red = np.minimum if node.func.id == "min" else np.maximum
        return lambda x, y: red(a(x, y), b(x, y))
    raise ConfigError(f"unsupported construct {ast.dump(node)[:60]!r} in kernel expression")
