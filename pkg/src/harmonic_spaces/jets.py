"""Analytic expression trees with third-order jet arithmetic.

An :class:`Expr` is an immutable tree describing an analytic function on the
unit disk.  :func:`eval_jet` propagates the value together with the first
three complex derivatives through the tree, so quantities like ``h''/h'`` and
``(h''/h')'`` are available to machine precision from an expression for
``h'`` alone.  Evaluation is vectorized: ``z`` may be a scalar or an array.

Powers and logarithms use the principal branch, which makes ``(1 - z)**a``
and ``log(1 - z)`` analytic on the disk (branch cut along ``[1, inf)``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .errors import ArgError, DomainError, SingularityError

__all__ = [
    "Jet3", "Expr", "Const", "Var", "Add", "Sub", "Mul", "Div", "Neg", "Scale",
    "Affine", "Pow", "Log", "Exp", "Compose", "Blaschke", "const", "Z",
    "eval_jet", "evaluate", "derivative", "radial_antiderivative",
    "finite_difference_jet", "from_json", "to_json", "dumps", "loads",
]


@dataclass(frozen=True)
class Jet3:
    """Value and derivatives of order 1..3 at a point (or array of points)."""

    v: Any
    d1: Any
    d2: Any
    d3: Any

    def __add__(self, other: Jet3) -> Jet3:
        return Jet3(self.v + other.v, self.d1 + other.d1, self.d2 + other.d2, self.d3 + other.d3)

    def __sub__(self, other: Jet3) -> Jet3:
        return Jet3(self.v - other.v, self.d1 - other.d1, self.d2 - other.d2, self.d3 - other.d3)

    def __neg__(self) -> Jet3:
        return Jet3(-self.v, -self.d1, -self.d2, -self.d3)

    def scale(self, c) -> Jet3:
        return Jet3(c * self.v, c * self.d1, c * self.d2, c * self.d3)

    def __mul__(self, other: Jet3) -> Jet3:
        # Leibniz rule through order 3
        u, w = self, other
        return Jet3(
            u.v * w.v,
            u.d1 * w.v + u.v * w.d1,
            u.d2 * w.v + 2 * u.d1 * w.d1 + u.v * w.d2,
            u.d3 * w.v + 3 * u.d2 * w.d1 + 3 * u.d1 * w.d2 + u.v * w.d3,
        )

    def chain(self, f0, f1, f2, f3) -> Jet3:
        """Jet of ``F(self)`` given ``F, F', F'', F'''`` at ``self.v`` (Faa di Bruno)."""
        g1, g2, g3 = self.d1, self.d2, self.d3
        return Jet3(
            f0,
            f1 * g1,
            f2 * g1 * g1 + f1 * g2,
            f3 * g1 ** 3 + 3 * f2 * g1 * g2 + f1 * g3,
        )

    def reciprocal(self) -> Jet3:
        r = 1.0 / self.v
        return self.chain(r, -r * r, 2 * r ** 3, -6 * r ** 4)

    def __truediv__(self, other: Jet3) -> Jet3:
        return self * other.reciprocal()

    def components(self) -> tuple:
        return (self.v, self.d1, self.d2, self.d3)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(c)) for c in self.components())


def _zero_jet(z: np.ndarray) -> Jet3:
    zero = np.zeros_like(z)
    return Jet3(zero, zero, zero, zero)


def _as_complex(c) -> complex:
    if isinstance(c, (list, tuple)):
        if len(c) != 2:
            raise ArgError(f"complex scalar must be [re, im], got {c!r}")
        return complex(float(c[0]), float(c[1]))
    return complex(c)


def _pair(c: complex) -> list:
    return [c.real, c.imag]


def _check_base(base: np.ndarray, node: Expr, what: str) -> None:
    if np.any(base == 0) or not np.all(np.isfinite(base)):
        raise SingularityError(f"{what} has a singular base in node {node.to_json()!r}", node=node)


class Expr:
    """Base class of the expression tree.

    Subclasses implement ``_jet`` (vectorized jet on a complex array),
    ``to_json`` and ``children``.  Python operators build new trees.
    """

    op: str = ""

    def _jet(self, z: np.ndarray) -> Jet3:  # pragma: no cover - abstract
        raise NotImplementedError

    def to_json(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError

    def children(self) -> tuple:
        return ()

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Sub(self, _lift(other))

    def __rsub__(self, other):
        return Sub(_lift(other), self)

    def __mul__(self, other):
        if isinstance(other, Expr):
            return Mul(self, other)
        return Scale(complex(other), self)

    def __rmul__(self, other):
        return Scale(complex(other), self)

    def __truediv__(self, other):
        if isinstance(other, Expr):
            return Div(self, other)
        return Scale(1.0 / complex(other), self)

    def __rtruediv__(self, other):
        return Div(_lift(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, exponent):
        return Pow(self, float(exponent))


def _lift(x) -> Expr:
    return x if isinstance(x, Expr) else Const(complex(x))


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: complex
    op = "const"

    def _jet(self, z):
        zero = np.zeros_like(z)
        return Jet3(np.full_like(z, self.value), zero, zero, zero)

    def to_json(self):
        return {"op": "const", "value": _pair(complex(self.value))}


@dataclass(frozen=True, eq=True)
class Var(Expr):
    op = "z"

    def _jet(self, z):
        zero = np.zeros_like(z)
        return Jet3(z, np.ones_like(z), zero, zero)

    def to_json(self):
        return {"op": "z"}


@dataclass(frozen=True, eq=True)
class _Binary(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)

    def to_json(self):
        return {"op": self.op, "left": self.left.to_json(), "right": self.right.to_json()}


class Add(_Binary):
    op = "add"

    def _jet(self, z):
        return self.left._jet(z) + self.right._jet(z)


class Sub(_Binary):
    op = "sub"

    def _jet(self, z):
        return self.left._jet(z) - self.right._jet(z)


class Mul(_Binary):
    op = "mul"

    def _jet(self, z):
        return self.left._jet(z) * self.right._jet(z)


class Div(_Binary):
    op = "div"

    def _jet(self, z):
        den = self.right._jet(z)
        _check_base(den.v, self, "division")
        return self.left._jet(z) / den


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr
    op = "neg"

    def _jet(self, z):
        return -self.arg._jet(z)

    def children(self):
        return (self.arg,)

    def to_json(self):
        return {"op": "neg", "arg": self.arg.to_json()}


@dataclass(frozen=True, eq=True)
class Scale(Expr):
    factor: complex
    arg: Expr
    op = "scale"

    def _jet(self, z):
        return self.arg._jet(z).scale(self.factor)

    def children(self):
        return (self.arg,)

    def to_json(self):
        return {"op": "scale", "factor": _pair(complex(self.factor)), "arg": self.arg.to_json()}


@dataclass(frozen=True, eq=True)
class Affine(Expr):
    """``a + b z``."""

    a: complex
    b: complex
    op = "affine"

    def _jet(self, z):
        zero = np.zeros_like(z)
        return Jet3(self.a + self.b * z, np.full_like(z, self.b), zero, zero)

    def to_json(self):
        return {"op": "affine", "a": _pair(complex(self.a)), "b": _pair(complex(self.b))}


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    """Principal branch of ``base ** exponent`` for a real exponent."""

    base: Expr
    exponent: float
    op = "pow"

    def _jet(self, z):
        u = self.base._jet(z)
        a = self.exponent
        if a == 0.0:
            return self.base._jet(z).chain(np.ones_like(z), *([np.zeros_like(z)] * 3))
        if a != int(a) or a < 0:
            _check_base(u.v, self, "pow")
        if a == int(a) and a >= 0:
            # integer powers have no branch and no singularity
            n = int(a)
            f = [u.v ** n, n * u.v ** (n - 1) if n >= 1 else 0 * u.v,
                 n * (n - 1) * u.v ** (n - 2) if n >= 2 else 0 * u.v,
                 n * (n - 1) * (n - 2) * u.v ** (n - 3) if n >= 3 else 0 * u.v]
            return u.chain(*f)
        f0 = np.power(u.v, a)
        r = 1.0 / u.v
        return u.chain(f0, a * f0 * r, a * (a - 1) * f0 * r * r, a * (a - 1) * (a - 2) * f0 * r ** 3)

    def children(self):
        return (self.base,)

    def to_json(self):
        return {"op": "pow", "base": self.base.to_json(), "exp": float(self.exponent)}


@dataclass(frozen=True, eq=True)
class Log(Expr):
    arg: Expr
    op = "log"

    def _jet(self, z):
        u = self.arg._jet(z)
        _check_base(u.v, self, "log")
        r = 1.0 / u.v
        return u.chain(np.log(u.v), r, -r * r, 2 * r ** 3)

    def children(self):
        return (self.arg,)

    def to_json(self):
        return {"op": "log", "arg": self.arg.to_json()}


@dataclass(frozen=True, eq=True)
class Exp(Expr):
    arg: Expr
    op = "exp"

    def _jet(self, z):
        u = self.arg._jet(z)
        e = np.exp(u.v)
        return u.chain(e, e, e, e)

    def children(self):
        return (self.arg,)

    def to_json(self):
        return {"op": "exp", "arg": self.arg.to_json()}


@dataclass(frozen=True, eq=True)
class Compose(Expr):
    """``outer(inner(z))``."""

    outer: Expr
    inner: Expr
    op = "compose"

    def _jet(self, z):
        g = self.inner._jet(z)
        f = self.outer._jet(g.v)
        return g.chain(f.v, f.d1, f.d2, f.d3)

    def children(self):
        return (self.outer, self.inner)

    def to_json(self):
        return {"op": "compose", "outer": self.outer.to_json(), "inner": self.inner.to_json()}


@dataclass(frozen=True, eq=True)
class Blaschke(Expr):
    """The disk automorphism ``(a - z) / (1 - conj(a) z)``."""

    a: complex
    op = "blaschke"

    def __post_init__(self):
        if not abs(self.a) < 1:
            raise ArgError(f"blaschke parameter must satisfy |a| < 1, got {self.a!r}")

    def _jet(self, z):
        a = complex(self.a)
        ab = a.conjugate()
        q = 1.0 / (1.0 - ab * z)
        c = abs(a) ** 2 - 1.0
        return Jet3((a - z) * q, c * q * q, 2 * ab * c * q ** 3, 6 * ab * ab * c * q ** 4)

    def to_json(self):
        return {"op": "blaschke", "a": _pair(complex(self.a))}


Z = Var()


def const(c) -> Const:
    return Const(complex(c))


# --- evaluation ---------------------------------------------------------------


def _unwrap(x, scalar: bool):
    return complex(x) if scalar else x


def eval_jet(expr: Expr, z) -> Jet3:
    """Value and first three derivatives of ``expr`` at ``z`` (|z| < 1)."""
    zz = np.asarray(z, dtype=complex)
    if np.any(~(np.abs(zz) < 1)):
        raise DomainError(f"evaluation point outside the unit disk: max |z| = {np.max(np.abs(zz))!r}")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        jet = expr._jet(zz)
    scalar = zz.ndim == 0
    comps = [np.broadcast_to(c, zz.shape) for c in jet.components()]
    if not all(np.all(np.isfinite(c)) for c in comps):
        raise SingularityError(f"non-finite jet for {expr.to_json()!r}", node=expr)
    return Jet3(*(_unwrap(c[()] if scalar else c, scalar) for c in comps))


def evaluate(expr: Expr, z):
    """Value of ``expr`` at ``z``."""
    return eval_jet(expr, z).v


# --- symbolic derivative --------------------------------------------------------


def _is_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 0


def _is_one(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 1


def _add(a: Expr, b: Expr) -> Expr:
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Add(a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_zero(a) or _is_zero(b):
        return Const(0j)
    if _is_one(a):
        return b
    if _is_one(b):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if isinstance(a, Const):
        return _scale(a.value, b)
    if isinstance(b, Const):
        return _scale(b.value, a)
    return Mul(a, b)


def _scale(c: complex, e: Expr) -> Expr:
    if c == 0 or _is_zero(e):
        return Const(0j)
    if c == 1:
        return e
    if isinstance(e, Const):
        return Const(c * e.value)
    return Scale(complex(c), e)


def derivative(expr: Expr) -> Expr:
    """Symbolic z-derivative as a new expression (light constant folding only)."""
    e = expr
    if isinstance(e, Const):
        return Const(0j)
    if isinstance(e, Var):
        return Const(1 + 0j)
    if isinstance(e, Add):
        return _add(derivative(e.left), derivative(e.right))
    if isinstance(e, Sub):
        dl, dr = derivative(e.left), derivative(e.right)
        if _is_zero(dr):
            return dl
        return Sub(dl, dr) if not _is_zero(dl) else _scale(-1, dr)
    if isinstance(e, Mul):
        return _add(_mul(derivative(e.left), e.right), _mul(e.left, derivative(e.right)))
    if isinstance(e, Div):
        # (u/v)' = u'/v - u v'/v^2
        du, dv = derivative(e.left), derivative(e.right)
        first = Div(du, e.right) if not _is_zero(du) else Const(0j)
        if _is_zero(dv):
            return first
        second = _mul(_mul(e.left, dv), Pow(e.right, -2.0))
        return Sub(first, second) if not _is_zero(first) else _scale(-1, second)
    if isinstance(e, Neg):
        return _scale(-1, derivative(e.arg))
    if isinstance(e, Scale):
        return _scale(e.factor, derivative(e.arg))
    if isinstance(e, Affine):
        return Const(complex(e.b))
    if isinstance(e, Pow):
        if e.exponent == 0:
            return Const(0j)
        outer = Const(1 + 0j) if e.exponent == 1 else Pow(e.base, e.exponent - 1)
        return _mul(_scale(e.exponent, outer), derivative(e.base))
    if isinstance(e, Log):
        return _mul(derivative(e.arg), Pow(e.arg, -1.0))
    if isinstance(e, Exp):
        return _mul(e, derivative(e.arg))
    if isinstance(e, Compose):
        return _mul(Compose(derivative(e.outer), e.inner), derivative(e.inner))
    if isinstance(e, Blaschke):
        a = complex(e.a)
        return _scale(abs(a) ** 2 - 1, Pow(Affine(1, -a.conjugate()), -2.0))
    raise ArgError(f"cannot differentiate node {type(e).__name__}")


# --- integration and finite differences ----------------------------------------------


def radial_antiderivative(expr: Expr, z, nodes: int = 64):
    """``int_0^z expr`` along the segment ``[0, z]`` by Gauss-Legendre."""
    zz = np.asarray(z, dtype=complex)
    if np.any(~(np.abs(zz) < 1)):
        raise DomainError("antiderivative endpoint outside the unit disk")
    x, wts = np.polynomial.legendre.leggauss(int(nodes))
    t = 0.5 * (x + 1.0)
    pts = zz[..., None] * t
    vals = evaluate(expr, pts)
    out = 0.5 * np.sum(vals * wts, axis=-1) * zz
    return complex(out) if zz.ndim == 0 else out


def finite_difference_jet(expr: Expr, z, step: float = 0.025, method: str = "contour",
                          points: int = 32) -> Jet3:
    """Derivatives from function values only; an independent check on :func:`eval_jet`.

    ``method="contour"`` applies the trapezoid rule to Cauchy's integral on the
    circle of radius ``step`` about ``z`` (spectrally accurate for analytic
    input).  ``method="central"`` uses the classical central-difference
    stencils with spacing ``step``.
    """
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) + 3 * step >= 1):
        raise DomainError("finite-difference stencil leaves the unit disk")
    f = lambda pts: evaluate(expr, pts)
    if method == "contour":
        k = np.arange(points)
        omega = np.exp(2j * np.pi * k / points)
        vals = f(zz[..., None] + step * omega)
        ds = []
        for order in range(4):
            coef = np.mean(vals * omega ** (-order), axis=-1)
            ds.append(math.factorial(order) * coef / step ** order)
        v = f(zz)
        jet = Jet3(v, ds[1], ds[2], ds[3])
    elif method == "central":
        h = step
        fm2, fm1, f0, fp1, fp2 = (f(zz + s * h) for s in (-2, -1, 0, 1, 2))
        jet = Jet3(f0, (fp1 - fm1) / (2 * h), (fp1 - 2 * f0 + fm1) / h ** 2,
                   (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h ** 3))
    else:
        raise ArgError(f"unknown method {method!r}")
    if zz.ndim == 0:
        return Jet3(*(complex(np.asarray(c)[()]) for c in jet.components()))
    return jet


# --- JSON -----------------------------------------------------------------------------

_BINARY = {"add": Add, "sub": Sub, "mul": Mul, "div": Div}
_UNARY = {"neg": Neg, "log": Log, "exp": Exp}


def from_json(d: dict) -> Expr:
    """Build an expression from its JSON AST (``{"op": ..., ...}``)."""
    if not isinstance(d, dict) or "op" not in d:
        raise ArgError(f"not an expression node: {d!r}")
    op = d["op"]
    try:
        if op == "const":
            return Const(_as_complex(d["value"]))
        if op == "z":
            return Var()
        if op in _BINARY:
            return _BINARY[op](from_json(d["left"]), from_json(d["right"]))
        if op in _UNARY:
            return _UNARY[op](from_json(d["arg"]))
        if op == "scale":
            return Scale(_as_complex(d["factor"]), from_json(d["arg"]))
        if op == "affine":
            return Affine(_as_complex(d["a"]), _as_complex(d["b"]))
        if op == "pow":
            return Pow(from_json(d["base"]), float(d["exp"]))
        if op == "compose":
            return Compose(from_json(d["outer"]), from_json(d["inner"]))
        if op == "blaschke":
            return Blaschke(_as_complex(d["a"]))
    except KeyError as exc:
        raise ArgError(f"node {op!r} is missing field {exc}") from None
    raise ArgError(f"unknown op {op!r}")


def to_json(expr: Expr) -> dict:
    return expr.to_json()


def dumps(expr: Expr) -> str:
    return json.dumps(expr.to_json(), sort_keys=True)


def loads(s: str) -> Expr:
    return from_json(json.loads(s))


def walk(expr: Expr, visit: Callable[[Expr], None]) -> None:
    visit(expr)
    for c in expr.children():
        walk(c, visit)
