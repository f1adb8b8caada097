"""Sense-preserving harmonic maps ``f = h + conj(g)`` and their differential operators.

A map is stored as the pair ``(h', w)`` with ``w = g'/h'`` the second complex
dilatation and the normalization ``h(0) = g(0) = 0``.  With ``F = log J_f``:

    F_z  = h''/h' - w' conj(w) / (1 - |w|^2)                 (pre-Schwarzian P_f)
    F_zz = (h''/h')' - w'' conj(w) / (1 - |w|^2) - (w' conj(w) / (1 - |w|^2))^2
    S_f  = F_zz - F_z^2 / 2

and ``F_zbar = conj(F_z)`` because ``F`` is real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgError, InternalMismatch, NotSensePreserving, SingularityError
from .geometry import SupSearchConfig, SupSearchResult, sup_search
from .jets import (
    Add, Blaschke, Compose, Const, Div, Expr, Mul, Scale, Sub, derivative, eval_jet, from_json,
    radial_antiderivative,
)

__all__ = [
    "HarmonicMap", "SchwarzianValue", "jacobian", "dilatation", "pre_schwarzian",
    "schwarzian", "analytic_schwarzian", "schwarzian_norm", "pre_schwarzian_norm", "shear",
    "lambda_combination", "lambda_log_derivative", "sh_sphi_residual", "map_value",
    "compose_automorphism", "affine_combination", "map_from_json",
]

# relative tolerance for the two routes to S_f
DUAL_FORM_RTOL = 1e-10


@dataclass(frozen=True)
class HarmonicMap:
    h_prime: Expr
    w: Expr = field(default_factory=lambda: Const(0j))
    label: str = ""
    metadata: tuple = ()

    @property
    def g_prime(self) -> Expr:
        return Mul(self.w, self.h_prime)

    def to_json(self) -> dict:
        d = {"h_prime": self.h_prime.to_json(), "w": self.w.to_json()}
        if self.label:
            d["label"] = self.label
        return d


def map_from_json(d: dict) -> HarmonicMap:
    """Map JSON: ``{"h_prime": AST, "w": AST}`` or ``{"shear": {"phi": AST, "w": AST}}``."""
    if "shear" in d:
        s = d["shear"]
        return shear(from_json(s["phi"]), from_json(s["w"]), label=d.get("label", ""))
    if "h_prime" not in d:
        raise ArgError("map JSON needs 'h_prime' (and optionally 'w') or 'shear'")
    w = from_json(d["w"]) if "w" in d else Const(0j)
    return HarmonicMap(from_json(d["h_prime"]), w, label=d.get("label", ""))


@dataclass(frozen=True)
class _Parts:
    """Pointwise building blocks shared by all operators."""

    hp: np.ndarray      # h'
    L: np.ndarray       # h''/h'
    dL: np.ndarray      # (h''/h')'
    w: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    denom: np.ndarray   # 1 - |w|^2


def _parts(f: HarmonicMap, z) -> _Parts:
    H = eval_jet(f.h_prime, z)
    W = eval_jet(f.w, z)
    hp = np.asarray(H.v)
    if np.any(hp == 0):
        raise NotSensePreserving("h' vanishes at an evaluation point")
    wv = np.asarray(W.v)
    denom = 1 - np.abs(wv) ** 2
    if np.any(denom <= 0):
        raise NotSensePreserving("|w| >= 1 at an evaluation point")
    L = np.asarray(H.d1) / hp
    dL = np.asarray(H.d2) / hp - L * L
    return _Parts(hp, L, dL, wv, np.asarray(W.d1), np.asarray(W.d2), denom)


def _out(x):
    x = np.asarray(x)
    if x.ndim == 0:
        return complex(x) if np.iscomplexobj(x) else float(x)
    return x


def jacobian(f: HarmonicMap, z):
    """``J_f = |h'|^2 (1 - |w|^2)``."""
    H = eval_jet(f.h_prime, z)
    W = eval_jet(f.w, z)
    J = np.abs(np.asarray(H.v)) ** 2 * (1 - np.abs(np.asarray(W.v)) ** 2)
    if np.any(J <= 0):
        raise NotSensePreserving("Jacobian is not positive at an evaluation point")
    return _out(J)


def dilatation(f: HarmonicMap, z):
    return eval_jet(f.w, z).v


def pre_schwarzian(f: HarmonicMap, z):
    """``P_f = F_z = h''/h' - w' conj(w) / (1 - |w|^2)``; ``F_zbar`` is its conjugate."""
    P = _parts(f, z)
    return _out(P.L - P.w1 * np.conj(P.w) / P.denom)


@dataclass(frozen=True)
class SchwarzianValue:
    P: complex
    Fzz: complex
    S: complex
    Sh: complex


def analytic_schwarzian(h_prime: Expr, z):
    """``S_h = (h''/h')' - (h''/h')^2 / 2`` from an expression for ``h'``."""
    H = eval_jet(h_prime, z)
    hp = np.asarray(H.v)
    if np.any(hp == 0):
        raise SingularityError("h' vanishes; Schwarzian undefined")
    L = np.asarray(H.d1) / hp
    dL = np.asarray(H.d2) / hp - L * L
    return _out(dL - 0.5 * L * L)


def schwarzian(f: HarmonicMap, z, rtol: float = DUAL_FORM_RTOL) -> SchwarzianValue:
    """Schwarzian of a harmonic map, computed along two independent routes.

    Route one forms ``F_zz - F_z^2/2``; route two is ``S_h`` plus the
    dilatation corrections.  They must agree to ``rtol`` (relative to the
    size of the terms involved) or :class:`InternalMismatch` is raised.
    """
    P = _parts(f, z)
    B = P.w1 * np.conj(P.w) / P.denom
    A2 = P.w2 * np.conj(P.w) / P.denom
    Fz = P.L - B
    Fzz = P.dL - A2 - B * B
    S1 = Fzz - 0.5 * Fz * Fz
    Sh = P.dL - 0.5 * P.L * P.L
    S2 = Sh + np.conj(P.w) / P.denom * (P.w1 * P.L - P.w2) - 1.5 * B * B
    scale = 1 + np.abs(P.dL) + np.abs(P.L) ** 2 + np.abs(A2) + np.abs(B) ** 2 + np.abs(P.L * B)
    err = np.abs(S1 - S2) / scale
    if np.any(err > rtol):
        raise InternalMismatch(f"Schwarzian routes disagree: max rel err {np.max(err):.3e}")
    return SchwarzianValue(_out(Fz), _out(Fzz), _out(S1), _out(Sh))


def schwarzian_route_gap(f: HarmonicMap, z) -> np.ndarray:
    """Relative gap between the two Schwarzian routes (diagnostic)."""
    P = _parts(f, z)
    B = P.w1 * np.conj(P.w) / P.denom
    A2 = P.w2 * np.conj(P.w) / P.denom
    Fz = P.L - B
    S1 = (P.dL - A2 - B * B) - 0.5 * Fz * Fz
    S2 = (P.dL - 0.5 * P.L * P.L) + np.conj(P.w) / P.denom * (P.w1 * P.L - P.w2) - 1.5 * B * B
    scale = 1 + np.abs(P.dL) + np.abs(P.L) ** 2 + np.abs(A2) + np.abs(B) ** 2 + np.abs(P.L * B)
    return np.abs(S1 - S2) / scale


def schwarzian_norm(f: HarmonicMap, cfg: SupSearchConfig | None = None) -> SupSearchResult:
    """Estimate of ``sup (1-|z|^2)^2 |S_f(z)|``."""
    return sup_search(lambda z: (1 - np.abs(z) ** 2) ** 2 * np.abs(schwarzian(f, z).S), cfg)


def pre_schwarzian_norm(f: HarmonicMap, cfg: SupSearchConfig | None = None) -> SupSearchResult:
    """Estimate of ``sup (1-|z|^2) |P_f(z)|``."""
    return sup_search(lambda z: (1 - np.abs(z) ** 2) * np.abs(pre_schwarzian(f, z)), cfg)


# --- constructions -----------------------------------------------------------------------


def shear(phi: Expr, w: Expr, label: str = "", check_points: int = 64) -> HarmonicMap:
    """Shear of ``phi`` with dilatation ``w``: ``h - g = phi`` and ``g' = w h'``.

    Hence ``h' = phi' / (1 - w)``.  ``1 - w`` and ``|w| < 1`` are checked on a
    sample grid.
    """
    r = np.linspace(0, 0.999, 12)[:, None]
    t = np.exp(2j * math.pi * np.arange(check_points) / check_points)[None, :]
    pts = (r * t).ravel()
    wv = np.asarray(eval_jet(w, pts).v)
    if np.any(np.abs(1 - wv) <= 1e-14):
        raise SingularityError("1 - w vanishes at a sample point")
    if np.any(np.abs(wv) >= 1):
        raise NotSensePreserving("the dilatation leaves the disk at a sample point")
    dphi = derivative(phi)
    one_minus_w = Sub(Const(1 + 0j), w)
    if isinstance(dphi, Const) and dphi.value == 1:
        hp = Div(Const(1 + 0j), one_minus_w)
    else:
        hp = Div(dphi, one_minus_w)
    return HarmonicMap(hp, w, label=label)


def lambda_combination(f: HarmonicMap, lam) -> Expr:
    """Expression for ``phi_lambda' = h' (1 + lambda w)`` where ``phi_lambda = h + lambda g``."""
    lam = complex(lam)
    if abs(abs(lam) - 1) > 1e-12:
        raise ArgError(f"lambda must be unimodular, got |lambda| = {abs(lam)!r}")
    return Mul(f.h_prime, Add(Const(1 + 0j), Scale(lam, f.w)))


def lambda_log_derivative(f: HarmonicMap, lam, z):
    """``phi''/phi' = h''/h' + lambda w' / (1 + lambda w)``."""
    lam = complex(lam)
    P = _parts(f, z)
    return _out(P.L + lam * P.w1 / (1 + lam * P.w))


def sh_sphi_residual(f: HarmonicMap, lam, z):
    """``|S_h - [S_phi + (phi''/phi') q + q^2/2 - lambda w''/(1 + lambda w)]|`` with
    ``q = lambda w' / (1 + lambda w)``; zero up to rounding."""
    lam = complex(lam)
    dphi = lambda_combination(f, lam)
    P = _parts(f, z)
    Sh = P.dL - 0.5 * P.L ** 2
    Sphi = np.asarray(analytic_schwarzian(dphi, z))
    Lphi = np.asarray(eval_jet(dphi, z).d1) / np.asarray(eval_jet(dphi, z).v)
    one = 1 + lam * P.w
    q = lam * P.w1 / one
    rhs = Sphi + Lphi * q + 0.5 * q * q - lam * P.w2 / one
    return _out(np.abs(Sh - rhs))


def map_value(f: HarmonicMap, z, nodes: int = 64):
    """``f(z) = h(z) + conj(g(z))`` with ``h(0) = g(0) = 0``."""
    h = radial_antiderivative(f.h_prime, z, nodes)
    g = radial_antiderivative(f.g_prime, z, nodes)
    return h + np.conj(g)


def compose_automorphism(f: HarmonicMap, a) -> HarmonicMap:
    """``f o phi_a``: ``h' -> h'(phi_a) phi_a'`` and ``w -> w o phi_a``."""
    sigma = Blaschke(complex(a))
    hp = Mul(Compose(f.h_prime, sigma), derivative(sigma))
    w = f.w if isinstance(f.w, Const) else Compose(f.w, sigma)
    return HarmonicMap(hp, w, label=f"{f.label}o phi_{complex(a)}")


def affine_combination(f: HarmonicMap, a, b) -> HarmonicMap:
    """``a f + b conj(f)`` for ``|a| > |b|``; its Jacobian is ``(|a|^2 - |b|^2) J_f``."""
    a, b = complex(a), complex(b)
    if not abs(a) > abs(b):
        raise ArgError("affine combination needs |a| > |b| to stay sense-preserving")
    factor = Add(Const(a), Scale(b, f.w))
    hp = Mul(f.h_prime, factor)
    w = Div(Add(Scale(a.conjugate(), f.w), Const(b.conjugate())), factor)
    return HarmonicMap(hp, w, label=f"{a}*{f.label}+{b}*conj")
