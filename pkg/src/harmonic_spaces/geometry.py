"""Disk automorphisms, hyperbolic distance, Carleson boxes and the sup search.

Every supremum over the disk in the package (Bloch-type norms, Schwarzian
norms, suprema over automorphism parameters and over Carleson boxes) goes
through :func:`sup_search`, a deterministic multi-level polar grid search
with local refinement around the best point.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import ArgError, DomainError, NotSelfMap
from .jets import Expr, eval_jet

__all__ = [
    "phi", "phi_prime", "invariance_identity_residual", "hyperbolic_distance",
    "pseudo_hyperbolic_distance", "schwarz_pick_margin", "CarlesonBox", "BoxRegion",
    "box_region", "SupSearchConfig", "SupSearchResult", "sup_search",
]


def _check_disk(*pts) -> None:
    for p in pts:
        if np.any(~(np.abs(np.asarray(p)) < 1)):
            raise DomainError("point outside the open unit disk")


def phi(a, z):
    """The involutive automorphism ``(a - z) / (1 - conj(a) z)``."""
    _check_disk(a, z)
    a = np.asarray(a, dtype=complex)
    return (a - z) / (1 - np.conj(a) * z)


def phi_prime(a, z):
    _check_disk(a, z)
    a = np.asarray(a, dtype=complex)
    return (np.abs(a) ** 2 - 1) / (1 - np.conj(a) * z) ** 2


def one_minus_phi_sq(a, z):
    """``1 - |phi_a(z)|^2`` in the cancellation-free product form."""
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    return (1 - np.abs(a) ** 2) * (1 - np.abs(z) ** 2) / np.abs(1 - np.conj(a) * z) ** 2


def invariance_identity_residual(a, z):
    """``|(1-|z|^2)|phi_a'(z)| - (1-|phi_a(z)|^2)|``."""
    lhs = (1 - np.abs(z) ** 2) * np.abs(phi_prime(a, z))
    rhs = 1 - np.abs(phi(a, z)) ** 2
    return np.abs(lhs - rhs)


def pseudo_hyperbolic_distance(z, xi):
    _check_disk(z, xi)
    z, xi = np.asarray(z, dtype=complex), np.asarray(xi, dtype=complex)
    # ratio of moduli keeps the result exactly symmetric in (z, xi)
    return np.abs(z - xi) / np.abs(1 - np.conj(xi) * z)


def hyperbolic_distance(z, xi):
    """``artanh`` of the pseudo-hyperbolic distance, via ``1 - p^2`` in product form."""
    p = pseudo_hyperbolic_distance(z, xi)
    z, xi = np.asarray(z, dtype=complex), np.asarray(xi, dtype=complex)
    one_minus_p2 = (1 - np.abs(z) ** 2) * (1 - np.abs(xi) ** 2) / np.abs(1 - np.conj(xi) * z) ** 2
    return np.log1p(p) - 0.5 * np.log(one_minus_p2)


def schwarz_pick_margin(w: Expr, z):
    """``(1 - |w(z)|^2) - (1 - |z|^2) |w'(z)|``; non-negative for self-maps."""
    jet = eval_jet(w, z)
    wv = np.asarray(jet.v)
    if np.any(np.abs(wv) >= 1):
        raise NotSelfMap("dilatation leaves the disk at a sample point")
    z = np.asarray(z)
    out = (1 - np.abs(wv) ** 2) - (1 - np.abs(z) ** 2) * np.abs(jet.d1)
    return float(out) if out.ndim == 0 else out


# --- Carleson boxes -----------------------------------------------------------------


@dataclass(frozen=True)
class CarlesonBox:
    """``S(I)`` for the arc centred at ``theta`` of normalized length ``len``."""

    theta: float
    len: float

    def __post_init__(self):
        if not (0 < self.len <= 1):
            raise ArgError(f"box length must lie in (0, 1], got {self.len!r}")

    def area(self) -> float:
        l = self.len
        return math.pi * l * l * (2 - l)

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        d = np.angle(z * np.exp(-1j * self.theta))
        return (1 - r < self.len) & (r < 1) & (np.abs(d) <= math.pi * self.len)


@dataclass(frozen=True)
class BoxRegion:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))


def box_region(box: CarlesonBox, rings: int = 14, radial_nodes: int = 16,
               panel_width: float = 2 * math.pi / 32, panel_nodes: int = 16) -> BoxRegion:
    """Polar product rule (area weights ``r dr dtheta``) covering ``S(I)``.

    Radially, dyadic rings ``1 - l 2^-i`` accumulate at the boundary and the
    last one runs up to ``r = 1``; angularly, Gauss-Legendre panels cover the
    arc of half-width ``pi l``.
    """
    if not isinstance(box, CarlesonBox):
        raise ArgError("box_region expects a CarlesonBox")
    l = box.len
    n_rings = max(4, rings - int(round(-math.log2(l))))
    x, w = np.polynomial.legendre.leggauss(radial_nodes)
    # distances t = 1 - r, ring i spans t in [l 2^-(i+1), l 2^-i]
    ts, tw = [], []
    for i in range(n_rings):
        hi = l * 2.0 ** (-i)
        lo = l * 2.0 ** (-i - 1) if i < n_rings - 1 else 0.0
        ts.append(lo + (hi - lo) * 0.5 * (x + 1))
        tw.append(0.5 * (hi - lo) * w)
    t = np.concatenate(ts)
    r = 1 - t
    rw = np.concatenate(tw) * r
    half = math.pi * l
    n_panels = max(1, math.ceil(2 * half / panel_width))
    xa, wa = np.polynomial.legendre.leggauss(panel_nodes)
    edges = np.linspace(-half, half, n_panels + 1)
    offs = (edges[:-1, None] + (edges[1:, None] - edges[:-1, None]) * 0.5 * (xa + 1)).ravel()
    ow = (0.5 * (edges[1:, None] - edges[:-1, None]) * wa).ravel()
    nodes = (r[:, None] * np.exp(1j * (box.theta + offs))[None, :]).ravel()
    weights = (rw[:, None] * ow[None, :]).ravel()
    return BoxRegion(nodes, weights)


# --- supremum search ---------------------------------------------------------------------


@dataclass(frozen=True)
class SupSearchConfig:
    """Grid: the origin plus rings ``r_k = 1 - 2^-k`` (k = 1..levels), each with
    ``angular`` equally spaced points, followed by ``refine_rounds`` rounds of
    local refinement around the running best point."""

    levels: int = 14
    angular: int = 256
    refine_rounds: int = 3
    refine_points: int = 9
    cap: float | None = None
    include_origin: bool = True

    def __post_init__(self):
        if self.levels < 1 or self.angular < 1 or self.refine_rounds < 0 or self.refine_points < 2:
            raise ArgError(f"invalid sup-search config {self!r}")
        if self.cap is not None and not (0 < self.cap < 1):
            raise ArgError("cap radius must lie in (0, 1)")

    @property
    def cap_radius(self) -> float:
        return self.cap if self.cap is not None else 1 - 2.0 ** (-self.levels)

    @property
    def cap_level(self) -> float:
        return -math.log2(1 - self.cap_radius)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cap"] = self.cap_radius
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SupSearchConfig":
        known = {k: d[k] for k in ("levels", "angular", "refine_rounds", "refine_points", "cap",
                                   "include_origin") if k in d}
        return cls(**known)


@dataclass
class SupSearchResult:
    sup: float
    argmax: complex
    level_maxima: list
    trace: list
    converged: bool
    boundary_limited: bool
    evaluations: int
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "sup": self.sup,
            "argmax": [float(self.argmax.real), float(self.argmax.imag)],
            "level_maxima": self.level_maxima,
            "trace": self.trace,
            "converged": self.converged,
            "boundary_limited": self.boundary_limited,
            "evaluations": self.evaluations,
            **({"extra": self.extra} if self.extra else {}),
        }


def _best_index(pts: np.ndarray, vals: np.ndarray) -> int:
    top = np.max(vals)
    cand = np.flatnonzero(vals == top)
    if len(cand) == 1:
        return int(cand[0])
    # points of one grid level share a radius up to rounding
    radii = np.round(np.abs(pts[cand]), 12)
    angles = np.round(np.mod(np.angle(pts[cand]), 2 * math.pi), 12)
    order = np.lexsort((angles, radii))
    return int(cand[order[0]])


def _level_to_radius(s):
    return 1 - np.exp2(-np.asarray(s, dtype=float))


def sup_search(objective: Callable[[np.ndarray], np.ndarray], cfg: SupSearchConfig | None = None,
               rel_tol: float = 1e-6) -> SupSearchResult:
    """Estimate ``sup objective(z)`` over ``|z| <= cap``.

    ``objective`` receives a complex array and returns a real array of the same
    shape.  Ties are broken by smallest ``|z|``, then smallest angle in
    ``[0, 2 pi)``.  The reported ``sup`` is the max over every evaluated point,
    so extra refinement rounds never decrease it.
    """
    cfg = cfg or SupSearchConfig()
    s_cap = cfg.cap_level
    n_ang = cfg.angular
    levels = [k for k in range(1, cfg.levels + 1) if k <= s_cap + 1e-12]
    if not levels or levels[-1] < s_cap - 1e-12:
        levels.append(s_cap)
    theta = 2 * math.pi * np.arange(n_ang) / n_ang

    all_pts: list[np.ndarray] = []
    all_vals: list[np.ndarray] = []
    level_maxima = []

    def run(pts):
        vals = np.asarray(objective(pts), dtype=float)
        if vals.shape != pts.shape:
            vals = np.broadcast_to(vals, pts.shape).astype(float)
        if np.any(np.isnan(vals)):
            bad = pts[np.isnan(vals)][0]
            raise ArithmeticError(f"objective returned NaN at z={complex(bad)!r}")
        all_pts.append(pts)
        all_vals.append(vals)
        return vals

    if cfg.include_origin:
        v0 = run(np.zeros(1, dtype=complex))
        level_maxima.append({"level": 0, "radius": 0.0, "max": float(v0[0])})
    for k in levels:
        r = float(_level_to_radius(k))
        vals = run(r * np.exp(1j * theta))
        level_maxima.append({"level": float(k), "radius": r, "max": float(np.max(vals))})

    pts = np.concatenate(all_pts)
    vals = np.concatenate(all_vals)
    i = _best_index(pts, vals)
    best_pt, best_val = pts[i], float(vals[i])
    trace = [{"round": 0, "sup": best_val, "argmax": [float(best_pt.real), float(best_pt.imag)]}]

    ds, dt = 1.0, 2 * math.pi / n_ang
    for rnd in range(1, cfg.refine_rounds + 1):
        r0 = abs(best_pt)
        s0 = -math.log2(1 - r0) if r0 > 0 else 0.0
        t0 = math.atan2(best_pt.imag, best_pt.real)
        ss = np.clip(np.linspace(s0 - ds, s0 + ds, cfg.refine_points), 0.0, s_cap)
        tt = t0 + np.linspace(-dt, dt, cfg.refine_points)
        loc = (_level_to_radius(ss)[:, None] * np.exp(1j * tt)[None, :]).ravel()
        run(loc)
        pts = np.concatenate(all_pts)
        vals = np.concatenate(all_vals)
        i = _best_index(pts, vals)
        prev = best_val
        best_pt, best_val = pts[i], float(vals[i])
        trace.append({"round": rnd, "sup": best_val, "argmax": [float(best_pt.real), float(best_pt.imag)],
                      "gain": best_val - prev})
        ds /= 4
        dt /= 4

    if len(trace) > 1:
        gain = trace[-1]["gain"]
        converged = abs(gain) <= rel_tol * max(abs(best_val), 1e-300)
    else:
        converged = False
    cap_r = float(_level_to_radius(s_cap))
    boundary_limited = abs(best_pt) >= cap_r * (1 - 1e-12) and best_val > 0
    return SupSearchResult(
        sup=best_val,
        argmax=complex(best_pt),
        level_maxima=level_maxima,
        trace=trace,
        converged=bool(converged),
        boundary_limited=bool(boundary_limited),
        evaluations=int(sum(len(p) for p in all_pts)),
    )
