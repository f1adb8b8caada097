"""Functionals addressable by name, with uniform JSON-ready reports.

``run(name, target, params, settings)`` returns
``{functional, params, value | sup, est_error, verdict, trace, ...}``.
Integral functionals also expose their integrand and weight exponent so a
truncation sweep can feed them to :func:`divergence_probe`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import functionals as fn
from .errors import ArgError
from .geometry import SupSearchConfig, SupSearchResult, schwarz_pick_margin, sup_search
from .harmonic import (
    HarmonicMap, jacobian, pre_schwarzian_norm, schwarzian, schwarzian_norm, sh_sphi_residual,
)
from .jets import Expr, derivative, evaluate
from .quadrature import (
    CONVERGED, DIVERGENT, IntegralResult, WeightedIntegralSpec, bergman_equivalence_ratio, disk_rule,
)

__all__ = ["Settings", "FunctionalDef", "FUNCTIONALS", "run", "integrand", "functional_names", "check_fact"]


@dataclass(frozen=True)
class Settings:
    """Numerical overrides shared by every functional."""

    rings: int | None = None
    angular: int | None = None
    cap: float | None = None
    tol: float | None = None

    def spec(self) -> WeightedIntegralSpec:
        kw = {}
        if self.rings is not None:
            kw["rings"] = int(self.rings)
        if self.angular is not None:
            kw["angular_nodes"] = int(self.angular)
        if self.tol is not None:
            kw["rel_tol"] = float(self.tol)
        return WeightedIntegralSpec(**kw)

    def search(self, base: SupSearchConfig | None = None) -> SupSearchConfig:
        d = (base or SupSearchConfig()).__dict__.copy()
        if self.angular is not None and base is None:
            d["angular"] = int(self.angular)
        if self.cap is not None:
            d["cap"] = float(self.cap)
        return SupSearchConfig(**d)

    def to_dict(self) -> dict:
        return {"rings": self.rings, "angular": self.angular, "cap": self.cap, "tol": self.tol}


@dataclass(frozen=True)
class FunctionalDef:
    name: str
    kind: str                         # integral | sup | trend | pointwise
    target: str                       # map | analytic | smooth | none
    required: tuple = ()
    optional: tuple = ()
    runner: Callable = field(default=None, repr=False, compare=False)
    integrand: Callable | None = field(default=None, repr=False, compare=False)
    description: str = ""


# --- report helpers ----------------------------------------------------------------------------


def _integral_report(r: IntegralResult) -> dict:
    return {
        "value": r.value, "est_error": r.est_error, "verdict": r.verdict,
        "trace": {"ring_contributions": r.ring_contributions, "ring_partial_sums": r.ring_partial_sums},
    }


def _sup_report(r: SupSearchResult, verdict: str | None = None) -> dict:
    gain = abs(r.trace[-1].get("gain", 0.0)) if r.trace else 0.0
    v = verdict or r.extra.get("verdict") or fn._sup_verdict(r)
    out = {
        "sup": r.sup, "est_error": gain, "verdict": v, "argmax": [r.argmax.real, r.argmax.imag],
        "boundary_limited": r.boundary_limited, "converged": r.converged,
        "trace": {"level_maxima": r.level_maxima, "refinement": r.trace, "evaluations": r.evaluations},
    }
    extra = {k: v for k, v in r.extra.items() if k != "verdict"}
    if extra:
        out["extra"] = extra
    return out


def _trend_report(t: fn.TrendReport) -> dict:
    return {"value": None, "est_error": None, "verdict": t.verdict,
            "trace": {"ks": t.ks, "thetas": t.thetas, "values": t.values, "monotone_tail": t.monotone_tail,
                      "decay_ratio": t.decay_ratio, **t.extra}}


def _value_report(v, verdict: str = CONVERGED, trace=None) -> dict:
    return {"value": v, "est_error": 0.0, "verdict": verdict, "trace": trace or {}}


# --- targets -------------------------------------------------------------------------------------


def _need_map(t) -> HarmonicMap:
    if not isinstance(t, HarmonicMap):
        raise ArgError("this functional needs a harmonic map")
    return t


def _need_analytic(t) -> Expr:
    if not isinstance(t, Expr):
        raise ArgError("this functional needs an analytic function h")
    return t


def _smooth(t):
    if isinstance(t, (HarmonicMap, Expr)):
        return t
    raise ArgError("this functional needs a harmonic map or an analytic function")


def _density(t, p) -> fn.CarlesonDensity:
    return fn.CarlesonDensity("schwarzian_p", p, _need_map(t))


def _grad_integrand(t, p):
    g = fn._grad_modulus(_smooth(t))
    return lambda z: g(z) ** p


def _a(params) -> complex:
    return complex(params.get("a", 0j))


def _probe_points(n: int = 4096) -> np.ndarray:
    rng = np.random.default_rng(20240601)
    r = np.sqrt(rng.uniform(0, 0.98 ** 2, n))
    return r * np.exp(2j * math.pi * rng.uniform(0, 1, n))


# --- table ----------------------------------------------------------------------------------------


def _def(name, kind, target, required=(), optional=(), integrand=None, description=""):
    def deco(f):
        FUNCTIONALS[name] = FunctionalDef(name, kind, target, tuple(required), tuple(optional), f, integrand,
                                          description)
        return f
    return deco


FUNCTIONALS: dict[str, FunctionalDef] = {}


@_def("bloch_seminorm_analytic", "sup", "analytic", description="sup (1-|z|^2)|h'|")
def _r_bloch_a(t, P, S):
    return _sup_report(fn.bloch_seminorm_analytic(_need_analytic(t), S.search()))


@_def("bloch_seminorm_smooth", "sup", "smooth", description="sup (1-|z|^2)(|F_z|+|F_zbar|)")
def _r_bloch_s(t, P, S):
    return _sup_report(fn.bloch_seminorm_smooth(_smooth(t), S.search()))


def _analytic_grad_integrand(t, P):
    dh = derivative(_need_analytic(t))
    return lambda z: np.abs(evaluate(dh, z)) ** P["p"]


@_def("besov_norm_analytic", "integral", "analytic", ("p",), integrand=_analytic_grad_integrand,
      description="int |h'|^p (1-|z|^2)^(p-2) dA")
def _r_besov_a(t, P, S):
    return _integral_report(fn.besov_norm_analytic(_need_analytic(t), P["p"], S.spec(), strict=False))


@_def("besov_seminorm_smooth", "integral", "smooth", ("p",), integrand=lambda t, P: _grad_integrand(t, P["p"]),
      description="int (|F_z|+|F_zbar|)^p (1-|z|^2)^(p-2) dA")
def _r_besov_s(t, P, S):
    return _integral_report(fn.besov_seminorm_smooth(_smooth(t), P["p"], S.spec(), strict=False))


@_def("qp_integral", "integral", "smooth", ("p",), ("a",), description="int |grad|^2 (1-|phi_a|^2)^p dA")
def _r_qp(t, P, S):
    return _integral_report(fn.qp_integral(_smooth(t), P["p"], _a(P), S.spec(), strict=False))


@_def("qp_norm", "sup", "smooth", ("p",), description="sup_a of qp_integral")
def _r_qp_norm(t, P, S):
    return _sup_report(fn.qp_norm(_smooth(t), P["p"], S.search(fn.A_SEARCH), S.spec()))


@_def("qp0_probe", "trend", "smooth", ("p",), description="qp_integral along a_k -> boundary")
def _r_qp0(t, P, S):
    return _trend_report(fn.qp0_probe(_smooth(t), P["p"], spec=S.spec()))


@_def("qp_nth_integral", "integral", "analytic", ("n", "p"), ("a",),
      description="int |h^(n)|^2 (1-|phi_a|^2)^p (1-|z|^2)^(2n-2) dA")
def _r_qpn(t, P, S):
    return _integral_report(fn.qp_nth_integral(_need_analytic(t), int(P["n"]), P["p"], _a(P), S.spec(),
                                               strict=False))


@_def("I_f", "integral", "map", ("p",), integrand=lambda t, P: (lambda z: np.abs(schwarzian(_need_map(t), z).S) ** P["p"]),
      description="int |S_f|^p (1-|z|^2)^(2p-2) dA")
def _r_if(t, P, S):
    return _integral_report(fn.I_f(_need_map(t), P["p"], S.spec(), strict=False))


@_def("I_h", "integral", "map", ("p",), integrand=lambda t, P: (lambda z: np.abs(schwarzian(_need_map(t), z).Sh) ** P["p"]),
      description="int |S_h|^p (1-|z|^2)^(2p-2) dA")
def _r_ih(t, P, S):
    return _integral_report(fn.I_h(_need_map(t), P["p"], S.spec(), strict=False))


@_def("carleson_a_integral", "integral", "map", ("p",), ("a",),
      description="int |phi_a'|^p |S_f|^2 (1-|z|^2)^(2+p) dA")
def _r_carl_a(t, P, S):
    return _integral_report(fn.carleson_a_integral(_density(t, P["p"]), _a(P), S.spec(), strict=False))


@_def("carleson_constant", "sup", "map", ("p",), description="box and automorphism routes")
def _r_carl(t, P, S):
    c = fn.carleson_constant(_density(t, P["p"]), S.search(fn.BOX_SEARCH), S.search(fn.A_SEARCH), S.spec())
    rep = _sup_report(c.route_a)
    rep["route_b"] = _sup_report(c.route_b)
    rep["ratio"] = c.ratio
    if c.route_b.extra.get("verdict") == DIVERGENT:
        rep["verdict"] = DIVERGENT
    return rep


@_def("vanishing_carleson_probe", "trend", "map", ("p",), description="Carleson integrals along a_k -> boundary")
def _r_vcarl(t, P, S):
    return _trend_report(fn.vanishing_carleson_probe(_density(t, P["p"]), spec=S.spec()))


@_def("beta2", "sup", "map", description="sup (1-|z|^2) J^(1/2)")
def _r_beta2(t, P, S):
    return _sup_report(fn.beta2(_need_map(t), S.search()))


@_def("bt0_probe", "trend", "map", description="level maxima of (1-|z|^2) J^(1/2)")
def _r_bt0(t, P, S):
    d = fn.bt0_probe(_need_map(t), S.search())
    return {"value": None, "est_error": None, "verdict": d["verdict"], "trace": d}


@_def("bt_p", "integral", "map", ("p",), integrand=lambda t, P: (lambda z: jacobian(_need_map(t), z) ** (P["p"] / 2)),
      description="int J^(p/2) (1-|z|^2)^(p-2) dA")
def _r_btp(t, P, S):
    return _integral_report(fn.bt_p(_need_map(t), P["p"], S.spec(), strict=False))


@_def("qt_p_integral", "integral", "map", ("p",), ("a",), description="int J (1-|phi_a|^2)^p dA")
def _r_qtpi(t, P, S):
    return _integral_report(fn.qt_p_integral(_need_map(t), P["p"], _a(P), S.spec(), strict=False))


@_def("qt_p", "sup", "map", ("p",), description="sup_a of qt_p_integral")
def _r_qtp(t, P, S):
    return _sup_report(fn.qt_p(_need_map(t), P["p"], S.search(fn.A_SEARCH), S.spec()))


@_def("schwarzian_norm", "sup", "map", description="sup (1-|z|^2)^2 |S_f|")
def _r_snorm(t, P, S):
    return _sup_report(schwarzian_norm(_need_map(t), S.search()))


@_def("pre_schwarzian_norm", "sup", "map", description="sup (1-|z|^2) |P_f|")
def _r_pnorm(t, P, S):
    return _sup_report(pre_schwarzian_norm(_need_map(t), S.search()))


@_def("dilatation_norm", "sup", "map", description="sup |w|")
def _r_wnorm(t, P, S):
    f = _need_map(t)
    return _sup_report(sup_search(lambda z: np.abs(evaluate(f.w, z)) * np.ones(np.shape(z)), S.search()),
                       CONVERGED)


@_def("nh_envelopes", "pointwise", "none", ("mu", "r"), description="envelopes of J^(1/2) at |z| = r")
def _r_nh(t, P, S):
    lo, hi = fn.nh_envelopes(P["mu"], P["r"])
    return _value_report([lo, hi])


@_def("sh_sphi_residual", "pointwise", "map", ("lambda",), description="max identity residual on sample points")
def _r_shphi(t, P, S):
    res = np.asarray(sh_sphi_residual(_need_map(t), P["lambda"], _probe_points(256)))
    return _value_report(float(np.max(res)))


@_def("schwarz_pick_min", "pointwise", "map", description="min Schwarz-Pick margin of w over quadrature nodes")
def _r_spick(t, P, S):
    z, _, _ = disk_rule(S.spec())
    m = float(np.min(schwarz_pick_margin(_need_map(t).w, z)))
    return _value_report(m, trace={"nodes": int(z.size)})


@_def("jacobian_min", "pointwise", "map", description="min Jacobian over sample points")
def _r_jmin(t, P, S):
    return _value_report(float(np.min(jacobian(_need_map(t), _probe_points()))))


@_def("h_prime_at", "pointwise", "map", ("z",), description="h'(z)")
def _r_hp(t, P, S):
    v = complex(evaluate(_need_map(t).h_prime, complex(P["z"])))
    return _value_report([v.real, v.imag] if v.imag else v.real)


@_def("bergman_ratio", "pointwise", "analytic", ("p", "alpha"), description="weighted Bergman lhs/rhs")
def _r_berg(t, P, S):
    r = bergman_equivalence_ratio(_need_analytic(t), P["p"], P["alpha"], S.spec())
    return _value_report(r.ratio, trace=r.to_dict())


def functional_names() -> list:
    return sorted(FUNCTIONALS)


def _check_params(d: FunctionalDef, params: dict) -> dict:
    missing = [k for k in d.required if params.get(k) is None]
    if missing:
        raise ArgError(f"functional {d.name!r} needs parameter(s) {', '.join(missing)}")
    known = set(d.required) | set(d.optional)
    return {k: v for k, v in params.items() if k in known and v is not None}


def run(name: str, target, params: dict | None = None, settings: Settings | None = None) -> dict:
    """Evaluate a named functional; returns a JSON-ready report."""
    if name not in FUNCTIONALS:
        raise ArgError(f"unknown functional {name!r}; choose from {', '.join(functional_names())}")
    d = FUNCTIONALS[name]
    used = _check_params(d, dict(params or {}))
    rep = d.runner(target, used, settings or Settings())
    return {"functional": name, "params": used, **rep}


def integrand(name: str, target, params: dict) -> tuple:
    """``(G, alpha)`` for integral functionals without an automorphism parameter."""
    d = FUNCTIONALS.get(name)
    if d is None or d.kind != "integral" or d.integrand is None:
        raise ArgError(f"functional {name!r} has no truncation integrand")
    used = _check_params(d, params)
    G = d.integrand(target, used)
    p = used["p"]
    alpha = 2 * p - 2 if name in ("I_f", "I_h") else p - 2
    return G, alpha


def _close(m, e, tol: float) -> bool:
    m, e = np.atleast_1d(np.asarray(m, dtype=float)), np.atleast_1d(np.asarray(e, dtype=float))
    return m.shape == e.shape and bool(np.all(np.abs(m - e) <= tol * np.maximum(1.0, np.abs(e))))


def check_fact(entry, fact, settings: Settings | None = None) -> tuple:
    """Evaluate one corpus fact; returns ``(passed, measured)``.

    ``value`` facts use a tolerance relative to ``max(1, |expected|)``;
    ``upper_bound`` allows a relative slack of ``tol``.  A ``flag`` fact reads
    the report field named by its ``key`` parameter, or else asks that the
    value is at least ``-tol``.
    """
    if settings is None:
        settings = Settings(**dict(fact.settings))
    params = fact.param_dict
    if fact.kind == "oracle_match":
        oracle = entry.oracle_dict[fact.expected]
        z = _probe_points(1000)
        got = jacobian(entry.obj, z) if fact.functional == "jacobian" else run(fact.functional, entry.obj, params,
                                                                               settings)["value"]
        ref = oracle(z)
        err = float(np.max(np.abs(got - ref) / np.maximum(1.0, np.abs(ref))))
        return err <= fact.tol, err
    key = params.pop("key", None)
    rep = run(fact.functional, entry.obj, params, settings)
    if fact.kind == "verdict":
        return rep["verdict"] == fact.expected, rep["verdict"]
    if key is not None:
        return rep[key] == fact.expected, rep[key]
    measured = rep["value"] if "value" in rep else rep.get("sup")
    if fact.kind == "value":
        return _close(measured, fact.expected, fact.tol), measured
    if fact.kind == "upper_bound":
        return measured <= fact.expected * (1 + fact.tol), measured
    if fact.kind == "interval":
        lo, hi = fact.expected
        return lo <= measured <= hi, measured
    if fact.kind == "flag":
        return (measured >= -fact.tol) == fact.expected, measured
    raise ArgError(f"unsupported fact kind {fact.kind!r}")
