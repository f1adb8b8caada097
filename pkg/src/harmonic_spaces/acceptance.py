"""The acceptance suite: fifteen numbered criteria with overridable tolerances.

Each criterion returns a :class:`CriterionResult` with the measured
quantity next to its threshold.  ``run_suite(ids, overrides)`` runs a subset
and replaces any tolerance by id, which is how a tampered tolerance is shown
to make the named criterion fail.
"""

from __future__ import annotations

import contextlib
import io
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .corpus import corpus_list, lookup
from .errors import ArgError, DivergenceSuspected
from .functionals import (
    CarlesonDensity, besov_seminorm_smooth, beta2, bt0_probe, bt_p, distortion_check, I_f, nh_envelopes, qt_p,
    vanishing_carleson_probe,
)
from .geometry import schwarz_pick_margin
from .harmonic import (
    HarmonicMap, affine_combination, compose_automorphism, schwarzian, schwarzian_route_gap, sh_sphi_residual,
)
from .jets import Const, eval_jet, finite_difference_jet
from .quadrature import (
    DIVERGENT, WeightedIntegralSpec, bergman_equivalence_ratio, disk_rule, divergence_probe, integrate_disk,
)

__all__ = ["CriterionResult", "CRITERIA", "DEFAULT_TOLERANCES", "run_suite", "run_criterion"]

DEFAULT_TOLERANCES = {
    "C1": 1e-6,     # jet relative error
    "C2": 1e-12,    # S_f vs S_h, Moebius S
    "C3": 1e-10,    # route gap
    "C4": 1e-9,     # S_h / S_phi identity residual
    "C5": 1e-6,     # weight integrals (relative); Parseval uses 0.5 %
    "C6": 0.03,     # beta2 window below 2^(3/2)
    "C7": 0.02,     # relative slack on 8 pi / (p - 1)
    "C8": 10.0,     # truncation growth factor m = 4 -> 14
    "C9": 0.01,     # automorphism invariance (relative); affine uses 1e-10
    "C10": 1e-9,    # distortion margin floor (negated)
    "C11": 1e-12,   # Schwarz-Pick margin floor (negated)
    "C12": 0.01,    # allowed relative spread of the Bergman ratio
    "C13": 0.005,   # ring-doubling stability
    "C14": 0.0,     # envelope ordering slack
    "C15": 0.0,     # byte differences allowed
}

_SEED = 20240601


@dataclass
class CriterionResult:
    id: str
    title: str
    passed: bool
    measured: object
    threshold: object
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{self.id:4s} {'PASS' if self.passed else 'FAIL'}  {self.title}: measured={_fmt(self.measured)} " \
               f"threshold={_fmt(self.threshold)}"

    def to_dict(self) -> dict:
        return {"id": self.id, "title": self.title, "passed": self.passed, "measured": self.measured,
                "threshold": self.threshold, "detail": self.detail}


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    return str(x)


def _disk_points(n: int, rmax: float, seed: int = _SEED) -> np.ndarray:
    rng = np.random.default_rng(seed)
    r = rmax * np.sqrt(rng.uniform(0, 1, n))
    return r * np.exp(2j * math.pi * rng.uniform(0, 1, n))


def _maps() -> list:
    return [e for e in corpus_list() if e.kind == "map"]


def _expressions() -> list:
    out = []
    for e in corpus_list():
        if e.kind == "map":
            out += [(e.name + ".h'", e.obj.h_prime), (e.name + ".w", e.obj.w)]
        elif e.kind == "analytic":
            out.append((e.name, e.obj))
    return out


# --- criteria -------------------------------------------------------------------------------------


def c1(tol: float) -> CriterionResult:
    z = _disk_points(100, 0.9)
    worst, where = 0.0, ""
    for name, ex in _expressions():
        J = eval_jet(ex, z)
        F = finite_difference_jet(ex, z)
        exact = np.stack([np.asarray(c) * np.ones_like(z) for c in J.components()])
        approx = np.stack([np.asarray(c) * np.ones_like(z) for c in F.components()])
        # per point, relative to the largest jet component there
        scale = np.maximum(np.max(np.abs(exact), axis=0), 1e-300)
        err = float(np.max(np.abs(exact - approx) / scale))
        if err > worst:
            worst, where = err, name
    return CriterionResult("C1", "jet vs contour finite differences", worst <= tol, worst, tol,
                           {"worst_expression": where, "points": 100})


def c2(tol: float) -> CriterionResult:
    z = _disk_points(200, 0.95)
    gaps = {}
    for e in _maps():
        f0 = HarmonicMap(e.obj.h_prime, Const(0j))
        s = schwarzian(f0, z)
        gaps[e.name] = float(np.max(np.abs(np.asarray(s.S) - np.asarray(s.Sh))))
    mob = lookup("mobius").obj
    s_mob = float(np.max(np.abs(schwarzian(mob, z).S)))
    worst = max(max(gaps.values()), s_mob)
    return CriterionResult("C2", "w = 0 gives S_f = S_h; Moebius gives S = 0", worst <= tol, worst, tol,
                           {"w0_gaps": gaps, "mobius_max_S": s_mob})


def c3(tol: float) -> CriterionResult:
    z = _disk_points(500, 0.97)
    gaps = {e.name: float(np.max(schwarzian_route_gap(e.obj, z))) for e in _maps()}
    worst = max(gaps.values())
    return CriterionResult("C3", "two Schwarzian routes agree", worst <= tol, worst, tol, {"gaps": gaps})


def c4(tol: float) -> CriterionResult:
    z = _disk_points(50, 0.95)
    res = {}
    for name in ("shear_rho:0.25", "shear_rho:0.5", "shear_rho:0.75"):
        f = lookup(name).obj
        for lam in (1, 1j, -1):
            res[f"{name} lambda={lam}"] = float(np.max(sh_sphi_residual(f, lam, z)))
    worst = max(res.values())
    return CriterionResult("C4", "S_h vs S_phi identity residual", worst <= tol, worst, tol, {"residuals": res})


def c5(tol: float) -> CriterionResult:
    errs = {}
    for s in (0, 1, 2):
        r = integrate_disk(lambda z: np.ones(z.shape), WeightedIntegralSpec(alpha=float(s)))
        errs[f"s={s}"] = abs(r.value - math.pi / (s + 1)) / (math.pi / (s + 1))
    rho = 0.5
    r = integrate_disk(lambda z: np.abs(rho / (1 - rho * z)) ** 2, WeightedIntegralSpec())
    exact = math.pi * math.log(4 / 3)
    parseval_err = abs(r.value - exact) / exact
    worst = max(errs.values())
    ok = worst <= tol and parseval_err <= 0.005
    return CriterionResult("C5", "quadrature oracles", ok, [worst, parseval_err], [tol, 0.005],
                           {"weights": errs, "parseval_value": r.value, "parseval_exact": exact})


def c6(tol: float) -> CriterionResult:
    f = lookup("sec3_example").obj
    b = beta2(f)
    trend = bt0_probe(f)
    lo, hi = 2 ** 1.5 - tol, 2 ** 1.5
    ok = lo <= b.sup <= hi and b.boundary_limited and trend["verdict"] == "not-vanishing"
    return CriterionResult("C6", "beta2 of the sec3 map", ok, b.sup, [lo, hi],
                           {"boundary_limited": b.boundary_limited, "bt0_verdict": trend["verdict"],
                            "level_maxima": trend["level_maxima"][-4:]})


def c7(tol: float) -> CriterionResult:
    f = lookup("sec3_example").obj
    vals, bounds = [], []
    for p in (2.0, 3.0):
        vals.append(qt_p(f, p).sup)
        bounds.append(8 * math.pi / (p - 1) * (1 + tol))
    ok = all(v <= b for v, b in zip(vals, bounds))
    return CriterionResult("C7", "QT_p bound on the sec3 map", ok, vals, bounds)


def c8(tol: float) -> CriterionResult:
    f = lookup("remark3").obj
    try:
        r = besov_seminorm_smooth(f, 2.0, strict=False)
        verdict = r.verdict
    except DivergenceSuspected:
        verdict = DIVERGENT
    from .functionals import SmoothLogJacobian
    g = SmoothLogJacobian(f)
    rep = divergence_probe(lambda z: g.grad_sum(z) ** 2, 0.0, levels=14)
    growth = rep.truncations[-1] / rep.truncations[0]
    ok = verdict == DIVERGENT and growth >= tol
    return CriterionResult("C8", "remark3 Besov divergence", ok, growth, tol,
                           {"verdict": verdict, "truncations": rep.truncations})


def c9(tol: float) -> CriterionResult:
    f = lookup("shear_rho:0.5").obj
    rng = np.random.default_rng(_SEED)
    avals = [0.6 * math.sqrt(rng.uniform()) * complex(math.cos(t), math.sin(t))
             for t in rng.uniform(0, 2 * math.pi, 5)]
    spec = WeightedIntegralSpec()
    p = 2.0
    base_bt = bt_p(f, p, spec).value
    base_qt = qt_p(f, p).sup
    rel = []
    for a in avals:
        g = compose_automorphism(f, a)
        rel.append(abs(bt_p(g, p, spec).value - base_bt) / base_bt)
        rel.append(abs(qt_p(g, p).sup - base_qt) / base_qt)
    worst = max(rel)
    aff = []
    for a, b in ((2.0, 0.5), (1 + 1j, 0.3 - 0.2j), (0.7j, 0.1)):
        for pp in (2.0, 3.0):
            lhs = bt_p(affine_combination(f, a, b), pp, spec).value
            rhs = (abs(a) ** 2 - abs(b) ** 2) ** (pp / 2) * bt_p(f, pp, spec).value
            aff.append(abs(lhs - rhs) / abs(rhs))
    worst_aff = max(aff)
    ok = worst <= tol and worst_aff <= 1e-10
    return CriterionResult("C9", "automorphism and affine invariance", ok, [worst, worst_aff], [tol, 1e-10],
                           {"a": [[a.real, a.imag] for a in avals]})


def c10(tol: float) -> CriterionResult:
    rng = np.random.default_rng(_SEED)
    worst = math.inf
    for name in ("shear_rho:0.25", "shear_rho:0.5"):
        f = lookup(name).obj
        z1 = _disk_points(100, 0.95, seed=int(rng.integers(1 << 30)))
        z2 = _disk_points(100, 0.95, seed=int(rng.integers(1 << 30)))
        m = distortion_check(f, list(zip(z1, z2)))
        worst = min(worst, min(m))
    return CriterionResult("C10", "distortion margins", worst >= -tol, worst, -tol)


def c11(tol: float) -> CriterionResult:
    z, _, _ = disk_rule(WeightedIntegralSpec())
    worst, margins = math.inf, {}
    for e in corpus_list():
        if e.kind == "map":
            w = e.obj.w
        elif e.kind == "analytic" and e.name.startswith("dilatation"):
            w = e.obj
        else:
            continue
        m = float(np.min(schwarz_pick_margin(w, z)))
        margins[e.name] = m
        worst = min(worst, m)
    return CriterionResult("C11", "Schwarz-Pick margins", worst >= -tol, worst, -tol, {"margins": margins})


_BERGMAN = ("poly_z2", "poly_z3", "log_rho:0.5", "log_one_minus_z", "dilatation_rho:0.5")


def c12(tol: float) -> CriterionResult:
    spreads, intervals = {}, {}
    for name in _BERGMAN:
        h = lookup(name).obj
        ratios = [bergman_equivalence_ratio(h, 2.0, 0.0, WeightedIntegralSpec(rings=k)).ratio
                  for k in (4, 8, 16, 32)]
        intervals[name] = [min(ratios), max(ratios)]
        spreads[name] = max(ratios) / min(ratios) - 1
    worst = max(spreads.values())
    return CriterionResult("C12", "Bergman ratio under ring doubling", worst <= tol, worst, tol,
                           {"intervals": intervals})


def c13(tol: float) -> CriterionResult:
    f = lookup("shear_rho:0.5").obj
    drift = {}
    verdicts = {}
    for name, fn in (("besov", lambda s: besov_seminorm_smooth(f, 2.0, s)), ("I_f", lambda s: I_f(f, 2.0, s))):
        r1, r2 = fn(WeightedIntegralSpec(rings=14)), fn(WeightedIntegralSpec(rings=28))
        verdicts[name] = [r1.verdict, r2.verdict]
        drift[name] = abs(r2.value - r1.value) / abs(r1.value)
    rep = vanishing_carleson_probe(CarlesonDensity("schwarzian_p", 0.5, f))
    ok = (all(v == ["converged-finite"] * 2 for v in verdicts.values()) and max(drift.values()) <= tol
          and all(rep.monotone_tail))
    return CriterionResult("C13", "shear map: finite Besov, I_f, vanishing Carleson", ok, max(drift.values()), tol,
                           {"verdicts": verdicts, "monotone_tail": rep.monotone_tail,
                            "carleson_verdict": rep.verdict})


def c14(tol: float) -> CriterionResult:
    rs = np.linspace(0, 0.99, 100)
    worst, at0 = math.inf, 0.0
    for mu in (0.25, 0.5, 0.75, 1.0):
        for r in rs:
            lo, hi = nh_envelopes(mu, float(r))
            worst = min(worst, hi - lo)
        lo, hi = nh_envelopes(mu, 0.0)
        at0 = max(at0, abs(lo - 1), abs(hi - 1))
    ok = worst >= -tol and at0 <= 1e-15
    return CriterionResult("C14", "NH envelopes ordered, equal 1 at 0", ok, worst, -tol, {"max_dev_at_0": at0})


def c15(tol: float) -> CriterionResult:
    from .cli import main

    argv = ["eval", "--corpus", "sec3_example", "--functional", "beta2"]
    blobs = []
    with tempfile.TemporaryDirectory() as d:
        for i in range(3):
            out = os.path.join(d, f"r{i}.json")
            with contextlib.redirect_stdout(io.StringIO()):
                main(argv + ["--out", out])
            with open(out, "rb") as fh:
                blobs.append(fh.read())
    diff = sum(b != blobs[0] for b in blobs[1:])
    return CriterionResult("C15", "eval reports are byte-identical", diff <= tol, diff, tol,
                           {"bytes": len(blobs[0])})


CRITERIA: dict[str, Callable[[float], CriterionResult]] = {
    "C1": c1, "C2": c2, "C3": c3, "C4": c4, "C5": c5, "C6": c6, "C7": c7, "C8": c8, "C9": c9, "C10": c10,
    "C11": c11, "C12": c12, "C13": c13, "C14": c14, "C15": c15,
}


def run_criterion(cid: str, tol: float | None = None) -> CriterionResult:
    if cid not in CRITERIA:
        raise ArgError(f"unknown criterion {cid!r}")
    t = DEFAULT_TOLERANCES[cid] if tol is None else tol
    try:
        return CRITERIA[cid](t)
    except Exception as exc:  # a crash is a failure of that criterion, reported by id
        return CriterionResult(cid, "error", False, repr(exc), t)


def run_suite(ids=None, overrides: dict | None = None) -> list:
    overrides = overrides or {}
    unknown = sorted(set(overrides) - set(CRITERIA))
    if unknown:
        raise ArgError(f"unknown criterion id(s) in overrides: {', '.join(unknown)}")
    return [run_criterion(c, overrides.get(c)) for c in (ids or list(CRITERIA))]
