"""Named test maps and analytic functions with their expected facts.

Each entry carries a list of :class:`Fact` records.  A fact names a
functional from :mod:`harmonic_spaces.registry`, its parameters, what kind of
expectation it is and where the expected value comes from (``provenance``):

* ``TRIVIAL``  - immediate from the definitions,
* ``DERIVED``  - computed by an independent oracle, named in ``oracle``,
* ``PAPER``    - a value stated in the source literature for this example.

Parametrised families are addressed as ``family:value``, e.g. ``shear_rho:0.5``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import beta as beta_fn

from .errors import ArgError, TailError
from .harmonic import HarmonicMap, shear
from .jets import Affine, Const, Expr, Log, Neg, Pow, Scale, Z

__all__ = [
    "Fact", "CorpusEntry", "corpus_list", "lookup", "parseval_oracle", "sec3_jacobian",
    "FAMILIES", "PROVENANCE",
]

PROVENANCE = ("PAPER", "TRIVIAL", "DERIVED")
KINDS = ("value", "verdict", "upper_bound", "interval", "flag", "oracle_match")


@dataclass(frozen=True)
class Fact:
    functional: str
    params: tuple            # sorted (name, value) pairs
    kind: str
    expected: object
    tol: float = 0.0
    provenance: str = "TRIVIAL"
    oracle: str | None = None
    slow: bool = False
    settings: tuple = ()     # numerical overrides, e.g. (("rings", 18),)

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise ArgError(f"unknown provenance tag {self.provenance!r}")
        if self.provenance == "DERIVED" and not self.oracle:
            raise ArgError("derived facts must name their oracle")
        if self.kind not in KINDS:
            raise ArgError(f"unknown fact kind {self.kind!r}")

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def to_dict(self) -> dict:
        return {
            "functional": self.functional, "params": {k: _plain(v) for k, v in self.params}, "kind": self.kind,
            "expected": self.expected, "tol": self.tol, "provenance": self.provenance,
            "oracle": self.oracle, "settings": dict(self.settings),
        }


def _plain(v):
    return [v.real, v.imag] if isinstance(v, complex) else v


def _fact(functional, kind, expected, tol=0.0, provenance="TRIVIAL", oracle=None, slow=False, settings=(),
          **params):
    return Fact(functional, tuple(sorted(params.items())), kind, expected, tol, provenance, oracle, slow,
                tuple(settings))


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    kind: str                # "map", "analytic" or "envelope"
    obj: HarmonicMap | Expr | None
    facts: tuple = ()
    description: str = ""
    params: tuple = ()
    oracles: tuple = ()      # (name, callable) pairs

    @property
    def oracle_dict(self) -> dict:
        return dict(self.oracles)

    def to_json(self) -> dict:
        if self.kind == "map":
            d = self.obj.to_json()
            d["label"] = self.name
            return d
        if self.kind == "analytic":
            return {"label": self.name, "analytic": self.obj.to_json()}
        return {"label": self.name, "envelope": dict(self.params)}

    def summary(self) -> dict:
        return {"name": self.name, "kind": self.kind, "description": self.description,
                "facts": [f.to_dict() for f in self.facts]}


# --- oracles --------------------------------------------------------------------------------


def sec3_jacobian(z):
    """Closed form ``(1-|z|^2)/|1-z|^3`` of the Jacobian of the ``sec3_example`` map."""
    z = np.asarray(z, dtype=complex)
    return (1 - np.abs(z) ** 2) / np.abs(1 - z) ** 3


def parseval_oracle(coeffs: Sequence[complex] | Callable[[int], complex], weight: float = 0.0,
                    ratio: float | None = None, tol: float = 1e-10, max_terms: int = 10_000_000) -> float:
    """``int_D |sum a_n z^n|^2 (1-|z|^2)^weight dA = pi sum |a_n|^2 B(n+1, weight+1)``.

    ``coeffs`` is either a finite sequence (summed exactly) or a callable
    ``n -> a_n``.  A callable needs ``ratio``: a bound ``q < 1`` with
    ``|a_{n+1}| <= q |a_n|``, which gives the geometric tail estimate used to
    stop once the remainder is below ``tol``.
    """
    if not weight > -1:
        raise ArgError("weight exponent must exceed -1")
    if not callable(coeffs):
        a = np.asarray(list(coeffs), dtype=complex)
        n = np.arange(a.size)
        return float(math.pi * np.sum(np.abs(a) ** 2 * beta_fn(n + 1, weight + 1)))
    if ratio is None:
        raise TailError("no tail bound supplied for an infinite coefficient sequence")
    if not 0 <= ratio < 1:
        raise TailError(f"coefficient ratio bound {ratio!r} does not give a convergent tail")
    total, n = 0.0, 0
    q2 = ratio * ratio
    while n < max_terms:
        an2 = abs(complex(coeffs(n))) ** 2
        term = math.pi * an2 * beta_fn(n + 1, weight + 1)
        total += term
        # remaining terms are at most term * q^2 / (1 - q^2) since B(n+1, .) decreases in n
        if term * q2 / (1 - q2) < tol and n > 0:
            return float(total)
        n += 1
    raise TailError("tail bound not reached within max_terms")


# --- entries ----------------------------------------------------------------------------------

_PI = math.pi


def _identity() -> CorpusEntry:
    f = HarmonicMap(Const(1 + 0j), Const(0j), label="identity")
    facts = (
        _fact("jacobian_min", "value", 1.0, 1e-14),
        _fact("I_f", "value", 0.0, 1e-14, p=2.0),
        _fact("beta2", "value", 1.0, 1e-12),
        _fact("bt_p", "value", _PI, 1e-8, "DERIVED", "polar_closed_form", p=2.0),
        _fact("qt_p_integral", "value", _PI / 3, 1e-8, "DERIVED", "polar_closed_form", p=2.0, a=0j),
        _fact("besov_seminorm_smooth", "value", 0.0, 1e-14, p=2.0),
        _fact("schwarzian_norm", "value", 0.0, 1e-14),
    )
    return CorpusEntry("identity", "map", f, facts, "f(z) = z")


def _mobius() -> CorpusEntry:
    # h = (z + 0.3) / (0.4 z + 1)
    hp = Scale(0.88, Pow(Affine(1.0, 0.4), -2.0))
    f = HarmonicMap(hp, Const(0j), label="mobius")
    facts = (
        _fact("schwarzian_norm", "value", 0.0, 1e-12),
        _fact("I_f", "value", 0.0, 1e-12, p=2.0),
    )
    return CorpusEntry("mobius", "map", f, facts, "h = (z + 0.3)/(0.4 z + 1), w = 0")


def _shear(rho: float) -> CorpusEntry:
    if not 0 < rho < 1:
        raise ArgError("shear_rho needs 0 < rho < 1")
    f = shear(Z, Scale(rho, Z), label=f"shear_rho:{rho:g}")
    # the last-ring criterion needs more rings as rho -> 1 (the integrand grows like 1/(1 - rho))
    rings = (("rings", 18),) if rho > 0.5 else ()
    facts = [
        _fact("h_prime_at", "value", 1 / (1 - rho / 2), 1e-14, "PAPER", z=0.5 + 0j),
        _fact("besov_seminorm_smooth", "verdict", "converged-finite", 0.0, "DERIVED", "ring_doubling",
              settings=rings, p=2.0),
        _fact("I_f", "verdict", "converged-finite", 0.0, "DERIVED", "ring_doubling", p=2.0),
        _fact("schwarz_pick_min", "flag", True, 1e-12, "TRIVIAL"),
    ]
    if rho == 0.5:
        facts.append(_fact("vanishing_carleson_probe", "verdict", "vanishing", 0.0, "DERIVED",
                           "monotone_decay", slow=True, p=0.5))
    return CorpusEntry(f"shear_rho:{rho:g}", "map", f, tuple(facts),
                       "shear of phi(z) = z with dilatation w = rho z; h' = 1/(1 - rho z)",
                       (("rho", rho),))


def _remark3() -> CorpusEntry:
    f = HarmonicMap(Pow(Affine(1.0, -1.0), -0.5), Z, label="remark3")
    facts = (
        _fact("besov_seminorm_smooth", "verdict", "divergent-suspect", 0.0, "DERIVED", "divergence_probe",
              p=2.0),
    )
    return CorpusEntry("remark3", "map", f, facts, "h' = (1 - z)^(-1/2), w = z")


def _sec3() -> CorpusEntry:
    f = HarmonicMap(Pow(Affine(1.0, -1.0), -1.5), Z, label="sec3_example")
    b = 2 ** 1.5
    facts = (
        _fact("jacobian", "oracle_match", "jacobian", 1e-12, "PAPER"),
        _fact("beta2", "interval", [b - 0.03, b], 0.0, "PAPER"),
        _fact("beta2", "flag", True, 0.0, "PAPER", key="boundary_limited"),
        _fact("bt0_probe", "verdict", "not-vanishing", 0.0, "PAPER"),
        _fact("bt_p", "verdict", "divergent-suspect", 0.0, "DERIVED", "divergence_probe", p=2.0),
        _fact("qt_p", "upper_bound", 8 * _PI, 0.02, "DERIVED", "bound_display", slow=True, p=2.0),
        _fact("qt_p", "upper_bound", 4 * _PI, 0.02, "DERIVED", "bound_display", slow=True, p=3.0),
    )
    return CorpusEntry("sec3_example", "map", f, facts, "h = 2 (1 - z)^(-1/2), w = z",
                       oracles=(("jacobian", sec3_jacobian),))


def _nh(mu: float) -> CorpusEntry:
    if not 0 < mu <= 1:
        raise ArgError("nh_envelope needs 0 < mu <= 1")
    facts = [_fact("nh_envelopes", "value", [1.0, 1.0], 1e-14, "TRIVIAL", mu=mu, r=0.0)]
    if mu == 1:
        facts.append(_fact("nh_envelopes", "value", [0.75, 4 / 3], 1e-14, "DERIVED", "direct_substitution",
                           mu=1.0, r=0.5))
    return CorpusEntry(f"nh_envelope:{mu:g}", "envelope", None, tuple(facts),
                       "envelope functions for J^(1/2) only, no map", (("mu", mu),))


def _poly(n: int) -> CorpusEntry:
    h = Pow(Z, float(n))
    facts = [
        _fact("qp0_probe", "verdict", "vanishing", 0.0, "DERIVED", "monotone_decay", p=1.0),
        _fact("qp_integral", "value", parseval_oracle([0.0] * (n - 1) + [float(n)], 1.0), 1e-8, "DERIVED", "parseval",
              p=1.0, a=0j),
    ]
    if n == 2:
        facts.append(_fact("qp_nth_integral", "value", _PI, 1e-8, "DERIVED", "polar_closed_form",
                           p=1.0, n=2, a=0j))
    return CorpusEntry(f"poly_z{n}", "analytic", h, tuple(facts), f"h = z^{n}")


def _log_rho(rho: float) -> CorpusEntry:
    if not 0 < rho < 1:
        raise ArgError("log_rho needs 0 < rho < 1")
    h = Neg(Log(Affine(1.0, -rho)))
    expected = parseval_oracle(lambda n: rho ** (n + 1), 0.0, ratio=rho)
    facts = (
        _fact("besov_norm_analytic", "value", expected, 1e-6, "DERIVED", "parseval", p=2.0),
    )
    return CorpusEntry(f"log_rho:{rho:g}", "analytic", h, facts,
                       "h = -log(1 - rho z), the log-derivative primitive of the shear h'", (("rho", rho),))


def _log_one_minus_z() -> CorpusEntry:
    h = Log(Affine(1.0, -1.0))
    facts = (
        _fact("bloch_seminorm_analytic", "value", 2.0, 1e-3, "DERIVED", "closed_form_max"),
        _fact("besov_norm_analytic", "verdict", "divergent-suspect", 0.0, "DERIVED", "parseval", p=2.0),
    )
    return CorpusEntry("log_one_minus_z", "analytic", h, facts, "h = log(1 - z)")


def _dilatation(rho: float) -> CorpusEntry:
    if not 0 < rho < 1:
        raise ArgError("dilatation_rho needs 0 < rho < 1")
    h = Scale(rho, Z)
    facts = (
        _fact("qp0_probe", "verdict", "vanishing", 0.0, "DERIVED", "monotone_decay", p=0.5),
        _fact("qp_integral", "value", rho * rho * _PI / 2, 1e-8, "DERIVED", "polar_closed_form",
              p=1.0, a=0j),
    )
    return CorpusEntry(f"dilatation_rho:{rho:g}", "analytic", h, facts, "h = rho z, a dilatation", (("rho", rho),))


FAMILIES: dict[str, Callable[[float], CorpusEntry]] = {
    "shear_rho": _shear,
    "nh_envelope": _nh,
    "log_rho": _log_rho,
    "dilatation_rho": _dilatation,
}

_FIXED: dict[str, Callable[[], CorpusEntry]] = {
    "identity": _identity,
    "mobius": _mobius,
    "remark3": _remark3,
    "sec3_example": _sec3,
    "poly_z2": lambda: _poly(2),
    "poly_z3": lambda: _poly(3),
    "log_one_minus_z": _log_one_minus_z,
}

_LISTED = (
    "identity", "mobius", "shear_rho:0.25", "shear_rho:0.5", "shear_rho:0.75", "remark3", "sec3_example",
    "nh_envelope:0.25", "nh_envelope:0.5", "nh_envelope:0.75", "nh_envelope:1", "poly_z2", "poly_z3",
    "log_rho:0.5", "log_one_minus_z", "dilatation_rho:0.5",
)


def lookup(name: str) -> CorpusEntry:
    """Entry by name; families take a numeric suffix, ``shear_rho:0.5``."""
    if name in _FIXED:
        return _FIXED[name]()
    fam, sep, val = name.partition(":")
    if sep and fam in FAMILIES:
        try:
            x = float(val)
        except ValueError:
            raise ArgError(f"bad parameter in corpus name {name!r}") from None
        return FAMILIES[fam](x)
    raise ArgError(f"unknown corpus entry {name!r}")


def corpus_list(names: Iterable[str] | None = None) -> list:
    return [lookup(n) for n in (names or _LISTED)]
