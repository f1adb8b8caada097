import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from harmonic_spaces.errors import ArgError, DivergenceSuspected
from harmonic_spaces.jets import Affine, Const, Div, Log, Neg, Pow, Z, const
from harmonic_spaces.quadrature import (
    CONVERGED, DIVERGENT, INCONCLUSIVE, WeightedIntegralSpec, bergman_equivalence_ratio, detect_focus,
    disk_rule, divergence_probe, integrate_disk, integrate_values,
)

PARSEVAL = math.pi * math.log(4 / 3)


@pytest.mark.parametrize("s", [0, 1, 2])
def test_weight_integrals(s):
    r = integrate_disk(lambda z: np.ones(z.shape), WeightedIntegralSpec(alpha=float(s)))
    assert r.value == pytest.approx(math.pi / (s + 1), rel=1e-6)
    assert r.verdict == CONVERGED and r.converged


def test_parseval_value():
    r = integrate_disk(lambda z: np.abs(0.5 / (1 - 0.5 * z)) ** 2)
    assert r.value == pytest.approx(PARSEVAL, rel=1e-10)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=11), st.sampled_from([0, 1, 2]))
def test_exact_for_polynomials_in_r2(coef, alpha):
    # int_D sum c_k |z|^(2k) (1-|z|^2)^alpha dA = pi sum c_k B(k+1, alpha+1)
    from scipy.special import beta
    G = lambda z: np.polynomial.polynomial.polyval(np.abs(z) ** 2, coef)
    exact = math.pi * sum(c * beta(k + 1, alpha + 1) for k, c in enumerate(coef))
    r = integrate_disk(G, WeightedIntegralSpec(alpha=float(alpha)), strict=False)
    assert abs(r.value - exact) <= 1e-10 * max(1.0, sum(abs(c) for c in coef))


def test_negative_weight_above_minus_one():
    r = integrate_disk(lambda z: np.ones(z.shape), WeightedIntegralSpec(alpha=-0.5), strict=False)
    assert r.value == pytest.approx(2 * math.pi, rel=1e-10)
    assert r.verdict in (CONVERGED, INCONCLUSIVE)


@given(st.floats(0, 2 * math.pi))
def test_rotation_invariance(delta):
    G = lambda z: np.abs(1 + 0.3 * z ** 3 + 0.2 * np.conj(z) ** 2) ** 2
    u = complex(math.cos(delta), math.sin(delta))
    a = integrate_disk(G).value
    b = integrate_disk(lambda z: G(z * u)).value
    assert abs(a - b) <= 1e-12 * a


def test_result_fields_and_partial_sums():
    r = integrate_disk(lambda z: np.abs(z) ** 2)
    assert r.value == r.ring_partial_sums[-1]
    assert np.allclose(np.cumsum(r.ring_contributions), r.ring_partial_sums)
    assert len(r.ring_contributions) == 14 + 2
    d = r.to_dict()
    assert set(d) >= {"value", "est_error", "ring_partial_sums", "converged", "verdict"}


@pytest.mark.parametrize("G", [
    lambda z: np.abs(0.5 / (1 - 0.5 * z)) ** 2,
    lambda z: np.abs(z) ** 4,
    lambda z: 1 / np.abs(1 - z) ** 0.5,
])
def test_est_error_not_increasing_under_ring_doubling(G):
    a = integrate_disk(G, WeightedIntegralSpec(rings=7), strict=False)
    b = integrate_disk(G, WeightedIntegralSpec(rings=14), strict=False)
    c = integrate_disk(G, WeightedIntegralSpec(rings=28), strict=False)
    assert b.est_error <= a.est_error and c.est_error <= b.est_error


def test_divergent_integral_raises_with_result():
    with pytest.raises(DivergenceSuspected) as exc:
        integrate_disk(lambda z: 1 / (1 - np.abs(z) ** 2) ** 1.5)
    assert exc.value.result.verdict == DIVERGENT
    r = integrate_disk(lambda z: 1 / (1 - np.abs(z) ** 2) ** 1.5, strict=False)
    assert r.verdict == DIVERGENT and not r.converged


def test_weight_exponent_validation():
    with pytest.raises(ArgError):
        WeightedIntegralSpec(alpha=-1)
    with pytest.raises(ArgError):
        WeightedIntegralSpec(rings=3)
    s = WeightedIntegralSpec().with_(rings=8)
    assert s.rings == 8 and s.to_dict()["rings"] == 8


def test_focus_detection_and_grading():
    G = lambda z: 1 / np.abs(1 - z) ** 1.5
    assert detect_focus(G, WeightedIntegralSpec()) == (0.0,)
    assert detect_focus(lambda z: np.ones(z.shape), WeightedIntegralSpec()) == ()
    # int_D |1 - z|^(-3/2) dA is finite; the graded rule resolves it, the uniform rule does not
    graded = integrate_disk(G, focus="auto", strict=False).value
    finer = integrate_disk(G, WeightedIntegralSpec(rings=20, panel_nodes=12), focus=[0.0], strict=False).value
    assert graded == pytest.approx(finer, rel=1e-3)


def test_integrate_values_matches_integrate_disk():
    spec = WeightedIntegralSpec(alpha=1.0)
    z, _, _ = disk_rule(spec)
    G = lambda z: np.abs(z + 0.2) ** 2
    assert integrate_values(G(z), spec).value == integrate_disk(G, spec).value
    with pytest.raises(ArgError):
        integrate_values(np.ones(3), spec)


# --- divergence probe -----------------------------------------------------------------------------


def test_probe_power_divergence():
    rep = divergence_probe(lambda z: np.ones(z.shape), -2.0)
    assert rep.verdict == DIVERGENT
    assert rep.growth_exponent == pytest.approx(1.0, abs=0.05)
    # truncations follow the closed form pi R^2 / (1 - R^2)
    for m, t in zip(rep.levels, rep.truncations):
        R = 1 - 2.0 ** (-m)
        assert t == pytest.approx(math.pi * R * R / (1 - R * R), rel=1e-8)


def test_probe_convergent():
    rep = divergence_probe(lambda z: np.ones(z.shape), 0.0)
    assert rep.verdict == "convergent"
    assert rep.limit == pytest.approx(math.pi, rel=1e-12)
    assert all(b > a for a, b in zip(rep.truncations, rep.truncations[1:]))


def test_probe_divergent_dilatation_family():
    # |(1-|z|^2) h''/h' - conj(z)|^2 with h' = 1/(1-z), weight -2
    G = lambda z: np.abs((1 - np.abs(z) ** 2) / (1 - z) - np.conj(z)) ** 2
    rep = divergence_probe(G, -2.0)
    assert rep.verdict == DIVERGENT
    assert all(b > a for a, b in zip(rep.truncations, rep.truncations[1:]))


def test_probe_needs_levels():
    with pytest.raises(ArgError):
        divergence_probe(lambda z: z.real, 0.0, levels=4)


# --- Bergman ratio ----------------------------------------------------------------------------------


def test_bergman_constant():
    r = bergman_equivalence_ratio(const(2.0), 2.0, 1.0)
    assert r.lhs == pytest.approx(4 * math.pi / 2, rel=1e-12)
    assert r.rhs == pytest.approx(4.0, rel=1e-12)
    assert r.ratio == pytest.approx(math.pi / 2, rel=1e-12)


def test_bergman_identity():
    r = bergman_equivalence_ratio(Z, 2.0, 0.0)
    assert r.lhs == pytest.approx(math.pi / 2, rel=1e-12)
    assert r.rhs == pytest.approx(math.pi / 3, rel=1e-12)
    assert r.ratio == pytest.approx(1.5, rel=1e-12)


def test_bergman_zero_function():
    r = bergman_equivalence_ratio(const(0.0), 2.0, 0.0)
    assert r.lhs == 0 and r.rhs == 0 and r.ratio is None and not r.defined


@pytest.mark.parametrize("h", [Neg(Log(Affine(1, -0.5))), Log(Affine(1, -1)), Pow(Z, 3.0),
                               Div(Const(1 + 0j), Affine(2, -1))])
def test_bergman_ratio_bounded_under_refinement(h):
    ratios = [bergman_equivalence_ratio(h, 2.0, 0.5, WeightedIntegralSpec(rings=k)).ratio for k in (4, 8, 16, 32)]
    assert max(ratios) / min(ratios) < 1.01
