import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from harmonic_spaces.errors import ArgError, InternalMismatch, NotSensePreserving, SingularityError
from harmonic_spaces.geometry import phi, phi_prime
from harmonic_spaces.harmonic import (
    HarmonicMap, affine_combination, analytic_schwarzian, compose_automorphism, dilatation, jacobian,
    lambda_combination, lambda_log_derivative, map_from_json, map_value, pre_schwarzian, pre_schwarzian_norm,
    schwarzian, schwarzian_norm, schwarzian_route_gap, sh_sphi_residual, shear,
)
from harmonic_spaces.jets import Affine, Const, Div, Pow, Scale, Z, const, evaluate

from conftest import disk_points

IDENT = HarmonicMap(Const(1 + 0j))
SEC3 = HarmonicMap(Pow(Affine(1, -1), -1.5), Z)
SEC3_ANALYTIC = HarmonicMap(Pow(Affine(1, -1), -1.5))
MOB = HarmonicMap(Scale(0.88, Pow(Affine(1, 0.4), -2.0)))
SHEAR = shear(Z, Scale(0.5, Z))
disk = st.builds(lambda r, t: r * complex(math.cos(t), math.sin(t)), st.floats(0, 0.98), st.floats(0, 2 * math.pi))


def test_jacobian_examples():
    assert jacobian(IDENT, 0.3j) == 1.0
    assert jacobian(SEC3, -0.5) == pytest.approx(0.75 / 1.5 ** 3, rel=1e-14)
    assert jacobian(SEC3, 0.0) == pytest.approx(1.0)


def test_jacobian_rejects_non_sense_preserving():
    with pytest.raises(NotSensePreserving):
        jacobian(HarmonicMap(const(1), Scale(2.0, Z)), 0.6)


def test_example_map_closed_form(rng):
    z = disk_points(rng, 1000, 0.99)
    assert np.allclose(jacobian(SEC3, z), (1 - np.abs(z) ** 2) / np.abs(1 - z) ** 3, rtol=1e-12)


def test_pre_schwarzian_examples():
    f = HarmonicMap(Div(const(1), Affine(1, -0.5)))
    assert pre_schwarzian(f, 0.0) == pytest.approx(0.5)
    assert pre_schwarzian(SHEAR, 0.0) == pytest.approx(0.5)
    assert pre_schwarzian(IDENT, 0.2) == 0


def test_schwarzian_examples(rng):
    z = disk_points(rng, 50)
    assert np.max(np.abs(schwarzian(MOB, z).S)) <= 1e-12
    assert schwarzian(SEC3_ANALYTIC, 0.0).S == pytest.approx(3 / 8, rel=1e-14)
    assert schwarzian(SHEAR, 0.0).S == pytest.approx(0.125, rel=1e-14)
    v = schwarzian(SHEAR, 0.0)
    assert v.P == pytest.approx(0.5) and v.Fzz == pytest.approx(0.25)


@given(disk)
def test_schwarzian_reduces_to_analytic_when_w_vanishes(z):
    v = schwarzian(SEC3_ANALYTIC, z)
    assert abs(v.S - v.Sh) <= 1e-12 * max(1, abs(v.Sh))
    assert v.Sh == pytest.approx(0.375 / (1 - z) ** 2, rel=1e-12)


@given(disk)
def test_schwarzian_identity_between_fields(z):
    v = schwarzian(SEC3, z)
    assert abs(v.S - (v.Fzz - v.P ** 2 / 2)) <= 1e-12 * (abs(v.Fzz) + abs(v.P) ** 2 + 1)


@pytest.mark.parametrize("f", [SEC3, SHEAR, HarmonicMap(Pow(Affine(1, -1), -0.5), Z),
                               HarmonicMap(Div(const(1), Affine(1, 0.3j)), Scale(0.4, Pow(Z, 2.0)))])
def test_routes_agree(f, rng):
    assert np.max(schwarzian_route_gap(f, disk_points(rng, 300, 0.97))) <= 1e-10


def test_route_mismatch_is_reported(rng):
    with pytest.raises(InternalMismatch):
        schwarzian(SEC3, disk_points(rng, 10), rtol=-1.0)


@given(disk, st.sampled_from([0.0, 0.3 + 0.4j, -0.6j]))
def test_moebius_covariance_of_analytic_schwarzian(z, a):
    hp = Pow(Affine(1, -1), -1.5)
    if abs(phi(a, z)) > 0.98:
        return
    f = compose_automorphism(HarmonicMap(hp), a)
    lhs = analytic_schwarzian(f.h_prime, z)
    s = phi(a, z)
    rhs = analytic_schwarzian(hp, s) * phi_prime(a, z) ** 2
    assert abs(lhs - rhs) <= 1e-9 * max(1, abs(rhs))


def test_norms():
    assert schwarzian_norm(IDENT).sup == 0
    assert schwarzian_norm(MOB).sup <= 1e-12
    r = schwarzian_norm(SEC3_ANALYTIC)
    assert r.sup == pytest.approx(1.5, abs=1e-3) and r.sup <= 1.5 and r.boundary_limited
    assert pre_schwarzian_norm(IDENT).sup == 0
    r = pre_schwarzian_norm(HarmonicMap(Div(const(1), Affine(1, -1))))
    assert r.sup == pytest.approx(2, abs=1e-3) and r.boundary_limited
    r = pre_schwarzian_norm(SHEAR)
    assert math.isfinite(r.sup) and len(r.trace) == 4
    assert all(b["sup"] >= a["sup"] for a, b in zip(r.trace, r.trace[1:]))


def test_shear_examples(rng):
    z = disk_points(rng, 30)
    assert np.allclose(evaluate(SHEAR.h_prime, z), 1 / (1 - z / 2), rtol=1e-15)
    assert np.allclose(evaluate(SHEAR.g_prime, z), 0.5 * z / (1 - z / 2), rtol=1e-14)
    assert np.allclose(evaluate(shear(Z, Const(0j)).h_prime, z), 1)
    with pytest.raises(SingularityError):
        shear(Z, Const(1 + 0j))
    with pytest.raises(NotSensePreserving):
        shear(Z, Scale(2.0, Z))


def test_lambda_combination_examples(rng):
    z = disk_points(rng, 30)
    assert np.allclose(evaluate(lambda_combination(IDENT, 1j), z), 1)
    assert np.allclose(evaluate(lambda_combination(SHEAR, -1), z), 1, rtol=1e-14)
    assert np.allclose(evaluate(lambda_combination(SHEAR, 1), z), (1 + z / 2) / (1 - z / 2), rtol=1e-14)
    with pytest.raises(ArgError):
        lambda_combination(SHEAR, 0.5)


def test_lambda_log_derivative(rng):
    z = disk_points(rng, 20)
    L = lambda_log_derivative(SHEAR, 1, z)
    assert np.allclose(L, 0.5 / (1 + z / 2) + 0.5 / (1 - z / 2), rtol=1e-13)


def test_sh_sphi_examples(rng):
    z = disk_points(rng, 50, 0.95)
    assert np.max(sh_sphi_residual(HarmonicMap(Pow(Affine(1, -1), -1.5)), 1j, z)) == 0
    assert sh_sphi_residual(SHEAR, 1, 0.3) <= 1e-10
    for lam in (1, 1j, -1, np.exp(0.7j)):
        for f in (SHEAR, SEC3, HarmonicMap(Pow(Affine(1, -1), -0.5), Z)):
            assert np.max(sh_sphi_residual(f, lam, z)) <= 1e-9


def test_map_value_examples(rng):
    z = disk_points(rng, 20)
    assert np.allclose(map_value(IDENT, z), z, atol=1e-15)
    h = -2 * math.log(0.75)
    assert map_value(SHEAR, 0.5) == pytest.approx(h + np.conj(h - 0.5), rel=1e-13)
    assert map_value(SEC3, 0.0) == 0


@given(disk, st.complex_numbers(max_magnitude=0.9))
def test_compose_automorphism_jacobian(z, a):
    if abs(a) >= 0.9:
        return
    g = compose_automorphism(SHEAR, a)
    s = phi(a, z)
    assert jacobian(g, z) == pytest.approx(jacobian(SHEAR, s) * abs(phi_prime(a, z)) ** 2, rel=1e-10)


@given(disk)
def test_affine_combination_jacobian(z):
    for a, b in ((2.0, 0.5), (1 + 1j, 0.3 - 0.2j)):
        g = affine_combination(SHEAR, a, b)
        assert jacobian(g, z) == pytest.approx((abs(a) ** 2 - abs(b) ** 2) * jacobian(SHEAR, z), rel=1e-12)
    with pytest.raises(ArgError):
        affine_combination(SHEAR, 0.5, 1.0)


def test_map_json_round_trip():
    d = SEC3.to_json()
    f = map_from_json(d)
    assert f.to_json() == d
    g = map_from_json({"shear": {"phi": Z.to_json(), "w": Scale(0.5, Z).to_json()}})
    assert evaluate(g.h_prime, 0.3) == pytest.approx(1 / 0.85)
    with pytest.raises(ArgError):
        map_from_json({"nothing": 1})


def test_dilatation_value():
    assert dilatation(SHEAR, 0.4) == pytest.approx(0.2)
