import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from harmonic_spaces.errors import ArgError, DomainError, NotSelfMap
from harmonic_spaces.geometry import (
    CarlesonBox, SupSearchConfig, box_region, hyperbolic_distance, invariance_identity_residual,
    one_minus_phi_sq, phi, phi_prime, pseudo_hyperbolic_distance, schwarz_pick_margin, sup_search,
)
from harmonic_spaces.jets import Pow, Scale, Z

from conftest import disk_points

disk = st.builds(lambda r, t: r * complex(math.cos(t), math.sin(t)), st.floats(0, 0.999), st.floats(0, 2 * math.pi))


def test_phi_examples():
    assert phi(0, 0.3 + 0.2j) == pytest.approx(-(0.3 + 0.2j))
    assert abs(phi(0.5, 0.5)) == 0
    assert phi(0.5, 0) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        phi(1.0, 0.2)
    with pytest.raises(DomainError):
        phi(0.2, 1.0)


@given(disk, disk)
def test_phi_involution(a, z):
    assert abs(phi(a, phi(a, z)) - z) <= 1e-12 * max(1.0, 1 / (1 - abs(z)))


def test_phi_involution_1000_points(rng):
    a = disk_points(rng, 1000, 0.99)
    z = disk_points(rng, 1000, 0.99)
    assert np.max(np.abs(phi(a, phi(a, z)) - z)) <= 1e-12


@given(disk, disk)
def test_phi_prime_matches_difference_quotient(a, z):
    if abs(z) > 0.99:
        return
    h = 1e-6
    fd = (phi(a, z + h) - phi(a, z - h)) / (2 * h)
    assert abs(fd - phi_prime(a, z)) <= 1e-5 * max(1.0, abs(phi_prime(a, z)))


def test_invariance_identity_examples():
    assert invariance_identity_residual(0, 0.4 - 0.3j) == 0
    assert invariance_identity_residual(0.7j, 0.3) <= 1e-13
    assert invariance_identity_residual(0.9, -0.8) <= 1e-13


@given(disk, disk)
def test_product_form_matches_direct(a, z):
    if abs(a) > 0.99 or abs(z) > 0.99:
        return
    direct = 1 - abs(phi(a, z)) ** 2
    assert abs(one_minus_phi_sq(a, z) - direct) <= 1e-12


def test_hyperbolic_distance_examples(rng):
    assert hyperbolic_distance(0.3j, 0.3j) == 0
    assert hyperbolic_distance(0, 0.5) == pytest.approx(0.5 * math.log(3), abs=1e-15)
    z, xi = disk_points(rng, 200, 0.99), disk_points(rng, 200, 0.99)
    assert np.max(np.abs(hyperbolic_distance(z, xi) - hyperbolic_distance(xi, z))) <= 1e-13
    r = np.linspace(0, 0.999, 50)
    assert np.max(np.abs(hyperbolic_distance(0, r) - 0.5 * np.log((1 + r) / (1 - r)))) <= 1e-13


@given(disk, disk, disk)
def test_hyperbolic_triangle_inequality(a, b, c):
    if max(abs(a), abs(b), abs(c)) > 0.99:
        return
    assert hyperbolic_distance(a, c) <= hyperbolic_distance(a, b) + hyperbolic_distance(b, c) + 1e-9


@given(disk, disk, disk)
def test_pseudo_distance_moebius_invariant(a, z, xi):
    if max(abs(a), abs(z), abs(xi)) > 0.98:
        return
    d0 = pseudo_hyperbolic_distance(z, xi)
    d1 = pseudo_hyperbolic_distance(phi(a, z), phi(a, xi))
    assert abs(d0 - d1) <= 1e-9


def test_schwarz_pick_examples():
    assert schwarz_pick_margin(Z, 0.4 + 0.3j) == pytest.approx(0, abs=1e-15)
    assert schwarz_pick_margin(Scale(0.5, Z), 0.0) == pytest.approx(0.5)
    assert schwarz_pick_margin(Pow(Z, 2.0), 0.5) == pytest.approx(0.1875)
    with pytest.raises(NotSelfMap):
        schwarz_pick_margin(Scale(3.0, Z), 0.5)


@given(st.floats(0, 1), disk)
def test_schwarz_pick_for_contractions(rho, z):
    assert schwarz_pick_margin(Scale(rho, Pow(Z, 2.0)), z) >= -1e-12


# --- Carleson boxes -------------------------------------------------------------------------------


def test_box_area_full():
    reg = box_region(CarlesonBox(0.3, 1.0))
    assert reg.total_weight == pytest.approx(math.pi, rel=1e-12)


@pytest.mark.parametrize("j", range(0, 7))
def test_box_area_dyadic(j):
    b = CarlesonBox(1.0, 2.0 ** (-j))
    assert box_region(b).total_weight == pytest.approx(b.area(), rel=3e-3)


def test_box_area_monte_carlo(rng):
    b = CarlesonBox(2.0, 0.5)
    pts = disk_points(rng, 400_000, 1.0)
    frac = np.mean(b.contains(pts))
    assert frac * math.pi == pytest.approx(box_region(b).total_weight, rel=5e-3)


def test_box_nodes_inside_and_rotation_equivariant():
    b = CarlesonBox(0.7, 0.25)
    reg = box_region(b)
    assert np.all(b.contains(reg.nodes))
    rot = box_region(CarlesonBox(0.7 + 0.4, 0.25))
    assert np.max(np.abs(rot.nodes - reg.nodes * np.exp(0.4j))) <= 1e-13


def test_box_validation():
    with pytest.raises(ArgError):
        CarlesonBox(0, 0)
    with pytest.raises(ArgError):
        CarlesonBox(0, 1.5)
    with pytest.raises(ArgError):
        box_region("box")


# --- sup search -----------------------------------------------------------------------------------


def test_sup_constant_tie_break():
    res = sup_search(lambda z: np.full(z.shape, 2.0))
    assert res.sup == 2.0 and res.argmax == 0


def test_sup_constant_tie_break_without_origin():
    cfg = SupSearchConfig(include_origin=False, refine_rounds=0)
    res = sup_search(lambda z: np.full(z.shape, 2.0), cfg)
    assert res.argmax == pytest.approx(0.5)


def test_sup_peak_at_origin():
    res = sup_search(lambda z: 1 - np.abs(z) ** 2)
    assert res.sup == 1.0 and res.argmax == 0 and not res.boundary_limited


def test_sup_boundary_limited():
    res = sup_search(lambda z: (1 - np.abs(z) ** 2) / np.abs(1 - z))
    assert res.sup == pytest.approx(2, abs=1e-3) and res.sup <= 2
    assert res.boundary_limited
    assert [lv["level"] for lv in res.level_maxima] == list(range(0, 15))


def test_sup_refinement_never_decreases():
    f = lambda z: np.abs(np.sin(3 * z + 0.2)) * (1 - np.abs(z) ** 2)
    vals = [sup_search(f, SupSearchConfig(angular=32, refine_rounds=k)).sup for k in range(5)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_sup_cap_and_config_roundtrip():
    cfg = SupSearchConfig(levels=10, cap=0.99)
    assert cfg.cap_radius == 0.99
    res = sup_search(lambda z: np.abs(z), cfg)
    assert res.sup <= 0.99 + 1e-15 and res.boundary_limited
    assert SupSearchConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ArgError):
        SupSearchConfig(cap=1.0)
    with pytest.raises(ArgError):
        SupSearchConfig(levels=0)


def test_sup_reports_nan_point():
    with pytest.raises(ArithmeticError):
        sup_search(lambda z: np.where(np.abs(z) > 0.6, np.nan, 1.0))
