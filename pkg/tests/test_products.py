import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metaplectic import (METAPLECTIC_R, STANDARD_R, DoubleForm, MetaplecticElement,
                         N1Class, cayley_from_m, delta_invariant, double_form,
                         elliptic_hyperbolic_factors, find_product_caustic,
                         fine_path_composition_oracle, flow, harmonic_element,
                         oscillator_product, product_metaplectic, product_sign_map,
                         product_with_reflection, product_with_translation,
                         quadrature_product_oracle, reflect_element, reflection_symbol,
                         shear, translation_symbol, weyl_symbol)
from metaplectic.errors import (FactorCausticError, ProductCausticError,
                                ReflectionProductError)

from conftest import element_from_b, phase_dist, random_symmetric, symmetric_matrices


def test_double_form_of_identities():
    q = DoubleForm.from_forms(np.zeros((2, 2)), np.zeros((2, 2)))
    np.testing.assert_allclose(np.sort(q.eigenvalues), [-1, -1, 1, 1])
    assert q.theta == 0.0 and q.n_minus == 2
    assert np.allclose(double_form(np.eye(2), np.eye(2)), double_form(np.eye(2), np.eye(2)).T)


@settings(deadline=None)
@given(symmetric_matrices(bound=2.0), st.data())
def test_delta_orderings_agree(b1, data):
    n2 = len(b1)
    b2 = data.draw(symmetric_matrices(bound=2.0).filter(lambda a: len(a) == n2))
    d21, d12 = delta_invariant(b1, b2, "21"), delta_invariant(b1, b2, "12")
    assert d21 == pytest.approx(d12, rel=1e-9, abs=1e-9)
    # det(B - J) = det(I + J B2 J B1) up to the unit factor det(-J) = 1
    assert DoubleForm.from_forms(b1, b2).det() == pytest.approx(d21, rel=1e-7, abs=1e-7)


def test_identity_is_neutral(rng):
    e = element_from_b(random_symmetric(rng, 4))
    ident = MetaplecticElement.identity(2)
    for res in (product_metaplectic(e, ident), product_metaplectic(ident, e)):
        np.testing.assert_allclose(res.element.m, e.m, atol=1e-12)
        assert res.theta == 0.0
        assert res.element.phase_winding == pytest.approx(e.phase_winding)


def test_harmonic_composition_follows_the_flow():
    # rotations add; the winding follows the continuous sheet
    for a1, a2 in [(0.4, 0.5), (2.0, 2.5), (2.5, 3.0), (-2.0, -2.0), (2.9, -0.5)]:
        res = product_metaplectic(harmonic_element(a2), harmonic_element(a1))
        want = harmonic_element(a1 + a2)
        np.testing.assert_allclose(res.element.m, want.m, atol=1e-12)
        assert phase_dist(res.element.phase_winding, want.phase_winding) < 1e-12


def test_product_against_fine_path(rng):
    for _ in range(10):
        h = random_symmetric(rng, 4)
        t1, t2 = rng.uniform(0.2, 1.5, 2)
        try:
            e1 = fine_path_composition_oracle(h, t1, 400)
            e2 = fine_path_composition_oracle(h, t2, 400)
            ref = fine_path_composition_oracle(h, t1 + t2, 800)
            res = product_metaplectic(e2, e1)
        except (FactorCausticError, ProductCausticError):
            continue
        assert phase_dist(res.element.phase_winding, ref.phase_winding) < 1e-6


def test_associativity(rng):
    done = 0
    while done < 30:
        e1, e2, e3 = (element_from_b(random_symmetric(rng, 2, 1.5)) for _ in range(3))
        try:
            left = product_metaplectic(e3, product_metaplectic(e2, e1).element).element
            right = product_metaplectic(product_metaplectic(e3, e2).element, e1).element
        except (ProductCausticError, FactorCausticError):
            continue
        np.testing.assert_allclose(left.m, right.m, atol=1e-9)
        assert phase_dist(left.phase_winding, right.phase_winding) < 1e-9
        done += 1


def test_product_against_quadrature(rng):
    h = np.sqrt(np.pi / 512)
    done = 0
    while done < 3:
        b1, b2 = random_symmetric(rng, 2), random_symmetric(rng, 2)
        ev = np.linalg.eigvalsh(double_form(b1, b2))
        if np.min(np.abs(ev)) < 0.5 or np.max(np.abs(ev)) > 3.5:
            continue
        e1, e2 = element_from_b(b1), element_from_b(b2)
        sym = product_metaplectic(e2, e1).symbol
        pts = rng.integers(-8, 9, (3, 2)) * h
        got = quadrature_product_oracle(weyl_symbol(e2), weyl_symbol(e1), pts)
        np.testing.assert_allclose(got, sym.evaluate(pts), rtol=1e-3)
        done += 1


def test_product_caustic_is_refused():
    e1, e2 = elliptic_hyperbolic_factors(2.0, 0.5)
    with pytest.raises(ProductCausticError):
        product_metaplectic(e2, e1)
    with pytest.raises(FactorCausticError):
        product_metaplectic(MetaplecticElement(-shear(0.3), 0.0), harmonic_element(0.4))


def test_translation_product_against_quadrature():
    e1 = element_from_b(np.array([[0.6, 0.2], [0.2, -0.9]]))
    xi = np.array([0.3, -0.2])
    sym = product_with_translation(e1, xi)
    h = np.sqrt(np.pi / 512)
    pts = np.array([[0, 0], [3, -2], [-5, 4]]) * h
    got = quadrature_product_oracle(translation_symbol(xi), weyl_symbol(e1), pts)
    np.testing.assert_allclose(got, sym.evaluate(pts), rtol=1e-3)


def test_reflection_product_rotates_by_pi():
    for a in (0.3, 1.2, 2.8):
        r = reflect_element(harmonic_element(a))
        want = harmonic_element(a + np.pi)
        np.testing.assert_allclose(r.m, want.m, atol=1e-12)
        assert phase_dist(r.phase_winding, want.phase_winding) < 1e-12


def test_reflection_variants_differ_by_quarter_turn():
    e = harmonic_element(0.8)
    y = np.array([0.1, 0.4])
    s = product_with_reflection(e, y, STANDARD_R)
    sp = product_with_reflection(e, y, METAPLECTIC_R)
    assert s.phase - sp.phase == pytest.approx(np.pi / 2)
    np.testing.assert_allclose(s.quad, sp.quad)


def test_reflection_through_a_point():
    # R_y = T_{2y} R_0: the symbol picks up the translation
    e = harmonic_element(0.8)
    y = np.array([0.1, 0.4])
    x = np.array([[0.3, -0.2], [1.0, 0.5]])
    s0 = product_with_reflection(e, np.zeros(2), STANDARD_R)
    sy = product_with_reflection(e, y, STANDARD_R)
    # exponent -(x-y).Bt(x-y) - 2 y.Jx
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    shifted = s0.evaluate(x - y) * np.exp(-2j * (x @ J.T @ y))
    np.testing.assert_allclose(sy.evaluate(x), shifted, rtol=1e-12)


def test_reflection_of_identity_is_delta():
    s = product_with_reflection(MetaplecticElement.identity(), [0.2, 0.1], STANDARD_R)
    r = reflection_symbol([0.2, 0.1])
    assert s.delta_flag and np.allclose(s.location, r.location)
    assert s.phase == r.phase
    with pytest.raises(ReflectionProductError):
        product_with_reflection(MetaplecticElement(shear(0.3), 0.0), [0.0, 0.0])
    with pytest.raises(ReflectionProductError):
        product_with_reflection(harmonic_element(np.pi), [0.0, 0.0])


def test_product_with_metaplectic_reflection_factor():
    r = harmonic_element(np.pi)
    e = harmonic_element(0.7)
    for res in (product_metaplectic(r, e), product_metaplectic(e, r)):
        want = harmonic_element(np.pi + 0.7)
        np.testing.assert_allclose(res.element.m, want.m, atol=1e-12)
        assert phase_dist(res.element.phase_winding, want.phase_winding) < 1e-12
    # R' R' is the rotation by 2 pi, which is -1
    rr = product_metaplectic(r, r).element
    assert rr.sign() == -1


def test_oscillator_product_closed_form():
    w1, w2 = 1.0, 0.6
    for t in np.linspace(0.1, 12.0, 37):
        try:
            op = oscillator_product(w1, w2, t)
        except (FactorCausticError, ProductCausticError):
            continue
        c = np.cos((w1 + w2) * t / 2) / (np.cos(w1 * t / 2) * np.cos(w2 * t / 2))
        assert op.delta_root == pytest.approx(c, rel=1e-9, abs=1e-9)
        assert op.result.delta == pytest.approx(c ** 2, rel=1e-9, abs=1e-9)
        assert (op.result.theta == 0.0) == (op.case == "i")
        # sign of the product is the sign of the composed flow's Weyl prefactor
        want = harmonic_element((w1 + w2) * t)
        assert phase_dist(op.result.element.phase_winding, want.phase_winding) < 1e-9


def test_oscillator_factor_caustic():
    with pytest.raises(FactorCausticError):
        oscillator_product(1.0, 0.5, np.pi)


def test_sign_map_small():
    sm = product_sign_map(32)
    off = sm.sign != 0
    total = np.add.outer(sm.angles1, sm.angles2)
    assert np.array_equal((sm.sign < 0)[off], (np.cos(0.5 * total) < 0)[off])
    # the factor prefactors alone do not decide the sign
    assert not np.array_equal(sm.cos_product_negative[off], (sm.sign < 0)[off])
    tags = sm.region_tags()
    assert set(np.unique(tags)) <= {"neither", "cos_product_negative", "caustic_crossed",
                                    "both", "on_caustic"}
    lines = sm.to_csv().strip().split("\n")
    assert lines[0] == "omega1_t,omega2_t,theta,sign,region_tag"
    assert len(lines) == 32 * 32 + 1


def test_find_product_caustic():
    rep = find_product_caustic(lambda g: elliptic_hyperbolic_factors(2.0, g)[::-1], 0.2, 0.9)
    assert rep.param == pytest.approx(0.5, abs=1e-12)
    assert abs(rep.trace_plus_2) < 1e-9
    assert rep.class_before is N1Class.ELLIPTIC
    assert rep.class_after is N1Class.HYPERBOLIC_WITH_REFLECTION


def test_product_of_flows_with_two_freedoms(rng):
    # elements reached by flowing: compare with the flow of the combined time
    h = random_symmetric(rng, 4)
    e1 = element_from_b(cayley_from_m(flow(h, 0.3)).centre.b)
    e2 = element_from_b(cayley_from_m(flow(h, 0.4)).centre.b)
    res = product_metaplectic(e2, e1)
    np.testing.assert_allclose(res.element.m, flow(h, 0.7), atol=1e-10)
    assert phase_dist(res.element.phase_winding,
                      fine_path_composition_oracle(h, 0.7, 200).phase_winding) < 1e-9


def test_delta_sign_tracks_theta():
    # Delta < 0 exactly when Theta is an odd multiple of pi/2
    rng = np.random.default_rng(5)
    for _ in range(200):
        b1, b2 = random_symmetric(rng, 2, 2.0), random_symmetric(rng, 2, 2.0)
        q = DoubleForm.from_forms(b1, b2)
        if np.min(np.abs(q.eigenvalues)) < 1e-6:
            continue
        odd = (q.n_minus % 2) == 1
        assert (delta_invariant(b1, b2) < 0) == odd
