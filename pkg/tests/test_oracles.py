import json

import numpy as np
import pytest
from hypothesis import assume, given, settings

from metaplectic import (CENTRE, EvaluationContext, GaussianSymbol, MetaplecticElement,
                         fine_path_composition_oracle, fresnel_signature_oracle,
                         harmonic_element, quadrature_product_oracle,
                         regularized_limit_oracle, rotation, weyl_symbol)
from metaplectic.errors import (OracleConvergenceError, OracleDomainError,
                                OracleStepError)
from metaplectic.oracles import _neville

from conftest import phase_dist, random_symmetric, symmetric_matrices


def test_fresnel_one_dimensional():
    r = fresnel_signature_oracle([[2.0]])
    # int exp(2i x^2) dx = sqrt(pi/2) e^{i pi/4}
    assert r.modulus == pytest.approx(np.sqrt(np.pi / 2))
    assert r.phase == pytest.approx(np.pi / 4)
    assert r.signature_used == 1
    assert json.loads(r.to_json())["signature_used"] == 1


def test_fresnel_scales_with_hbar():
    a = np.diag([1.0, -3.0])
    r1 = fresnel_signature_oracle(a, EvaluationContext(1.0))
    r2 = fresnel_signature_oracle(a, EvaluationContext(0.25))
    assert r2.modulus / r1.modulus == pytest.approx(0.25)
    assert r1.phase == r2.phase == 0.0


@settings(deadline=None, max_examples=60)
@given(symmetric_matrices(n_max=2, bound=4.0))
def test_regularized_agrees_with_fresnel(a):
    assume(np.min(np.abs(np.linalg.eigvalsh(a))) > 1e-2)
    f = fresnel_signature_oracle(a)
    r = regularized_limit_oracle(a)
    assert r.phase == pytest.approx(f.phase, abs=1e-6)
    assert r.modulus == pytest.approx(f.modulus, rel=1e-9)
    assert r.signature_used == f.signature_used


def test_oracles_refuse_singular_forms():
    for oracle in (fresnel_signature_oracle, regularized_limit_oracle):
        with pytest.raises(OracleDomainError):
            oracle(np.diag([1.0, 0.0]))
        with pytest.raises(OracleDomainError):
            oracle(np.ones((2, 3)))


def test_regularized_sequence_validation():
    with pytest.raises(ValueError):
        regularized_limit_oracle(np.eye(2), eps_sequence=[1.0, 2.0])


def test_neville_is_exact_for_polynomials():
    xs = [0.5, 0.4, 0.3, 0.2]
    ys = [1 + 2 * x - x ** 3 for x in xs]
    assert _neville(xs, ys) == pytest.approx(1.0)


def test_fine_path_harmonic():
    e = fine_path_composition_oracle(np.eye(2), 2 * np.pi, 1000)
    np.testing.assert_allclose(e.m, np.eye(2), atol=1e-9)
    assert e.sign() == -1
    e = fine_path_composition_oracle(np.eye(2), 4 * np.pi, 2000)
    assert e.sign() == 1
    e = fine_path_composition_oracle(np.eye(2), 2.5, 300)
    assert phase_dist(e.phase_winding, harmonic_element(2.5).phase_winding) < 1e-12


def test_fine_path_step_halving(rng):
    h = random_symmetric(rng, 4)
    a = fine_path_composition_oracle(h, 3.0, 500)
    b = fine_path_composition_oracle(h, 3.0, 1000)
    np.testing.assert_allclose(a.m, b.m, atol=1e-8)
    assert phase_dist(a.phase_winding, b.phase_winding) < 1e-9


def test_fine_path_initial_element():
    start = harmonic_element(2.0)
    e = fine_path_composition_oracle(np.eye(2), 2.0, 300, initial=start)
    assert phase_dist(e.phase_winding, harmonic_element(4.0).phase_winding) < 1e-12
    assert fine_path_composition_oracle(np.eye(2), 0.0, 10, initial=start) is start


def test_fine_path_errors():
    with pytest.raises(OracleStepError):
        fine_path_composition_oracle(np.eye(2), 3.0, 5)
    with pytest.raises(OracleStepError):
        fine_path_composition_oracle(np.eye(2), 3.0, 0)
    # the harmonic flow ends on the reflection, a caustic of the Weyl form
    with pytest.raises(OracleDomainError):
        fine_path_composition_oracle(np.eye(2), np.pi, 200)


def test_quadrature_identity():
    s = weyl_symbol(MetaplecticElement.identity())
    v = quadrature_product_oracle(s, s, [[0.0, 0.0], [0.3, -0.2]])
    np.testing.assert_allclose(v, [1.0, 1.0], atol=1e-6)


def test_quadrature_harmonic_square():
    e = harmonic_element(np.pi / 3)
    x = np.array([0.2, 0.1])
    v = quadrature_product_oracle(weyl_symbol(e), weyl_symbol(e), x)
    want = weyl_symbol(harmonic_element(2 * np.pi / 3)).evaluate(x)
    assert isinstance(v, complex)
    assert abs(v - want) < 1e-3 * abs(want)


def test_quadrature_domain():
    e = harmonic_element(0.5)
    delta = weyl_symbol(harmonic_element(np.pi))
    with pytest.raises(OracleDomainError):
        quadrature_product_oracle(delta, weyl_symbol(e), [0.0, 0.0])
    two = GaussianSymbol(CENTRE, np.eye(4), 1.0)
    with pytest.raises(OracleDomainError):
        quadrature_product_oracle(two, two, [0, 0, 0, 0])
    with pytest.raises(OracleDomainError):
        quadrature_product_oracle(weyl_symbol(e), weyl_symbol(e), [0.0, 0.0], damping=0.0)


def test_quadrature_reports_nonconvergence():
    # near the half period the Gaussian is too steep for the grid
    e = MetaplecticElement(rotation(0.9 * np.pi), 0.0)
    with pytest.raises(OracleConvergenceError):
        quadrature_product_oracle(weyl_symbol(e), weyl_symbol(e), [0.0, 0.0])
