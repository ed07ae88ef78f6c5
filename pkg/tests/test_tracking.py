import json

import numpy as np
import pytest

from metaplectic import (MetaplecticElement, TraceConfig, caustic_phase_jump,
                         chord_phase_jump, detect_caustics, elliptic_hyperbolic_factors,
                         fine_path_composition_oracle, flow, harmonic_element, hyperbolic,
                         inverted_element, product_metaplectic, reflected_hyperbolic_element,
                         rotation, trace_family, weyl_symbol)
from metaplectic.errors import BracketError, DegenerateFamilyError
from metaplectic.tracking import CHORD_EVENT, WEYL

from conftest import direct_sum, element_from_b, phase_dist, random_symmetric


def test_jump_rule_from_signatures():
    # one eigenvalue of B runs off to -inf and comes back from +inf
    assert caustic_phase_jump(np.diag([-5.0, 1.0]), np.diag([5.0, 1.0])) == pytest.approx(-np.pi / 2)
    assert caustic_phase_jump(np.diag([5.0, 1.0]), np.diag([-5.0, 1.0])) == pytest.approx(np.pi / 2)
    # harmonic at half period: both eigenvalues pass through infinity
    assert caustic_phase_jump(-10 * np.eye(2), 10 * np.eye(2)) == pytest.approx(-np.pi)
    assert chord_phase_jump(np.diag([-5.0, 1.0]), np.diag([5.0, 1.0])) == pytest.approx(np.pi / 2)


def test_jump_rule_needs_a_bracket():
    with pytest.raises(BracketError):
        caustic_phase_jump(np.diag([0.0, 1.0]), np.eye(2))
    with pytest.raises(BracketError):
        caustic_phase_jump(None, np.eye(2))
    with pytest.raises(BracketError):
        caustic_phase_jump(np.eye(2), np.eye(4))


def test_harmonic_double_cover():
    tr = trace_family(rotation, (0.0, 4 * np.pi))
    weyl = tr.weyl_events
    assert [round(e.t_star / np.pi, 9) for e in weyl] == [1.0, 3.0]
    assert all(e.degeneracy == 2 and e.theta_jump == pytest.approx(-np.pi) for e in weyl)
    assert tr.element_at(2 * np.pi).sign() == -1
    assert tr.element_at(4 * np.pi).sign() == 1
    # at the half period the element is the metaplectic reflection
    e = tr.element_at(np.pi)
    assert e.is_reflection
    assert weyl_symbol(e).phase == pytest.approx(-np.pi / 2)


def test_harmonic_windings_match_closed_form():
    # exact real windings, not just mod 2 pi, including the caustic points
    t0 = -4.9 * np.pi
    tr = trace_family(rotation, (t0, 4.9 * np.pi), harmonic_element(t0).phase_winding)
    ts = np.r_[np.linspace(-4.8 * np.pi, 4.8 * np.pi, 37), np.arange(-4, 5) * np.pi]
    for t in ts:
        assert tr.winding_at(t) == pytest.approx(harmonic_element(t).phase_winding, abs=1e-12)
    with pytest.raises(ValueError):
        trace_family(rotation, (-np.pi, 0.0))


def test_chord_events_of_harmonic():
    tr = trace_family(rotation, (0.0, 4 * np.pi))
    chord = tr.chord_events
    assert [round(e.t_star / np.pi, 9) for e in chord] == [0.0, 2.0, 4.0]
    assert chord[0].boundary and chord[-1].boundary
    assert chord[1].theta_jump == pytest.approx(-np.pi)


def test_no_events_without_caustics():
    # leaving the identity: eigenphases split both ways, no net chord jump
    (ev,) = detect_caustics(hyperbolic, (0.0, 3.0))
    assert ev.kind == CHORD_EVENT and ev.boundary and ev.theta_jump == 0.0
    tr = trace_family(lambda t: np.eye(2), (0.0, 1.0))
    assert tr.caustic_events == ()
    tr = trace_family(lambda t: -hyperbolic(t), (0.1, 3.0), -np.pi / 2)
    assert tr.caustic_events == ()
    assert np.all(tr.phase_windings == -np.pi / 2)


def test_product_family_crosses_once():
    def m_of_g(g):
        e1, e2 = elliptic_hyperbolic_factors(2.0, g)
        return e2.m @ e1.m

    tr = trace_family(m_of_g, (0.2, 0.9))
    (ev,) = tr.weyl_events
    assert ev.t_star == pytest.approx(0.5, abs=1e-9)
    assert ev.theta_jump == pytest.approx(np.pi / 2)
    assert (ev.n_minus_before, ev.n_minus_after) == (0, 1)


def test_elliptic_to_reflected_hyperbolic():
    # N- drops 2 -> 1 and the trace lands on the sheet of R' times the hyperbolic flow
    def m_of_s(s):
        return rotation(0.9 * np.pi + 0.1 * np.pi * s) @ hyperbolic(s)

    tr = trace_family(m_of_s, (0.0, 1.0))
    (ev,) = tr.weyl_events
    assert (ev.n_minus_before, ev.n_minus_after) == (2, 1)
    assert ev.theta_jump == pytest.approx(-np.pi / 2)
    target = product_metaplectic(harmonic_element(np.pi), inverted_element(1.0)).element
    np.testing.assert_allclose(target.m, m_of_s(1.0), atol=1e-12)
    assert phase_dist(tr.phase_windings[-1], target.phase_winding) < 1e-12
    assert target.phase_winding == pytest.approx(reflected_hyperbolic_element(1.0).phase_winding)


def test_two_freedom_flow_against_fine_path():
    r = np.sqrt(2.0)
    tr = trace_family(lambda t: direct_sum(rotation(t), rotation(r * t)), (0.0, 3.5 * np.pi))
    assert len(tr.weyl_events) == 4
    fp = fine_path_composition_oracle(np.diag([1.0, r, 1.0, r]), 3.5 * np.pi, 4000)
    assert phase_dist(tr.phase_windings[-1], fp.phase_winding) < 1e-9


def test_random_flow_against_fine_path(rng):
    checked = 0
    while checked < 5:
        h = random_symmetric(rng, 4)
        e1 = element_from_b(random_symmetric(rng, 4, 0.5))
        if np.linalg.det(np.eye(4) + e1.m) <= 0:
            continue
        tr = trace_family(lambda t: flow(h, t) @ e1.m, (0.0, 2.5), e1, TraceConfig(samples=64))
        if not tr.weyl_events:
            continue
        fp = fine_path_composition_oracle(h, 2.5, 400, initial=e1)
        assert phase_dist(tr.phase_windings[-1], fp.phase_winding) < 1e-6
        checked += 1


def test_initial_sheet():
    e = harmonic_element(2.5)
    tr = trace_family(lambda t: rotation(2.5 + t), (0.0, 1.0), e.with_winding(np.pi))
    # pi offset carried along, one caustic crossed
    assert tr.phase_windings[-1] == pytest.approx(0.0)
    with pytest.raises(ValueError):
        trace_family(lambda t: -hyperbolic(t + 0.1), (0.0, 1.0))
    with pytest.raises(ValueError):
        trace_family(rotation, (1.0, 0.0))


def test_coincident_events_are_refused():
    with pytest.raises(DegenerateFamilyError):
        trace_family(lambda t: direct_sum(rotation(t), rotation(2 * t)), (0.5, 3.5))


def test_outputs(tmp_path):
    tr = trace_family(rotation, (0.0, 2 * np.pi), cfg=TraceConfig(samples=32))
    text = tr.to_csv()
    lines = text.strip().split("\n")
    assert lines[0].startswith("t,tr(M),det(I+M)")
    flagged = [ln for ln in lines[1:] if ln.split(",")[-1]]
    assert any(WEYL in ln for ln in flagged) and any(CHORD_EVENT in ln for ln in flagged)
    events = json.loads(tr.events_json())
    assert {e["kind"] for e in events} == {WEYL, CHORD_EVENT}
    with open(tmp_path / "t.csv", "w") as fh:
        tr.to_csv(fh)
    assert (tmp_path / "t.csv").read_text() == text
    with pytest.raises(ValueError):
        tr.element_at(7.0)


def test_trace_is_immutable():
    tr = trace_family(rotation, (0.0, 1.0), cfg=TraceConfig(samples=8))
    with pytest.raises(AttributeError):
        tr.params = None
    assert isinstance(tr.elements[0], MetaplecticElement)
