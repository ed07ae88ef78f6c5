"""Closed-form one-degree-of-freedom families used throughout the tests and demos.

Each ``*_element`` returns the element on the sheet reached continuously
from the identity (or, for the reflected hyperbolic family, from the
metaplectic reflection at the origin).
"""
from __future__ import annotations

import numpy as np

from .symbols import MetaplecticElement
from .symplectic import CayleyForm, hyperbolic, m_from_cayley, rotation

__all__ = [
    "harmonic_matrix", "harmonic_element", "harmonic_weyl_prefactor",
    "harmonic_chord_prefactor", "inverted_element", "reflected_hyperbolic_element",
    "elliptic_hyperbolic_factors",
]


def harmonic_matrix(angle: float) -> np.ndarray:
    """Flow of ``H = (ω/2)(p² + q²)`` after ``ωt = angle``."""
    return rotation(angle)


def harmonic_winding(angle: float) -> float:
    """Weyl winding of the harmonic propagator on the continuous sheet.

    Each half period crossed forwards subtracts π, matching
    :func:`metaplectic.tracking.trace_family`; at an odd multiple of π the
    element is the metaplectic reflection ``±R'`` and the winding is its
    delta phase, midway between the two sides.
    """
    k = (angle - np.pi) / (2 * np.pi)
    if abs(k - round(k)) < 1e-12:
        return -0.5 * np.pi - np.pi * round(k)
    return -np.pi * round(angle / (2 * np.pi))


def harmonic_element(angle: float) -> MetaplecticElement:
    return MetaplecticElement(rotation(angle), harmonic_winding(angle))


def harmonic_weyl_prefactor(angle: float) -> float:
    """``1/cos(ωt/2)``."""
    return 1.0 / np.cos(0.5 * angle)


def harmonic_chord_prefactor(angle: float) -> complex:
    """``-i / (2 sin(ωt/2))``."""
    return -1j / (2.0 * np.sin(0.5 * angle))


def inverted_element(u: float) -> MetaplecticElement:
    """Inverted oscillator ``H = (λ/2)(p² - q²)`` after ``λt = u``; no caustics."""
    return MetaplecticElement(hyperbolic(u), 0.0)


def reflected_hyperbolic_element(u: float) -> MetaplecticElement:
    """``R' exp(u J diag(1,-1))``: hyperbolic with reflection.

    The chord prefactor is ``-i/(2 cosh(u/2))`` for every ``u`` and the Weyl
    prefactor is ``-i/|sinh(u/2)|``.
    """
    return MetaplecticElement(-hyperbolic(u), -0.5 * np.pi)


def elliptic_hyperbolic_factors(omega: float, gamma: float):
    """Elliptic ``B1 = ω I`` and hyperbolic ``B2 = γ diag(1, -1)`` factors.

    Both are on the sheet continuous with the identity (``|γ| < 1``).  The
    product ``M2 M1`` crosses a Weyl caustic at ``γω = ±1``.
    """
    b1 = CayleyForm(omega * np.eye(2))
    b2 = CayleyForm(gamma * np.diag([1.0, -1.0]))
    e1 = MetaplecticElement(m_from_cayley(b1), 0.0)
    e2 = MetaplecticElement(m_from_cayley(b2), 0.0)
    return e1, e2
