"""Phase-correct products of metaplectic elements.

The Weyl product rule turns the product of two Gaussian symbols into a
4N-dimensional Gaussian integral whose quadratic form is ``𝔅 - 𝕁`` with
``𝔅 = diag(B1, B2)`` and ``𝕁 = [[0, J], [-J, 0]]``.  Its signature fixes the
phase increment ``(π/4) σ(𝔅 - 𝕁)`` and its determinant equals
``Δ = det(I + J B2 J B1)``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np
import scipy.optimize

from .errors import (FactorCausticError, ProductCausticError,
                     ReflectionProductError)
from .families import harmonic_element
from .symbols import (DEFAULT_CTX, METAPLECTIC_R, STANDARD_R, EvaluationContext,
                      GaussianSymbol, MetaplecticElement, reflection_symbol,
                      weyl_symbol)
from .symplectic import (CENTRE, N1Class, _inf_norm, classify_n1, signature,
                         symplectic_form)

__all__ = [
    "double_form", "DoubleForm", "delta_invariant", "ProductResult", "product_metaplectic",
    "product_with_translation", "product_with_reflection", "reflect_element",
    "OscillatorProduct", "oscillator_product", "SignMap", "product_sign_map",
    "ProductCausticReport", "find_product_caustic",
]


def double_form(b1, b2) -> np.ndarray:
    """The symmetric 4N x 4N matrix ``𝔅 - 𝕁``."""
    b1, b2 = np.asarray(b1, dtype=float), np.asarray(b2, dtype=float)
    J = symplectic_form(b1.shape[0] // 2)
    return np.block([[b1, -J], [J, b2]])


@dataclass(frozen=True, eq=False)
class DoubleForm:
    """The matrix ``𝔅 - 𝕁`` of a product integral.

    For ``B1 = B2 = 0`` it is ``-𝕁`` with eigenvalues ±1, each 2N-fold.
    """

    bb: np.ndarray

    @classmethod
    def from_forms(cls, b1, b2) -> "DoubleForm":
        return cls(double_form(b1, b2))

    @property
    def n(self) -> int:
        return self.bb.shape[0] // 4

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.bb)

    @property
    def n_minus(self) -> int:
        return int(np.sum(self.eigenvalues < 0))

    @property
    def theta(self) -> float:
        """``(π/4) σ = π(N - 𝔑₋/2)``."""
        return np.pi * (self.n - 0.5 * self.n_minus)

    def det(self) -> float:
        return float(np.prod(self.eigenvalues))

    def is_singular(self, tol: float) -> bool:
        ev = np.abs(self.eigenvalues)
        return bool(np.min(ev) < tol * max(1.0, float(np.max(ev))))


def delta_invariant(b1, b2, order: str = "21") -> float:
    """``det(I + J B2 J B1)`` (order "21") or ``det(I + J B1 J B2)`` (order "12")."""
    b1, b2 = np.asarray(b1, dtype=float), np.asarray(b2, dtype=float)
    J = symplectic_form(b1.shape[0] // 2)
    eye = np.eye(b1.shape[0])
    if order == "21":
        return float(np.linalg.det(eye + J @ b2 @ J @ b1))
    return float(np.linalg.det(eye + J @ b1 @ J @ b2))


@dataclass(frozen=True)
class ProductResult:
    element: MetaplecticElement
    delta: float
    theta: float
    n_minus: int

    @property
    def symbol(self) -> GaussianSymbol:
        return weyl_symbol(self.element)


def _reflection_product(e2, e1, ctx):
    # -I commutes with everything: R'·U = U·R'
    refl, other = (e2, e1) if e2.is_reflection else (e1, e2)
    if other.is_reflection:
        # R'R' = (-1)^N; with both prefactors e^{i(w + Nπ/2)} the phases cancel
        n = refl.n
        return ProductResult(MetaplecticElement(np.eye(2 * n), e1.phase_winding + e2.phase_winding,
                                                e1.tol), np.nan, 0.0, 0)
    if other.at_weyl_caustic:
        raise FactorCausticError("both factors sit on Weyl caustics")
    if other.at_chord_caustic:
        if _inf_norm(other.m - np.eye(2 * other.n)) > 1e-12:
            raise ReflectionProductError("reflection times a chord caustic")
        return ProductResult(MetaplecticElement(refl.m, refl.phase_winding + other.phase_winding,
                                                other.tol),
                             np.nan, 0.0, 0)
    # refl = e^{i(w + Nπ/2)} R'
    extra = refl.phase_winding + 0.5 * np.pi * refl.n
    sym = product_with_reflection(other, np.zeros(2 * other.n), METAPLECTIC_R, ctx)
    theta = sym.phase - other.phase_winding
    elem = MetaplecticElement(-other.m, sym.phase + extra, other.tol)
    return ProductResult(elem, np.nan, theta, 0)


def product_metaplectic(e2: MetaplecticElement, e1: MetaplecticElement,
                        ctx: EvaluationContext = DEFAULT_CTX) -> ProductResult:
    """Element ``U2 U1`` with its phase resolved by the Gaussian product integral.

    The winding of the product is ``w1 + w2 + Θ`` with
    ``Θ = (π/4) σ(𝔅 - 𝕁) = π(N - 𝔑₋/2)``.  A factor equal to a reflection
    ``-I`` is handled exactly through :func:`product_with_reflection`; any
    other factor on a Weyl caustic raises :class:`FactorCausticError`.  A
    vanishing eigenvalue of ``𝔅 - 𝕁`` (the product on a caustic) raises
    :class:`ProductCausticError`.
    """
    if e1.n != e2.n:
        raise ValueError("factors act on different phase spaces")
    if e1.at_weyl_caustic or e2.at_weyl_caustic:
        if e1.is_reflection or e2.is_reflection:
            return _reflection_product(e2, e1, ctx)
        raise FactorCausticError("a factor sits on a Weyl caustic; decompose it first")
    b1, b2 = e1.cayley.centre.b, e2.cayley.centre.b
    q = DoubleForm.from_forms(b1, b2)
    if q.is_singular(ctx.tol.eig):
        raise ProductCausticError("double form B - J is singular: the product sits on a caustic")
    delta = delta_invariant(b1, b2)
    n_minus, theta = q.n_minus, q.theta
    elem = MetaplecticElement(e2.m @ e1.m, e1.phase_winding + e2.phase_winding + theta, e1.tol)
    return ProductResult(elem, delta, theta, n_minus)


def product_with_translation(e1: MetaplecticElement, xi,
                             ctx: EvaluationContext = DEFAULT_CTX) -> GaussianSymbol:
    """Weyl symbol of ``T_ξ U1``.

    The exponent is ``(x - ξ/2).B1(x - ξ/2) + x.Jξ``; modulus and phase of
    ``U1`` are untouched.
    """
    w = weyl_symbol(e1, ctx)
    if w.delta_flag:
        raise FactorCausticError("translation of a delta symbol is not Gaussian")
    xi = np.asarray(xi, dtype=float)
    b1 = w.quad
    J = symplectic_form(e1.n)
    return GaussianSymbol(CENTRE, b1, w.modulus, w.phase,
                          lin=J @ xi - b1 @ xi, const=0.25 * xi @ b1 @ xi, hbar=ctx.hbar)


def product_with_reflection(e1: MetaplecticElement, y, variant: str = METAPLECTIC_R,
                            ctx: EvaluationContext = DEFAULT_CTX) -> GaussianSymbol:
    """Weyl symbol of ``R_y U1`` (standard) or ``R'_y U1`` (metaplectic).

    The exponent is ``-[(x - y).Bt1(x - y) + 2 y.Jx]`` and the phase gains
    ``(π/4) σ(B1)``, plus ``-Nπ/2`` for the metaplectic reflection
    ``R' = i^-N R``.
    """
    y = np.asarray(y, dtype=float)
    n = e1.n
    if variant not in (STANDARD_R, METAPLECTIC_R):
        raise ValueError(f"unknown reflection variant {variant!r}")
    pair = e1.cayley
    if pair.centre is None:
        raise ReflectionProductError("U1 sits on a Weyl caustic")
    if pair.chord is None:
        if np.any(pair.centre.b):
            raise ReflectionProductError("B1 is singular: U1 sits on a chord caustic")
        r = reflection_symbol(y, variant, ctx)
        return GaussianSymbol(CENTRE, r.quad, r.modulus, r.phase + e1.phase_winding,
                              lin=r.lin, delta_flag=True, hbar=ctx.hbar)
    bt1 = pair.chord.b
    J = symplectic_form(n)
    det_minus = np.linalg.det(np.eye(2 * n) - e1.m)
    phase = e1.phase_winding + 0.25 * np.pi * signature(pair.centre, 0.0).sigma
    if variant == METAPLECTIC_R:
        phase -= 0.5 * np.pi * n
    return GaussianSymbol(CENTRE, -bt1, 2.0 ** n / np.sqrt(abs(det_minus)), phase,
                          lin=2.0 * bt1 @ y + 2.0 * J @ y, const=-(y @ bt1 @ y),
                          hbar=ctx.hbar)


def reflect_element(e1: MetaplecticElement, ctx: EvaluationContext = DEFAULT_CTX) -> MetaplecticElement:
    """The group element ``R'_0 U1`` (matrix ``-M1``)."""
    sym = product_with_reflection(e1, np.zeros(2 * e1.n), METAPLECTIC_R, ctx)
    return MetaplecticElement(-e1.m, sym.phase, e1.tol)


@dataclass(frozen=True)
class OscillatorProduct:
    result: ProductResult
    sign: Optional[int]
    omega_cap1: float
    omega_cap2: float
    delta_root: float

    @property
    def case(self) -> str:
        """"i" when ``Ω1 Ω2 < 1`` (no phase), "ii" otherwise."""
        return "i" if self.omega_cap1 * self.omega_cap2 < 1.0 else "ii"


def oscillator_product(omega1: float, omega2: float, t: float,
                       ctx: EvaluationContext = DEFAULT_CTX) -> OscillatorProduct:
    """Product of two harmonic evolutions over a common time ``t``.

    Both factors are taken on their continuous sheets.  ``delta_root`` is
    the signed square root of Δ, ``1 - Ω1 Ω2`` with ``Ω_j = -tan(ω_j t/2)``,
    read off the scalar matrix ``I + J B2 J B1``.
    """
    a1, a2 = omega1 * t, omega2 * t
    for a in (a1, a2):
        if abs(np.cos(0.5 * a)) < 1e-12:
            raise FactorCausticError(f"factor at its own caustic (ωt = {a:.6g})")
    e1, e2 = harmonic_element(a1), harmonic_element(a2)
    res = product_metaplectic(e2, e1, ctx)
    b1, b2 = e1.cayley.centre.b, e2.cayley.centre.b
    J = symplectic_form(1)
    root = 0.5 * float(np.trace(np.eye(2) + J @ b2 @ J @ b1))
    return OscillatorProduct(res, res.element.sign(), float(b1[0, 0]), float(b2[0, 0]), root)


@dataclass(frozen=True)
class SignMap:
    """Overall sign of harmonic products on a grid of ``(ω1 t, ω2 t)``.

    ``sign[i, j]`` is 0 on cells where the product sits on a caustic.
    """

    angles1: np.ndarray
    angles2: np.ndarray
    theta: np.ndarray
    sign: np.ndarray
    cos_product_negative: np.ndarray

    def region_tags(self) -> np.ndarray:
        crossed = self.theta != 0
        tags = np.full(self.sign.shape, "neither", dtype=object)
        tags[self.cos_product_negative & ~crossed] = "cos_product_negative"
        tags[~self.cos_product_negative & crossed] = "caustic_crossed"
        tags[self.cos_product_negative & crossed] = "both"
        tags[self.sign == 0] = "on_caustic"
        return tags

    def rows(self):
        tags = self.region_tags()
        for i, a1 in enumerate(self.angles1):
            for j, a2 in enumerate(self.angles2):
                yield a1, a2, self.theta[i, j], int(self.sign[i, j]), tags[i, j]

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["omega1_t", "omega2_t", "theta", "sign", "region_tag"])
        for a1, a2, th, sg, tag in self.rows():
            wr.writerow([f"{a1:.17g}", f"{a2:.17g}", f"{th:.17g}", sg, tag])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text


def product_sign_map(resolution: int = 256, extent: float = 4 * np.pi,
                     ctx: EvaluationContext = DEFAULT_CTX) -> SignMap:
    """Sign map over ``[0, extent]^2`` sampled at cell centres.

    Same algorithm as :func:`oscillator_product`, batched over the grid:
    factor Cayley matrices and windings are computed once per axis and the
    4 x 4 double forms are diagonalized in one call.
    """
    h = extent / resolution
    angles = (np.arange(resolution) + 0.5) * h
    elems = []
    for a in angles:
        if abs(np.cos(0.5 * a)) < 1e-12:
            raise FactorCausticError(f"grid line on a factor caustic (ωt = {a:.6g})")
        elems.append(harmonic_element(a))
    bs = np.array([e.cayley.centre.b for e in elems])
    w = np.array([e.phase_winding for e in elems])
    J = symplectic_form(1)
    n = resolution
    q = np.zeros((n, n, 4, 4))
    q[:, :, :2, :2] = bs[:, None]
    q[:, :, 2:, 2:] = bs[None, :]
    q[:, :, :2, 2:] = -J
    q[:, :, 2:, :2] = J
    ev = np.linalg.eigvalsh(q)
    scale = np.maximum(1.0, np.max(np.abs(ev), axis=-1))
    on_caustic = np.min(np.abs(ev), axis=-1) < ctx.tol.eig * scale
    theta = np.pi * (1.0 - 0.5 * np.sum(ev < 0, axis=-1))
    theta[on_caustic] = 0.0
    phase = w[:, None] + w[None, :] + theta
    sign = np.where(np.cos(phase) > 0, 1, -1).astype(np.int8)
    sign[on_caustic] = 0
    cosneg = (np.cos(0.5 * angles)[:, None] * np.cos(0.5 * angles)[None, :]) < 0
    return SignMap(angles, angles.copy(), theta, sign, cosneg)


@dataclass(frozen=True)
class ProductCausticReport:
    param: float
    delta: float
    trace_plus_2: float
    det_plus: float
    class_before: N1Class
    class_after: N1Class


def find_product_caustic(factors: Callable[[float], tuple], lo: float, hi: float,
                         ctx: EvaluationContext = DEFAULT_CTX, probe: float = 1e-6) -> ProductCausticReport:
    """Root of Δ along a one-parameter family of factor pairs.

    ``factors(s)`` returns ``(e2, e1)``.  Δ must change sign on ``[lo, hi]``.
    The product type is classified at ``s* -+ probe`` (one degree of freedom).
    """
    def delta(s):
        e2, e1 = factors(s)
        return delta_invariant(e1.cayley.centre.b, e2.cayley.centre.b)

    root = scipy.optimize.brentq(delta, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    e2, e1 = factors(root)
    m = e2.m @ e1.m
    n = e1.n
    det_plus = float(np.linalg.det(np.eye(2 * n) + m))
    before = after = None
    if n == 1:
        before = classify_n1(np.dot(*[f.m for f in factors(root - probe)]), ctx.tol)
        after = classify_n1(np.dot(*[f.m for f in factors(root + probe)]), ctx.tol)
    return ProductCausticReport(root, delta(root), float(np.trace(m)) + 2.0 * n,
                                det_plus, before, after)
