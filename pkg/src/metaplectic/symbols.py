"""Exact Weyl (centre) and chord symbols of metaplectic operators.

A metaplectic element is a symplectic matrix together with a real phase
``phase_winding``: the argument of its Weyl symbol at the origin.  The
modulus of every Gaussian symbol is ħ-independent; the two sheets over a
given matrix differ by ``pi`` in the winding.

Symbols are Gaussians

    centre:  U(x)  = modulus * exp(i*phase) * exp(i/ħ * (x.Qx + lin.x + const))
    chord:   U~(ξ) = modulus * exp(i*phase) * exp(i/ħ * (-ξ.Qξ/4 + lin.ξ + const))

related by the symplectic Fourier pair ``U~(ξ) = (2πħ)^-N ∫dx
exp(i x∧ξ/ħ) U(x)`` with the wedge product ``x∧ξ = ξ.Jx``.  A delta
symbol stores its support point in ``lin``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import (CausticError, ChordCausticError, FourierDomainError,
                     KindError, SheetError)
from .symplectic import (CENTRE, CHORD, DEFAULT_TOL, CayleyPair, Tolerances,
                         _inf_norm, cayley_from_m, dim_of, is_symplectic,
                         signature, symplectic_form)

__all__ = [
    "EvaluationContext", "GaussianSymbol", "MetaplecticElement",
    "weyl_symbol", "chord_symbol", "fourier_weyl_to_chord",
    "fourier_chord_to_weyl", "translation_symbol", "reflection_symbol",
    "STANDARD_R", "METAPLECTIC_R", "wrap_phase",
]

STANDARD_R = "standard_R"
METAPLECTIC_R = "metaplectic_Rprime"

# sheet consistency is checked to this many radians
_SHEET_TOL = 1e-6


def wrap_phase(phi):
    """Reduce to ``(-pi, pi]``."""
    out = np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), 2 * np.pi)
    return float(out) if np.ndim(out) == 0 else out


def _dist_mod(phi: float, period: float) -> float:
    r = np.mod(phi, period)
    return float(min(r, period - r))


@dataclass(frozen=True)
class EvaluationContext:
    hbar: float = 1.0
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")


DEFAULT_CTX = EvaluationContext()


@dataclass(frozen=True, eq=False)
class GaussianSymbol:
    """Weyl or chord symbol of a (possibly inhomogeneous) metaplectic operator."""

    kind: str
    quad: np.ndarray
    modulus: float
    phase: float = 0.0
    lin: Optional[np.ndarray] = None
    const: float = 0.0
    delta_flag: bool = False
    hbar: float = 1.0

    def __post_init__(self):
        if self.kind not in (CENTRE, CHORD):
            raise KindError(f"unknown symbol kind {self.kind!r}")
        quad = np.array(self.quad, dtype=float)
        n = dim_of(quad)
        lin = np.zeros(2 * n) if self.lin is None else np.array(self.lin, dtype=float)
        if lin.shape != (2 * n,):
            raise ValueError("lin must have length 2N")
        if self.modulus < 0:
            raise ValueError("modulus must be nonnegative")
        for a in (quad, lin):
            a.flags.writeable = False
        object.__setattr__(self, "quad", quad)
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "modulus", float(self.modulus))
        object.__setattr__(self, "phase", float(self.phase))

    @property
    def n(self) -> int:
        return self.quad.shape[0] // 2

    @property
    def prefactor(self) -> complex:
        """Constant factor ``modulus * exp(i phase)``."""
        return self.modulus * np.exp(1j * self.phase)

    @property
    def location(self) -> np.ndarray:
        if not self.delta_flag:
            raise ValueError("only delta symbols have a location")
        return self.lin

    def action(self, z) -> np.ndarray:
        """Real exponent (action units) at points ``z`` of shape ``(..., 2N)``."""
        z = np.asarray(z, dtype=float)
        quadratic = np.einsum("...i,ij,...j->...", z, self.quad, z)
        if self.kind == CHORD:
            quadratic = -0.25 * quadratic
        return quadratic + z @ self.lin + self.const

    def evaluate(self, z):
        if self.delta_flag:
            raise ValueError("a delta symbol has no pointwise value")
        val = self.prefactor * np.exp(1j * self.action(z) / self.hbar)
        return complex(val) if np.ndim(val) == 0 else val

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "quad": self.quad.tolist(),
            "lin": self.lin.tolist(),
            "const": self.const,
            "modulus": self.modulus,
            "phase": self.phase,
            "delta_flag": self.delta_flag,
            "hbar": self.hbar,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianSymbol":
        return cls(kind=d["kind"], quad=d["quad"], lin=d.get("lin"),
                   const=d.get("const", 0.0), modulus=d["modulus"],
                   phase=d["phase"], delta_flag=d.get("delta_flag", False),
                   hbar=d.get("hbar", 1.0))

    @classmethod
    def from_json(cls, s: str) -> "GaussianSymbol":
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True, eq=False)
class MetaplecticElement:
    """A symplectic matrix with the phase of its Weyl symbol at the origin.

    ``phase_winding`` is a real number, never reduced mod 2π.  Off the
    Weyl caustic it must agree with ``arg sqrt(det(I + JB))``, i.e. be a
    multiple of π when ``det(I + M) > 0`` and an odd multiple of π/2 when
    ``det(I + M) < 0``; a :class:`SheetError` is raised otherwise.  For the
    reflection ``M = -I`` the winding is the phase of the delta prefactor.
    """

    m: np.ndarray
    phase_winding: float = 0.0
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        m = np.array(self.m, dtype=float)
        dim_of(m)
        if not is_symplectic(m, self.tol):
            raise ValueError("matrix is not symplectic")
        m.flags.writeable = False
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "phase_winding", float(self.phase_winding))
        expected = self.sheet_offset()
        if expected is not None and _dist_mod(self.phase_winding - expected, np.pi) > _SHEET_TOL:
            raise SheetError(
                f"winding {self.phase_winding:.6g} is not on a sheet over this matrix "
                f"(expected {expected:.6g} mod pi)")

    @classmethod
    def identity(cls, n: int = 1) -> "MetaplecticElement":
        return cls(np.eye(2 * n), 0.0)

    @property
    def n(self) -> int:
        return self.m.shape[0] // 2

    @cached_property
    def cayley(self) -> CayleyPair:
        return cayley_from_m(self.m, self.tol)

    @property
    def is_reflection(self) -> bool:
        return _inf_norm(self.m + np.eye(2 * self.n)) <= 1e-12 * 2 * self.n

    @property
    def at_weyl_caustic(self) -> bool:
        return self.cayley.centre is None

    @property
    def at_chord_caustic(self) -> bool:
        return self.cayley.chord is None

    def sheet_offset(self) -> Optional[float]:
        """Winding mod π required by the matrix, or None if unconstrained."""
        if self.cayley.centre is not None:
            d = np.linalg.det(np.eye(2 * self.n) + self.m)
            return 0.0 if d > 0 else 0.5 * np.pi
        if self.is_reflection:
            return -0.5 * np.pi * self.n
        return None

    def chord_phase(self) -> float:
        """Phase of the chord symbol, ``winding + (π/4) σ(B)``."""
        pair = self.cayley
        if pair.chord is None:
            raise ChordCausticError("det(I - M) = 0: chord symbol is singular")
        if pair.centre is None:
            if self.is_reflection:
                return self.phase_winding
            raise CausticError("chord phase of a non-reflection Weyl caustic "
                               "is not determined by the Weyl winding")
        return self.phase_winding + 0.25 * np.pi * signature(pair.centre, 0.0).sigma

    def with_winding(self, phase_winding: float) -> "MetaplecticElement":
        return MetaplecticElement(self.m, phase_winding, self.tol)

    def sign(self) -> Optional[int]:
        """+1 or -1 if the Weyl prefactor is real, else None."""
        s = np.cos(self.phase_winding)
        if abs(abs(s) - 1.0) > _SHEET_TOL:
            return None
        return 1 if s > 0 else -1


def weyl_symbol(e: MetaplecticElement, ctx: EvaluationContext = DEFAULT_CTX) -> GaussianSymbol:
    """Weyl propagator ``±[det(I + JB)]^(1/2) exp(i x.Bx/ħ)`` of an element.

    At a Weyl caustic only the reflection ``-I`` has a symbol (a delta
    function with prefactor ``(πħ)^N``); other caustics raise CausticError.
    """
    n = e.n
    pair = e.cayley
    if pair.centre is None:
        if e.is_reflection:
            return GaussianSymbol(CENTRE, np.zeros((2 * n, 2 * n)),
                                  (np.pi * ctx.hbar) ** n, e.phase_winding,
                                  delta_flag=True, hbar=ctx.hbar)
        raise CausticError("det(I + M) = 0 and M is not a reflection; "
                           "use the chord representation")
    det_plus = np.linalg.det(np.eye(2 * n) + e.m)
    return GaussianSymbol(CENTRE, pair.centre.b, 2.0 ** n / np.sqrt(abs(det_plus)),
                          e.phase_winding, hbar=ctx.hbar)


def chord_symbol(e: MetaplecticElement, ctx: EvaluationContext = DEFAULT_CTX) -> GaussianSymbol:
    """Chord propagator ``|det(I - M)|^(-1/2) e^(iφ) exp(-i ξ.Bt ξ / 4ħ)``.

    φ is the Weyl winding shifted by the Fresnel phase ``(π/4) σ(B)``.
    """
    n = e.n
    pair = e.cayley
    if pair.chord is None:
        raise ChordCausticError("det(I - M) = 0: the element is translation-like")
    det_minus = np.linalg.det(np.eye(2 * n) - e.m)
    return GaussianSymbol(CHORD, pair.chord.b, 1.0 / np.sqrt(abs(det_minus)),
                          e.chord_phase(), hbar=ctx.hbar)


def _invertible(q: np.ndarray, tol: Tolerances) -> bool:
    return abs(np.linalg.det(q)) >= tol.caustic


def fourier_weyl_to_chord(s: GaussianSymbol, ctx: EvaluationContext = DEFAULT_CTX) -> GaussianSymbol:
    """Symplectic Fourier transform of a Gaussian Weyl symbol.

    The phase increases by ``(π/4) σ(Q)``; the chord quadratic form is
    ``-J Q^-1 J``.
    """
    if s.kind != CENTRE:
        raise KindError("expected a centre symbol")
    if s.delta_flag or not _invertible(s.quad, ctx.tol):
        raise FourierDomainError("quadratic form is singular: the chord symbol is delta-like")
    n, J, q = s.n, symplectic_form(s.n), s.quad
    qinv = np.linalg.inv(q)
    quad_c = -J @ qinv @ J
    lin_c = -0.5 * J @ qinv @ s.lin
    const_c = s.const - 0.25 * s.lin @ qinv @ s.lin
    modulus = s.modulus * 2.0 ** (-n) / np.sqrt(abs(np.linalg.det(q)))
    phase = s.phase + 0.25 * np.pi * signature(q, 0.0).sigma
    return GaussianSymbol(CHORD, 0.5 * (quad_c + quad_c.T), modulus, phase,
                          lin=lin_c, const=const_c, hbar=ctx.hbar)


def fourier_chord_to_weyl(s: GaussianSymbol, ctx: EvaluationContext = DEFAULT_CTX) -> GaussianSymbol:
    """Inverse of :func:`fourier_weyl_to_chord`.

    A chord symbol with zero quadratic form (a reflection) transforms into a
    delta-flagged Weyl symbol centred on ``-J lin``.
    """
    if s.kind != CHORD:
        raise KindError("expected a chord symbol")
    if s.delta_flag:
        raise FourierDomainError("chord delta symbols are not transformed")
    n, J, q = s.n, symplectic_form(s.n), s.quad
    if not np.any(q):
        return GaussianSymbol(CENTRE, q, s.modulus * (2 * np.pi * ctx.hbar) ** n,
                              s.phase, lin=-J @ s.lin, const=s.const,
                              delta_flag=True, hbar=ctx.hbar)
    if not _invertible(q, ctx.tol):
        raise FourierDomainError("chord quadratic form is singular")
    qinv = np.linalg.inv(q)
    quad_w = -J @ qinv @ J
    lin_w = 2.0 * J @ qinv @ s.lin
    const_w = s.const + s.lin @ qinv @ s.lin
    modulus = s.modulus * 2.0 ** n / np.sqrt(abs(np.linalg.det(q)))
    phase = s.phase - 0.25 * np.pi * signature(q, 0.0).sigma
    return GaussianSymbol(CENTRE, 0.5 * (quad_w + quad_w.T), modulus, phase,
                          lin=lin_w, const=const_w, hbar=ctx.hbar)


def translation_symbol(xi, ctx: EvaluationContext = DEFAULT_CTX, kind: str = CENTRE) -> GaussianSymbol:
    """Heisenberg translation ``T_ξ``: Weyl symbol ``exp(i ξ∧x/ħ)``.

    The chord symbol is the delta ``(2πħ)^N δ(η - ξ)``.
    """
    xi = np.asarray(xi, dtype=float)
    n = xi.size // 2
    zero = np.zeros((2 * n, 2 * n))
    if kind == CENTRE:
        return GaussianSymbol(CENTRE, zero, 1.0, lin=symplectic_form(n) @ xi, hbar=ctx.hbar)
    if kind == CHORD:
        return GaussianSymbol(CHORD, zero, (2 * np.pi * ctx.hbar) ** n, lin=xi,
                              delta_flag=True, hbar=ctx.hbar)
    raise KindError(f"unknown kind {kind!r}")


def reflection_symbol(y, variant: str = STANDARD_R, ctx: EvaluationContext = DEFAULT_CTX,
                      kind: str = CENTRE) -> GaussianSymbol:
    """Reflection through ``y``.

    ``standard_R`` is the basis operator of the Weyl representation, with
    Weyl symbol ``(πħ)^N δ(x - y)`` and chord symbol ``2^-N exp(i ξ.Jy/ħ)``.
    ``metaplectic_Rprime = i^-N R`` is the member of the metaplectic group
    reached continuously by the harmonic oscillator at half a period.
    """
    y = np.asarray(y, dtype=float)
    n = y.size // 2
    if variant == STANDARD_R:
        phase = 0.0
    elif variant == METAPLECTIC_R:
        phase = -0.5 * np.pi * n
    else:
        raise ValueError(f"unknown reflection variant {variant!r}")
    zero = np.zeros((2 * n, 2 * n))
    if kind == CENTRE:
        return GaussianSymbol(CENTRE, zero, (np.pi * ctx.hbar) ** n, phase, lin=y,
                              delta_flag=True, hbar=ctx.hbar)
    if kind == CHORD:
        return GaussianSymbol(CHORD, zero, 2.0 ** (-n), phase,
                              lin=symplectic_form(n) @ y, hbar=ctx.hbar)
    raise KindError(f"unknown kind {kind!r}")
