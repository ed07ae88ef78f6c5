"""Real symplectic linear algebra in (p, q) block ordering.

Phase-space vectors are ordered ``(p_1..p_N, q_1..q_N)`` so that the
standard symplectic matrix is

    J = [[0, -I],
         [I,  0]]

and Hamilton's equations read ``dx/dt = J grad H``.  A symplectic matrix
``M`` (``M' J M = J``) is encoded by a symmetric *centre* Cayley matrix
``B`` with ``JB = (I + M)^-1 (I - M)`` or by the complementary *chord*
Cayley matrix ``Bt`` with ``J Bt = -(I - M)^-1 (I + M)``.  ``B`` is the
Hessian of the centre generating function ``S(x) = x.Bx``; ``Bt`` that of
the chord generating function ``St(xi) = xi.Bt xi / 4``.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg

from .errors import CayleyDomainError, DimensionError, KindError, SymmetryError

__all__ = [
    "Tolerances", "DEFAULT_TOL", "symplectic_form", "dim_of",
    "check_symplectic", "is_symplectic", "CayleyForm", "CayleyPair",
    "cayley_from_m", "m_from_cayley", "btilde_from_b", "b_from_btilde",
    "Signature", "signature", "N1Class", "classify_n1", "flow",
    "endpoints_from_centre", "generating_values", "centre_from_chord",
    "cayley_angles", "rotation", "hyperbolic", "shear",
]

CENTRE = "centre"
CHORD = "chord"


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by all modules.

    Attributes
    ----------
    symp : float
        Symplecticity residual, scaled by ``1 + |M|^2``.
    sym : float
        Relative asymmetry allowed in a Cayley matrix before symmetrizing.
    caustic : float
        Absolute threshold on ``|det(I +- M)|`` below which a Cayley form is
        reported as singular.
    eig : float
        Distance of an eigenvalue from a forbidden value (or from zero).
    bisect : float
        Parameter resolution of caustic root bisection.
    rt : float
        Round-trip tolerance.
    classify : float
        Threshold on ``tr(M) -+ 2`` for the one-degree-of-freedom classes.
    """

    symp: float = 1e-9
    sym: float = 1e-8
    caustic: float = 1e-10
    eig: float = 1e-9
    bisect: float = 1e-10
    rt: float = 1e-9
    classify: float = 1e-9


DEFAULT_TOL = Tolerances()


def _inf_norm(a) -> float:
    return float(np.max(np.sum(np.abs(a), axis=1))) if np.size(a) else 0.0


def dim_of(m) -> int:
    """Degrees of freedom N of a square 2N x 2N matrix."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0 or m.shape[0] % 2:
        raise DimensionError(f"phase space dimension must be even, got {m.shape[0]}")
    return m.shape[0] // 2


@functools.lru_cache(maxsize=16)
def _j_cached(n: int) -> np.ndarray:
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = -np.eye(n)
    j[n:, :n] = np.eye(n)
    j.flags.writeable = False
    return j


def symplectic_form(n: int) -> np.ndarray:
    """The matrix J for N = n freedoms (read-only, shared)."""
    n = int(n)
    if n < 1:
        raise DimensionError("n must be >= 1")
    return _j_cached(n)


def check_symplectic(m) -> float:
    """Return the residual ``|M' J M - J|_inf``; the caller compares it."""
    m = np.asarray(m, dtype=float)
    J = symplectic_form(dim_of(m))
    return _inf_norm(m.T @ J @ m - J)


def is_symplectic(m, tol: Tolerances = DEFAULT_TOL) -> bool:
    m = np.asarray(m, dtype=float)
    return check_symplectic(m) <= tol.symp * (1.0 + _inf_norm(m) ** 2)


@dataclass(frozen=True, eq=False)
class CayleyForm:
    """Symmetric Cayley matrix of a symplectic map.

    ``kind`` is ``"centre"`` for B or ``"chord"`` for B-tilde.
    """

    b: np.ndarray
    kind: str = CENTRE

    def __post_init__(self):
        if self.kind not in (CENTRE, CHORD):
            raise KindError(f"unknown Cayley kind {self.kind!r}")
        b = np.array(self.b, dtype=float)
        dim_of(b)
        scale = max(1.0, _inf_norm(b))
        if _inf_norm(b - b.T) > DEFAULT_TOL.sym * scale:
            raise SymmetryError("Cayley matrix is not symmetric")
        b = 0.5 * (b + b.T)
        b.flags.writeable = False
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.b.shape[0] // 2

    def det(self) -> float:
        return float(np.linalg.det(self.b))


class CayleyPair(NamedTuple):
    """Both Cayley forms of one matrix; ``None`` marks a form at its caustic."""

    centre: Optional[CayleyForm]
    chord: Optional[CayleyForm]


def _symmetrized(b: np.ndarray, tol: Tolerances) -> np.ndarray:
    scale = max(1.0, _inf_norm(b))
    if _inf_norm(b - b.T) > tol.sym * scale:
        raise SymmetryError("computed Cayley form is not symmetric; is M symplectic?")
    return 0.5 * (b + b.T)


def cayley_from_m(m, tol: Tolerances = DEFAULT_TOL) -> CayleyPair:
    """Centre and chord Cayley matrices of a symplectic matrix.

    A form is returned as ``None`` when ``|det(I + M)|`` (centre) or
    ``|det(I - M)|`` (chord) is below ``tol.caustic``.
    """
    m = np.asarray(m, dtype=float)
    n = dim_of(m)
    J, eye = symplectic_form(n), np.eye(2 * n)
    centre = chord = None
    if abs(np.linalg.det(eye + m)) >= tol.caustic:
        jb = np.linalg.solve(eye + m, eye - m)
        centre = CayleyForm(_symmetrized(-J @ jb, tol), CENTRE)
    if abs(np.linalg.det(eye - m)) >= tol.caustic:
        jbt = -np.linalg.solve(eye - m, eye + m)
        chord = CayleyForm(_symmetrized(-J @ jbt, tol), CHORD)
    return CayleyPair(centre, chord)


def m_from_cayley(c: CayleyForm, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Symplectic matrix parametrized by a centre or chord Cayley form."""
    J, eye = symplectic_form(c.n), np.eye(2 * c.n)
    jb = J @ c.b
    forbidden = -1.0 if c.kind == CENTRE else 1.0
    if np.min(np.abs(np.linalg.eigvals(jb) - forbidden)) < tol.eig:
        raise CayleyDomainError(f"JB has an eigenvalue {forbidden:+g}")
    if c.kind == CENTRE:
        return np.linalg.solve(eye + jb, eye - jb)
    return -np.linalg.solve(eye - jb, eye + jb)


def _swap_form(b: np.ndarray, tol: Tolerances) -> np.ndarray:
    # -J b^-1 J is its own inverse map
    J = symplectic_form(b.shape[0] // 2)
    if abs(np.linalg.det(b)) < tol.caustic:
        raise CayleyDomainError("Cayley matrix is singular")
    return _symmetrized(-J @ np.linalg.solve(b, J), tol)


def btilde_from_b(c: CayleyForm, tol: Tolerances = DEFAULT_TOL) -> CayleyForm:
    """Chord form from the centre form, ``Bt = -J B^-1 J``.

    Raises CayleyDomainError when B is singular (the map is then a chord
    caustic, e.g. a shear through the identity).
    """
    if c.kind != CENTRE:
        raise KindError("expected a centre Cayley form")
    return CayleyForm(_swap_form(c.b, tol), CHORD)


def b_from_btilde(c: CayleyForm, tol: Tolerances = DEFAULT_TOL) -> CayleyForm:
    if c.kind != CHORD:
        raise KindError("expected a chord Cayley form")
    return CayleyForm(_swap_form(c.b, tol), CENTRE)


class Signature(NamedTuple):
    sigma: int
    n_minus: int
    n_zero: int


def signature(c, zero_tol: Optional[float] = None) -> Signature:
    """Signature of a real symmetric matrix (or :class:`CayleyForm`).

    Eigenvalues with ``|lambda| <= zero_tol`` are counted in ``n_zero``;
    the default threshold is ``1e-9 * max(1, |c|_inf)``.
    """
    a = c.b if isinstance(c, CayleyForm) else np.asarray(c, dtype=float)
    if zero_tol is None:
        zero_tol = 1e-9 * max(1.0, _inf_norm(a))
    ev = np.linalg.eigvalsh(0.5 * (a + a.T))
    n_plus = int(np.sum(ev > zero_tol))
    n_minus = int(np.sum(ev < -zero_tol))
    return Signature(n_plus - n_minus, n_minus, len(ev) - n_plus - n_minus)


class N1Class(str, enum.Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC_SHEAR = "parabolic_shear"
    SIMPLE_HYPERBOLIC = "simple_hyperbolic"
    # tr M = -2 off the reflection; classify_n1 reports these as CAUSTIC
    PARABOLIC_SHEAR_REFLECTED = "parabolic_shear_reflected"
    HYPERBOLIC_WITH_REFLECTION = "hyperbolic_with_reflection"
    REFLECTION = "reflection"
    CAUSTIC = "caustic"


def classify_n1(m, tol: Tolerances = DEFAULT_TOL) -> N1Class:
    """Elliptic / parabolic / hyperbolic type of a 2 x 2 symplectic matrix.

    Uses ``tr M``: ``|tr| < 2`` elliptic, ``tr > 2`` simply hyperbolic,
    ``tr < -2`` hyperbolic with reflection.  On ``tr = 2`` the map is the
    identity or a shear; on ``tr = -2`` it is the reflection ``-I`` or a
    (non-reflection) caustic.
    """
    m = np.asarray(m, dtype=float)
    if dim_of(m) != 1:
        raise DimensionError("classify_n1 needs a 2 x 2 matrix")
    tr = float(np.trace(m))
    scale = max(1.0, _inf_norm(m))
    if abs(tr - 2.0) <= tol.classify * scale:
        if _inf_norm(m - np.eye(2)) <= tol.classify * scale:
            return N1Class.IDENTITY
        return N1Class.PARABOLIC_SHEAR
    if abs(tr + 2.0) <= tol.classify * scale:
        if _inf_norm(m + np.eye(2)) <= tol.classify * scale:
            return N1Class.REFLECTION
        return N1Class.CAUSTIC
    if abs(tr) < 2.0:
        return N1Class.ELLIPTIC
    if tr > 2.0:
        return N1Class.SIMPLE_HYPERBOLIC
    return N1Class.HYPERBOLIC_WITH_REFLECTION


def flow(h, t: float) -> np.ndarray:
    """Linear flow ``exp(t J H)`` of the quadratic Hamiltonian ``x.Hx/2``."""
    h = np.asarray(h, dtype=float)
    J = symplectic_form(dim_of(h))
    return scipy.linalg.expm(t * (J @ (0.5 * (h + h.T))))


def rotation(angle: float) -> np.ndarray:
    """Harmonic flow by ``angle = omega t`` for one degree of freedom."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def hyperbolic(u: float) -> np.ndarray:
    """Inverted-oscillator flow ``exp(u J diag(1, -1))``."""
    c, s = np.cosh(u), np.sinh(u)
    return np.array([[c, s], [s, c]])


def shear(b: float) -> np.ndarray:
    """Parabolic normal form with centre Cayley matrix ``diag(b, 0)``."""
    return np.array([[1.0, 0.0], [-2.0 * b, 1.0]])


def endpoints_from_centre(c: CayleyForm, x):
    """Endpoints and chord of the trajectory centred on ``x``.

    Returns ``(x_minus, x_plus, xi)`` with ``xi = -J dS/dx = -2 J B x``.
    """
    if c.kind != CENTRE:
        raise KindError("endpoints_from_centre needs a centre form")
    x = np.asarray(x, dtype=float)
    xi = -2.0 * symplectic_form(c.n) @ c.b @ x
    return x - 0.5 * xi, x + 0.5 * xi, xi


def generating_values(c: CayleyForm, *, x=None, xi=None) -> float:
    """Quadratic generating function: ``x.Bx`` (centre) or ``xi.Bt xi/4`` (chord)."""
    if c.kind == CENTRE:
        if x is None or xi is not None:
            raise KindError("centre generating function takes a centre x")
        x = np.asarray(x, dtype=float)
        return float(x @ c.b @ x)
    if xi is None or x is not None:
        raise KindError("chord generating function takes a chord xi")
    xi = np.asarray(xi, dtype=float)
    return 0.25 * float(xi @ c.b @ xi)


def centre_from_chord(c: CayleyForm, xi) -> np.ndarray:
    """Centre ``x = J dSt/dxi = J Bt xi / 2`` of the chord ``xi``."""
    if c.kind != CHORD:
        raise KindError("centre_from_chord needs a chord form")
    return 0.5 * symplectic_form(c.n) @ c.b @ np.asarray(xi, dtype=float)


def cayley_angles(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Eigenphases ``2 arctan(beta_k)`` of the Cayley unitary ``(I+iB)(I-iB)^-1``.

    ``beta_k`` are the eigenvalues of B (the eigenvalues of Bt are their
    reciprocals).  The phases live on the circle: a phase through ``+-pi``
    is a Weyl caustic (``beta -> inf``), a phase through 0 is a chord
    caustic.  Unlike B itself the phases are continuous across both, so
    they are what a tracker follows.  Returned sorted in ``(-pi, pi]``.
    """
    m = np.asarray(m, dtype=float)
    eye = np.eye(m.shape[0])
    plus, minus = abs(np.linalg.det(eye + m)), abs(np.linalg.det(eye - m))
    pair = cayley_from_m(m, tol)
    if pair.centre is not None and (plus >= minus or pair.chord is None):
        beta = np.linalg.eigvalsh(pair.centre.b)
        ang = 2.0 * np.arctan(beta)
    elif pair.chord is not None:
        gamma = np.linalg.eigvalsh(pair.chord.b)
        # beta = 1/gamma; gamma = 0 maps to the Weyl caustic at pi
        ang = np.where(gamma >= 0, np.pi, -np.pi) - 2.0 * np.arctan(gamma)
        ang = np.where(ang <= -np.pi, ang + 2 * np.pi, ang)
    else:
        raise CayleyDomainError("both det(I+M) and det(I-M) vanish")
    return np.sort(ang)
