"""Independent brute-force validators for the phase rules.

None of these routines uses :func:`metaplectic.symplectic.signature`:

* :func:`fresnel_signature_oracle` diagonalizes the form with its own
  eigensolver and adds up the one-dimensional Fresnel phases.
* :func:`regularized_limit_oracle` follows ``det(εI - i a)^{-1/2}`` on its
  principal branch as ε shrinks, continuing the phase step by step.
* :func:`fine_path_composition_oracle` builds a flow out of many small
  steps near the identity, where no phase question arises.
* :func:`quadrature_product_oracle` evaluates the two-symbol product
  integral on a grid with Gaussian damping and extrapolates the damping
  away.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.fft
import scipy.linalg

from .errors import (FactorCausticError, OracleConvergenceError,
                     OracleDomainError, OracleStepError, ProductCausticError)
from .products import product_metaplectic
from .symbols import (DEFAULT_CTX, EvaluationContext, GaussianSymbol,
                      MetaplecticElement)
from .symplectic import CENTRE, _inf_norm, cayley_from_m, flow

__all__ = [
    "FresnelResult", "fresnel_signature_oracle", "regularized_limit_oracle",
    "fine_path_composition_oracle", "quadrature_product_oracle",
]


@dataclass(frozen=True)
class FresnelResult:
    """Value of ``∫ exp(i x.a x / ħ) dx`` as modulus and phase."""

    modulus: float
    phase: float
    signature_used: int

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self))


def _check_invertible(a: np.ndarray, ctx: EvaluationContext) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise OracleDomainError("expected a square matrix")
    a = 0.5 * (a + a.T)
    lam = scipy.linalg.eigh(a, eigvals_only=True, driver="ev")
    scale = max(1.0, float(np.max(np.abs(lam))))
    if np.min(np.abs(lam)) < ctx.tol.eig * scale:
        raise OracleDomainError("form is (nearly) singular")
    return lam


def fresnel_signature_oracle(a, ctx: EvaluationContext = DEFAULT_CTX) -> FresnelResult:
    """Gaussian integral by full eigendecomposition.

    Each eigendirection contributes ``sqrt(πħ/|λ|) e^{±iπ/4}``.
    """
    lam = _check_invertible(a, ctx)
    d = lam.size
    sig = int(np.sum(np.sign(lam)))
    modulus = (np.pi * ctx.hbar) ** (0.5 * d) / np.sqrt(np.prod(np.abs(lam)))
    phase = float(np.sum(np.where(lam > 0, 0.25 * np.pi, -0.25 * np.pi)))
    return FresnelResult(float(modulus), phase, sig)


def _neville(xs: Sequence[float], ys: Sequence, x0: float = 0.0):
    """Polynomial extrapolation of ``(xs, ys)`` to ``x0``."""
    t = list(ys)
    xs = list(xs)
    for k in range(1, len(xs)):
        t = [((x0 - xs[i + k]) * t[i] - (x0 - xs[i]) * t[i + 1]) / (xs[i] - xs[i + k])
             for i in range(len(xs) - k)]
    return t[0]


def regularized_limit_oracle(a, ctx: EvaluationContext = DEFAULT_CTX,
                             eps_sequence: Optional[Sequence[float]] = None) -> FresnelResult:
    """Gaussian phase as the ε -> 0 limit of ``-½ arg det(εI - i a)``.

    Parameters
    ----------
    a : (d, d) array_like
        Real symmetric, invertible.
    eps_sequence : sequence of float, optional
        Strictly decreasing regularizations.  The default halves from
        ``10 max(1, |a|)`` fifty times.  For large ε the determinant is
        close to the positive real ``ε^d``, which anchors the branch; each
        later value is the principal value nearest the previous one.

    Raises
    ------
    OracleConvergenceError
        If the phase increments do not shrink monotonically over the tail.
    """
    a = np.asarray(a, dtype=float)
    _check_invertible(a, ctx)
    a = 0.5 * (a + a.T)
    d = a.shape[0]
    if eps_sequence is None:
        eps_sequence = 10.0 * max(1.0, _inf_norm(a)) * 0.5 ** np.arange(51)
    eps = np.asarray(eps_sequence, dtype=float)
    if np.any(np.diff(eps) >= 0) or eps[-1] <= 0:
        raise ValueError("eps_sequence must be positive and strictly decreasing")
    eye = np.eye(d)
    args = np.empty(eps.size)
    for k, e in enumerate(eps):
        sign, _ = np.linalg.slogdet(e * eye - 1j * a)
        args[k] = np.angle(sign)
    args = np.unwrap(args)
    phases = -0.5 * (args - 2 * np.pi * np.round(args[0] / (2 * np.pi)))
    steps = np.abs(np.diff(phases))
    tail = steps[-10:]
    floor = 64 * np.finfo(float).eps
    if np.any(tail[1:] > tail[:-1] + floor):
        raise OracleConvergenceError("regularized phase does not settle monotonically")
    limit = float(_neville(eps[-3:], phases[-3:]))
    if abs(limit - phases[-1]) > 1e-6:
        raise OracleConvergenceError("regularized phase has not converged")
    det_abs = abs(np.linalg.det(a))
    modulus = (np.pi * ctx.hbar) ** (0.5 * d) / np.sqrt(det_abs)
    sig = int(round(limit / (0.25 * np.pi)))
    return FresnelResult(float(modulus), limit, sig)


def fine_path_composition_oracle(h, t_final: float, steps: int,
                                 ctx: EvaluationContext = DEFAULT_CTX,
                                 initial: Optional[MetaplecticElement] = None,
                                 max_step_norm: float = 0.1) -> MetaplecticElement:
    """Element ``exp(t J h)`` (times ``initial``) composed from small steps.

    Every step ``flow(h, t/steps)`` sits in the causticless neighbourhood
    of the identity with winding 0.  When the running product would land
    on (or within 1e-6 of) a caustic, the step is merged with the next one
    and retried, so a path may pass exactly through a caustic.
    """
    h = np.asarray(h, dtype=float)
    n2 = h.shape[0]
    e = initial if initial is not None else MetaplecticElement.identity(n2 // 2)
    if steps < 1:
        raise OracleStepError("need at least one step")
    if t_final == 0:
        return e
    dt = t_final / steps
    step = MetaplecticElement(flow(h, dt), 0.0, e.tol)
    b_step = cayley_from_m(step.m, e.tol).centre
    if b_step is None or _inf_norm(b_step.b) >= max_step_norm:
        raise OracleStepError(f"step too coarse: |B_step| >= {max_step_norm}")
    strict = dataclasses.replace(ctx, tol=dataclasses.replace(ctx.tol, eig=1e-6))
    pending = None
    for _ in range(steps):
        pending = step if pending is None else product_metaplectic(step, pending, ctx).element
        try:
            e = product_metaplectic(pending, e, strict).element
        except (ProductCausticError, FactorCausticError):
            continue
        pending = None
    if pending is not None:
        raise OracleDomainError("the composed element ends on a caustic")
    return e


def _grid_groups(points: np.ndarray, h: float):
    frac = points / h - np.round(points / h)
    keys = np.round(frac, 9)
    groups = {}
    for k, key in enumerate(map(tuple, keys)):
        groups.setdefault(key, []).append(k)
    return groups


def quadrature_product_oracle(s2: GaussianSymbol, s1: GaussianSymbol, x,
                              ctx: EvaluationContext = DEFAULT_CTX,
                              damping: float = 0.36, grid: int = 512,
                              levels: int = 8, ratio: float = 2.0 ** (-0.4),
                              rtol: float = 1e-3):
    """Weyl symbol of ``U2 U1`` at ``x`` by damped quadrature (one freedom).

    Evaluates

        (πħ)^-2 ∫∫ s2(x2) s1(x1) exp(-(2i/ħ)(x1 - x).J(x2 - x)
                                     - d(|x1|² + |x2|²)) dx1 dx2

    on a square grid of ``grid²`` nodes with spacing ``h = sqrt(πħ/grid)``.
    With that spacing the inner integral over ``x2`` is a discrete Fourier
    transform evaluated at ``x1 - x``, so all ``x1`` come from one FFT.  The
    damping runs over ``damping * ratio**k``, ``k < levels``, and is
    extrapolated to zero.

    Parameters
    ----------
    x : array_like, shape (2,) or (k, 2)
        Evaluation point(s).  Points sharing the same offset from the
        lattice ``h Z²`` share one FFT per damping level.

    Returns
    -------
    complex or ndarray of complex

    Raises
    ------
    OracleConvergenceError
        If dropping the weakest damping changes the estimate by more than
        ``rtol`` (relative).
    """
    for s in (s1, s2):
        if s.kind != CENTRE or s.n != 1 or s.delta_flag:
            raise OracleDomainError("quadrature oracle needs regular Weyl symbols with N = 1")
    if damping <= 0:
        raise OracleDomainError("damping must be positive")
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    hbar = ctx.hbar
    n = int(grid)
    h = np.sqrt(np.pi * hbar / n)
    ds = damping * ratio ** np.arange(levels)
    j = np.arange(n) - n // 2
    out = np.empty(len(pts), dtype=complex)
    for key, members in _grid_groups(pts, h).items():
        off = np.array(key) * h
        p1, q1 = off[0] + j * h, off[1] + j * h
        P, Q = np.meshgrid(p1, q1, indexing="ij")
        z = np.stack([P, Q], axis=-1)
        g0 = s2.evaluate(z)
        f0 = s1.evaluate(z)
        idx = [np.round(pts[m] / h - key).astype(int) for m in members]
        # per point: f1 times exp((2i/ħ) u.J(x - o)), u = x1 - x; separable in (p, q)
        fx = []
        for m, (ip, iq) in zip(members, idx):
            xo = pts[m] - off
            kp = np.exp(-2j / hbar * (j - ip) * h * xo[1])
            kq = np.exp(2j / hbar * (j - iq) * h * xo[0])
            fx.append(f0 * np.outer(kp, kq))
        vals = np.empty((levels, len(members)), dtype=complex)
        for lv, d in enumerate(ds):
            w = np.outer(np.exp(-d * p1 ** 2), np.exp(-d * q1 ** 2))
            s = scipy.fft.fft2(scipy.fft.ifftshift(g0 * w))
            # s_prime[a_p, a_q] = s[a_q, -a_p], indexed by a mod n
            s_prime = np.roll(s.T[::-1], 1, axis=0)
            for c, (ip, iq) in enumerate(idx):
                # rows (j - ip) mod n for j = -n/2 ... n/2 - 1
                sv = np.roll(s_prime, (n // 2 + ip, n // 2 + iq), axis=(0, 1))
                vals[lv, c] = np.dot((fx[c] * w).ravel(), sv.ravel())
        vals *= h ** 4 / (np.pi * hbar) ** 2
        for c, m in enumerate(members):
            est = _neville(ds, vals[:, c])
            alt = _neville(ds[:-1], vals[:-1, c])
            if not np.isfinite(est) or abs(est - alt) > rtol * max(abs(est), 1e-300):
                raise OracleConvergenceError(
                    f"damping extrapolation unconverged at x = {pts[m]} "
                    f"(change {abs(est - alt) / abs(est):.2e})")
            out[m] = est
    return complex(out[0]) if np.ndim(x) == 1 else out
