"""Phase tracking along one-parameter families of symplectic matrices.

The tracker follows the eigenphases ``α_k = 2 arctan β_k`` of the Cayley
unitary built from B (``β_k`` the eigenvalues of B).  They are continuous
across both kinds of caustic: a phase crossing an odd multiple of π is a
Weyl caustic (B blows up), a phase crossing a multiple of 2π is a chord
caustic (B̃ blows up).  Each eigenphase crossing in the increasing
direction adds π/2 to the phase of the affected representation and each
decreasing crossing subtracts π/2.  In terms of signatures,

    Weyl:  Θ = (π/4)[σ(B_before) - σ(B_after)]
    chord: Θ = (π/4)[σ(B̃_after) - σ(B̃_before)]

The Weyl rule is what continuity of the chord symbol through a Weyl
caustic forces once the Fourier pair is undone on both sides.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import (BracketError, CayleyDomainError, DegenerateFamilyError,
                     TraceResolutionError)
from .symbols import MetaplecticElement, wrap_phase
from .symplectic import (DEFAULT_TOL, CayleyForm, Tolerances, cayley_angles,
                         signature)

__all__ = [
    "WEYL", "CHORD_EVENT", "TraceConfig", "CausticEvent", "FamilyTrace",
    "caustic_phase_jump", "chord_phase_jump", "detect_caustics", "trace_family",
]

WEYL = "weyl"
CHORD_EVENT = "chord"
WEYL_CONTINUOUS = "weyl_continuous"
CHORD_CONTINUOUS = "chord_continuous"


def _as_form(b) -> np.ndarray:
    if b is None:
        raise BracketError("bracketing form is undefined (sample sits on a caustic)")
    return b.b if isinstance(b, CayleyForm) else np.asarray(b, dtype=float)


def _strict_signature(b: np.ndarray) -> int:
    ev = np.linalg.eigvalsh(0.5 * (b + b.T))
    if np.any(ev == 0):
        raise BracketError("bracketing form is singular")
    return int(np.sum(ev > 0) - np.sum(ev < 0))


def caustic_phase_jump(b_before, b_after) -> float:
    """Weyl phase increment across a Weyl caustic.

    ``(π/4)[σ(B_before) - σ(B_after)]``, i.e. ``(π/2)(N₋_after - N₋_before)``.
    Both forms must be nonsingular and of the same size.
    """
    b0, b1 = _as_form(b_before), _as_form(b_after)
    if b0.shape != b1.shape:
        raise BracketError("forms of different size")
    return 0.25 * np.pi * (_strict_signature(b0) - _strict_signature(b1))


def chord_phase_jump(bt_before, bt_after) -> float:
    """Chord phase increment across a chord caustic: the Weyl rule with ``B -> -B̃``."""
    b0, b1 = _as_form(bt_before), _as_form(bt_after)
    if b0.shape != b1.shape:
        raise BracketError("forms of different size")
    return 0.25 * np.pi * (_strict_signature(b1) - _strict_signature(b0))


@dataclass(frozen=True)
class TraceConfig:
    samples: int = 256
    max_step: float = np.pi / 4
    tau_bisect: float = 1e-10
    level_tol: float = 1e-9
    max_refine: int = 200000
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)


@dataclass(frozen=True)
class CausticEvent:
    t_star: float
    kind: str
    degeneracy: int
    theta_jump: float
    n_minus_before: int
    n_minus_after: int
    boundary: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _match(prev: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Continue the unwrapped phases ``prev`` with the raw phases ``new``."""
    d = wrap_phase(new[None, :] - prev[:, None])
    if len(prev) == 1:
        return prev + d[0]
    rows, cols = linear_sum_assignment(np.abs(d))
    out = np.empty_like(prev)
    out[rows] = prev[rows] + d[rows, cols]
    return out


def _on_level(raw: np.ndarray, tol: float) -> bool:
    # any eigenphase at 0 or pi (mod 2pi)
    return bool(np.any(np.abs(wrap_phase(2.0 * raw)) < 2.0 * tol))


def _n_minus(phases: np.ndarray) -> int:
    return int(np.sum(wrap_phase(phases) < 0))


class _Sampler:
    def __init__(self, m_of_t, cfg: TraceConfig):
        self.m_of_t = m_of_t
        self.cfg = cfg

    def raw(self, t: float) -> np.ndarray:
        m = np.asarray(self.m_of_t(t), dtype=float)
        try:
            return cayley_angles(m, self.cfg.tol)
        except CayleyDomainError as exc:
            raise DegenerateFamilyError(f"Weyl and chord caustic coincide at t = {t!r}") from exc

    def grid(self, t0: float, t1: float):
        cfg = self.cfg
        ts = list(np.linspace(t0, t1, cfg.samples))
        h = (t1 - t0) / (cfg.samples - 1)
        raws = []
        for i, t in enumerate(ts):
            r = self.raw(t)
            if 0 < i < len(ts) - 1:
                k = 0
                while _on_level(r, cfg.level_tol) and k < 8:
                    k += 1
                    t = ts[i] + h * 1e-3 * k
                    r = self.raw(t)
                ts[i] = t
            raws.append(r)
        # continue the phases, refining where any of them moves too far
        out_t, out_a = [ts[0]], [raws[0].astype(float)]
        budget = cfg.max_refine
        stack = list(zip(ts[1:], raws[1:]))[::-1]
        while stack:
            t, r = stack.pop()
            ta, a = out_t[-1], out_a[-1]
            cont = _match(a, r)
            if np.max(np.abs(cont - a)) <= cfg.max_step:
                out_t.append(t)
                out_a.append(cont)
                continue
            if t - ta < cfg.tau_bisect or budget <= 0:
                raise TraceResolutionError(
                    f"eigenphase moves more than {cfg.max_step:.3g} on [{ta!r}, {t!r}]")
            budget -= 1
            tm = 0.5 * (ta + t)
            stack.append((t, r))
            stack.append((tm, self.raw(tm)))
        return np.array(out_t), np.array(out_a)

    def continued(self, t: float, ref: np.ndarray) -> np.ndarray:
        return _match(ref, self.raw(t))

    def bisect(self, ta, tb, aa, k, level):
        """Bisect the crossing of eigenphase k through ``level``.

        Returns ``(t_star, phases_before, phases_after)``.
        """
        tau = self.cfg.tau_bisect
        a_ref, ga = aa, aa[k] - level
        while tb - ta > tau:
            tm = 0.5 * (ta + tb)
            am = self.continued(tm, a_ref)
            gm = am[k] - level
            if gm == 0.0:
                return tm, self.continued(tm - tau, a_ref), self.continued(tm + tau, am)
            if np.sign(gm) == np.sign(ga):
                ta, a_ref, ga = tm, am, gm
            else:
                tb = tm
        return 0.5 * (ta + tb), a_ref, self.continued(tb, a_ref)


def _levels(a: float, b: float):
    """Multiples of π strictly crossed going from a to b (at most one expected)."""
    lo, hi = min(a, b), max(a, b)
    k0, k1 = int(np.floor(lo / np.pi)) + 1, int(np.ceil(hi / np.pi)) - 1
    return [k * np.pi for k in range(k0, k1 + 1)]


def _kind(level: float) -> str:
    return WEYL if int(round(level / np.pi)) % 2 else CHORD_EVENT


def _scan(sampler: _Sampler, ts: np.ndarray, A: np.ndarray):
    """Bisected crossings as (t*, kind, direction, n_minus_before, n_minus_after)."""
    found = []
    n_int = len(ts) - 1
    for i in range(n_int):
        for k in range(A.shape[1]):
            a0, a1 = A[i, k], A[i + 1, k]
            for L in _levels(a0, a1):
                tm, aa, ab = sampler.bisect(ts[i], ts[i + 1], A[i], k, L)
                found.append((tm, _kind(L), 1 if a1 > a0 else -1, aa, ab))
    return found


def _boundary(A_end: np.ndarray, A_next: np.ndarray, tol: float):
    """Eigenphases sitting on a level at a range end, with the direction they leave in."""
    out = []
    for k in range(len(A_end)):
        r = wrap_phase(2.0 * A_end[k])
        if abs(r) < 2.0 * tol and abs(A_next[k] - A_end[k]) > tol:
            L = np.pi * round(A_end[k] / np.pi)
            d = 1 if A_next[k] > A_end[k] else -1
            out.append((_kind(L), d))
    return out


def _jump(kind: str, direction_sum: int) -> float:
    # increasing crossings add π/2 in both representations
    return 0.5 * np.pi * direction_sum


def _cluster(found, tau: float):
    events = []
    found = sorted(found, key=lambda f: (f[1], f[0]))
    i = 0
    while i < len(found):
        j = i + 1
        while j < len(found) and found[j][1] == found[i][1] and found[j][0] - found[j - 1][0] < 10 * tau:
            j += 1
        group = found[i:j]
        ts = [g[0] for g in group]
        t_star = float(np.mean(ts))
        kind = group[0][1]
        dsum = sum(g[2] for g in group)
        aa = group[0][3]
        ab = group[-1][4]
        events.append(CausticEvent(t_star, kind, len(group), _jump(kind, dsum),
                                   _n_minus(aa), _n_minus(ab)))
        i = j
    return events


def _detect(sampler: _Sampler, t0: float, t1: float):
    cfg = sampler.cfg
    ts, A = sampler.grid(t0, t1)
    events = _cluster(_scan(sampler, ts, A), cfg.tau_bisect)
    for t_end, a_end, a_next, sgn in ((ts[0], A[0], A[1], 1), (ts[-1], A[-1], A[-2], -1)):
        hits = _boundary(a_end, a_next, cfg.level_tol)
        for kd in (WEYL, CHORD_EVENT):
            ds = [d for (k2, d) in hits if k2 == kd]
            if not ds:
                continue
            # leaving the start (sgn=1) or entering the end (sgn=-1 flips direction)
            dsum = sum(d * sgn for d in ds)
            nm = _n_minus(a_next)
            half = 0.5 * _jump(kd, dsum)
            if sgn == 1:
                ev = CausticEvent(float(t_end), kd, len(ds), half, _n_minus(a_end), nm, True)
            else:
                ev = CausticEvent(float(t_end), kd, len(ds), half, nm, _n_minus(a_end), True)
            events.append(ev)
    events.sort(key=lambda e: (e.t_star, e.kind))
    weyl_t = [e.t_star for e in events if e.kind == WEYL]
    for e in events:
        if e.kind == CHORD_EVENT and any(abs(e.t_star - t) < 10 * cfg.tau_bisect for t in weyl_t):
            raise DegenerateFamilyError(f"Weyl and chord caustic coincide at t = {e.t_star!r}")
    return ts, A, events


def detect_caustics(m_of_t: Callable[[float], np.ndarray], t_range: Sequence[float],
                    cfg: TraceConfig = TraceConfig()) -> List[CausticEvent]:
    """All Weyl and chord caustics of ``t -> M(t)`` on ``[t0, t1]``.

    Interior roots are bisected to ``cfg.tau_bisect``.  Roots at the range
    ends carry ``boundary=True`` and a one-sided (half) jump.
    """
    t0, t1 = map(float, t_range)
    return _detect(_Sampler(m_of_t, cfg), t0, t1)[2]


@dataclass(frozen=True, eq=False)
class FamilyTrace:
    """Result of :func:`trace_family`; immutable after construction.

    ``phase_windings[i]`` is the Weyl winding at ``params[i]``; it is
    constant between Weyl events.  ``chord_windings[i]`` is the phase of the
    chord symbol, constant between chord events.  At a caustic the stored
    winding is the mean of its one-sided limits, which for a reflection is
    the phase of the delta symbol.
    """

    params: np.ndarray
    elements: tuple
    caustic_events: tuple
    representation_log: tuple
    phase_windings: np.ndarray
    chord_windings: np.ndarray
    m_of_t: Callable = field(repr=False)
    initial_winding: float = 0.0
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    @property
    def weyl_events(self):
        return [e for e in self.caustic_events if e.kind == WEYL]

    @property
    def chord_events(self):
        return [e for e in self.caustic_events if e.kind == CHORD_EVENT]

    def winding_at(self, t: float, tau: float = 1e-9) -> float:
        t0, t1 = self.params[0], self.params[-1]
        w = self.initial_winding
        for e in self.weyl_events:
            if e.boundary:
                if (e.t_star == t0 and t > t0 + tau) or (e.t_star == t1 and t >= t1 - tau):
                    w += e.theta_jump
            elif t > e.t_star + tau:
                w += e.theta_jump
            elif t >= e.t_star - tau:
                w += 0.5 * e.theta_jump
        return w

    def element_at(self, t: float) -> MetaplecticElement:
        if not self.params[0] <= t <= self.params[-1]:
            raise ValueError("t outside the traced range")
        return MetaplecticElement(self.m_of_t(t), self.winding_at(t), self.tol)

    def to_csv(self, fh=None) -> str:
        """Per-sample table; floats printed with 17 significant digits."""
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["t", "tr(M)", "det(I+M)", "det(I-M)", "sigma_B", "sigma_Btilde",
                     "phase_winding", "event_flag"])
        ev_t = {}
        for e in self.caustic_events:
            ev_t.setdefault(e.t_star, []).append(e.kind)
        for t, el, w in zip(self.params, self.elements, self.phase_windings):
            m = el.m
            eye = np.eye(m.shape[0])
            pair = el.cayley
            sb = "" if pair.centre is None else signature(pair.centre).sigma
            st = "" if pair.chord is None else signature(pair.chord).sigma
            wr.writerow([f"{t:.17g}", f"{np.trace(m):.17g}", f"{np.linalg.det(eye + m):.17g}",
                         f"{np.linalg.det(eye - m):.17g}", sb, st, f"{w:.17g}", ""])
        for t in sorted(ev_t):
            m = np.asarray(self.m_of_t(t), dtype=float)
            eye = np.eye(m.shape[0])
            wr.writerow([f"{t:.17g}", f"{np.trace(m):.17g}", f"{np.linalg.det(eye + m):.17g}",
                         f"{np.linalg.det(eye - m):.17g}", "", "", f"{self.winding_at(t):.17g}",
                         "+".join(ev_t[t])])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    def events_json(self) -> str:
        return json.dumps([e.to_dict() for e in self.caustic_events], indent=2)


def _initial_winding(initial, m0, tol) -> float:
    if initial is None:
        if np.linalg.det(np.eye(m0.shape[0]) + m0) < tol.caustic:
            raise ValueError("start is on a caustic or off the identity sheet; pass `initial`")
        return 0.0
    if isinstance(initial, MetaplecticElement):
        if np.max(np.abs(initial.m - m0)) > 1e-8 * (1 + np.max(np.abs(m0))):
            raise ValueError("initial.m does not match m_of_t(t0)")
        return initial.phase_winding
    w = float(initial)
    MetaplecticElement(m0, w, tol)
    return w


def trace_family(m_of_t: Callable[[float], np.ndarray], t_range: Sequence[float],
                 initial=None, cfg: TraceConfig = TraceConfig()) -> FamilyTrace:
    """Track the phase of the metaplectic element along ``t -> M(t)``.

    Parameters
    ----------
    m_of_t : callable
        Continuous family of symplectic matrices.
    t_range : (t0, t1)
        Parameter range, ``t0 < t1``.
    initial : MetaplecticElement or float, optional
        Element (or bare winding) at ``t0``.  Defaults to the identity sheet,
        which requires ``det(I + M(t0)) > 0``.
    cfg : TraceConfig

    Returns
    -------
    FamilyTrace
    """
    t0, t1 = map(float, t_range)
    if not t1 > t0:
        raise ValueError("t_range must be increasing")
    tol = cfg.tol
    m0 = np.asarray(m_of_t(t0), dtype=float)
    w0 = _initial_winding(initial, m0, tol)
    sampler = _Sampler(m_of_t, cfg)
    ts, A, events = _detect(sampler, t0, t1)

    trace_events = tuple(events)
    tmp = FamilyTrace(ts, (), trace_events, (), np.array([]), np.array([]), m_of_t, w0, tol)
    windings = np.array([tmp.winding_at(t, tau=cfg.tau_bisect) for t in ts])
    elements = tuple(MetaplecticElement(m_of_t(t), w, tol) for t, w in zip(ts, windings))

    # chord phase from the Weyl one: w + (π/4)σ(B) with strict signature,
    # which at a Weyl caustic reads (π/4)σ(B̃) and gives the midpoint value
    chord = []
    for el, a in zip(elements, A):
        pair = el.cayley
        if pair.centre is not None:
            s = signature(pair.centre, 0.0).sigma
        else:
            s = signature(pair.chord, 0.0).sigma
        chord.append(el.phase_winding + 0.25 * np.pi * s)
    log = []
    weyl_t = [e.t_star for e in events if e.kind == WEYL and not e.boundary]
    for a, b in zip(ts[:-1], ts[1:]):
        crossed = any(a < t < b for t in weyl_t)
        log.append(CHORD_CONTINUOUS if crossed else WEYL_CONTINUOUS)
    return FamilyTrace(ts, elements, trace_events, tuple(log), windings,
                       np.array(chord), m_of_t, w0, tol)
