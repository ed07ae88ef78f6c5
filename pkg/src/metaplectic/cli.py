"""Command line scenario runner.

Usage::

    python -m metaplectic --config scenario.json [--command trace] [--out f.csv] ...

The config file is JSON.  Command line flags override the matching keys.
Output goes to ``--out`` (or stdout) as CSV or JSON.  Exit codes: 0 on
success, 2 for configuration errors, 3 for numerical errors; on failure a
one-line JSON error record is written to stderr.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from .errors import FactorCausticError, MetaplecticError
from .families import elliptic_hyperbolic_factors
from .oracles import (fine_path_composition_oracle, fresnel_signature_oracle,
                      regularized_limit_oracle)
from .products import oscillator_product, product_metaplectic, product_sign_map
from .symbols import EvaluationContext, MetaplecticElement
from .symplectic import (DEFAULT_TOL, classify_n1, flow, hyperbolic, rotation,
                         signature, cayley_from_m)
from .tracking import TraceConfig, trace_family

COMMANDS = ("classify", "trace", "product", "figure1", "figure2", "echo", "oracle-audit")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    command: str
    hbar: float = 1.0
    tolerances: Dict[str, float] = field(default_factory=dict)
    output_path: Optional[str] = None
    format: str = "csv"
    grid: Optional[int] = None
    range: Optional[List[float]] = None
    steps: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        known = {f.name for f in dataclasses.fields(cls)}
        params = dict(d.pop("params", {}))
        params.update({k: d.pop(k) for k in list(d) if k not in known})
        if "command" not in d:
            raise ConfigError("missing 'command'")
        cfg = cls(params=params, **d)
        cfg.validate()
        return cfg

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if not (isinstance(self.hbar, (int, float)) and self.hbar > 0):
            raise ConfigError("hbar must be positive")
        for k, v in self.tolerances.items():
            if k not in {f.name for f in dataclasses.fields(DEFAULT_TOL)}:
                raise ConfigError(f"unknown tolerance {k!r}")
            if not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"tolerance {k!r} must be positive")
        if self.range is not None and (len(self.range) != 2 or not self.range[1] > self.range[0]):
            raise ConfigError("range must be [lo, hi] with hi > lo")
        if self.grid is not None and int(self.grid) < 2:
            raise ConfigError("grid must be at least 2")
        if self.steps is not None and int(self.steps) < 1:
            raise ConfigError("steps must be positive")

    @property
    def ctx(self) -> EvaluationContext:
        return EvaluationContext(self.hbar, dataclasses.replace(DEFAULT_TOL, **self.tolerances))


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _table(header, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, (_jsonable(v) for v in r))) for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def _matrix(v, name) -> np.ndarray:
    try:
        m = np.array(v, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} is not a numeric matrix") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise ConfigError(f"{name} must be a 2N x 2N matrix")
    return m


# ---- commands --------------------------------------------------------------

def run_classify(cfg: ScenarioConfig) -> str:
    mats = cfg.params.get("matrices")
    if not mats:
        raise ConfigError("classify needs 'matrices'")
    rows = []
    for k, m in enumerate(mats):
        m = _matrix(m, f"matrices[{k}]")
        eye = np.eye(m.shape[0])
        pair = cayley_from_m(m, cfg.ctx.tol)
        form = pair.centre if pair.centre is not None else pair.chord
        tag = classify_n1(m, cfg.ctx.tol).value if m.shape[0] == 2 else ""
        rows.append((k, np.trace(m), np.linalg.det(eye + m), np.linalg.det(eye - m),
                     signature(form).sigma, tag))
    return _table(["index", "tr_M", "det_I_plus_M", "det_I_minus_M", "sigma", "class_tag"],
                  rows, cfg.format)


def _family(cfg: ScenarioConfig):
    fam = cfg.params.get("family", "harmonic")
    omega = float(cfg.params.get("omega", 1.0))
    if fam == "harmonic":
        return lambda t: rotation(omega * t), None
    if fam == "inverted":
        return lambda t: hyperbolic(omega * t), None
    if fam == "flow":
        h = _matrix(cfg.params.get("h"), "h")
        m1 = _matrix(cfg.params.get("m1", np.eye(h.shape[0]).tolist()), "m1")
        w1 = float(cfg.params.get("initial_winding", 0.0))
        return lambda t: flow(h, t) @ m1, w1
    raise ConfigError(f"unknown family {fam!r}")


def run_trace(cfg: ScenarioConfig) -> str:
    m_of_t, w0 = _family(cfg)
    lo, hi = cfg.range or [0.0, 4 * np.pi]
    tc = TraceConfig(samples=int(cfg.steps or 256), tol=cfg.ctx.tol)
    initial = None
    if w0 is not None:
        initial = MetaplecticElement(m_of_t(lo), w0, cfg.ctx.tol)
    tr = trace_family(m_of_t, (lo, hi), initial, tc)
    if cfg.format == "json":
        return json.dumps({"events": [e.to_dict() for e in tr.caustic_events],
                           "final_winding": tr.phase_windings[-1],
                           "final_sign": tr.elements[-1].sign()}, indent=1) + "\n"
    return tr.to_csv()


def run_product(cfg: ScenarioConfig) -> str:
    p = cfg.params
    if p.get("family") == "elliptic_hyperbolic":
        e1, e2 = elliptic_hyperbolic_factors(float(p.get("omega", 1.0)), float(p["gamma"]))
    else:
        fac = p.get("factors")
        if not fac or len(fac) != 2:
            raise ConfigError("product needs two 'factors' (e1 first) or family=elliptic_hyperbolic")
        e1, e2 = (MetaplecticElement(_matrix(f["m"], "m"), float(f.get("phase_winding", 0.0)),
                                     cfg.ctx.tol) for f in fac)
    res = product_metaplectic(e2, e1, cfg.ctx)
    rec = {"m": res.element.m.tolist(), "phase_winding": res.element.phase_winding,
           "delta": res.delta, "theta": res.theta, "n_minus": res.n_minus,
           "sign": res.element.sign()}
    if cfg.format == "json":
        return json.dumps(rec, indent=1) + "\n"
    return _table(["phase_winding", "delta", "theta", "n_minus", "sign"],
                  [(rec["phase_winding"], rec["delta"], rec["theta"], rec["n_minus"],
                    "" if rec["sign"] is None else rec["sign"])], "csv")


def _figure1_rep(tr: float) -> np.ndarray:
    if abs(tr) < 2:
        return rotation(np.arccos(tr / 2))
    if tr >= 2:
        return hyperbolic(np.arccosh(tr / 2)) if tr > 2 else np.eye(2)
    return -hyperbolic(np.arccosh(-tr / 2)) if tr < -2 else -np.eye(2)


def run_figure1(cfg: ScenarioConfig) -> str:
    lo, hi = cfg.range or [-4.0, 4.0]
    n = int(cfg.grid or 161)
    rows = []
    for tr in np.linspace(lo, hi, n):
        tr = float(np.round(tr, 12))
        det_b = np.inf if tr == -2 else (2 - tr) / (2 + tr)
        m = _figure1_rep(tr)
        tag = classify_n1(m, cfg.ctx.tol).value
        if tag == "identity":
            tag = "parabolic_boundary"
        rows.append((tr, det_b, tag))
    return _table(["tr_M", "det_B", "class_tag"], rows, cfg.format)


def run_figure2(cfg: ScenarioConfig) -> str:
    lo, hi = cfg.range or [0.0, 4 * np.pi]
    if lo != 0:
        raise ConfigError("figure2 grids start at 0")
    sm = product_sign_map(int(cfg.grid or 256), hi, cfg.ctx)
    if cfg.format == "json":
        return _table(["omega1_t", "omega2_t", "theta", "sign", "region_tag"], list(sm.rows()), "json")
    return sm.to_csv()


def run_echo(cfg: ScenarioConfig) -> str:
    p = cfg.params
    w1 = float(p.get("omega1", 1.0))
    w2 = float(p.get("omega2", -w1 + float(p.get("epsilon", 1e-3))))
    lo, hi = cfg.range or [0.9 * np.pi, 1.1 * np.pi]
    rows = []
    for t in np.linspace(lo, hi, int(cfg.steps or 50)):
        try:
            op = oscillator_product(w1, w2, t, cfg.ctx)
        except FactorCausticError:
            # a factor sits on its own caustic at this time: no value
            rows.append((t, w1 * t, w2 * t, "", "", ""))
            continue
        rows.append((t, w1 * t, w2 * t, op.result.theta, op.delta_root, op.sign))
    return _table(["t", "omega1_t", "omega2_t", "theta", "delta_root", "sign"], rows, cfg.format)


def run_oracle_audit(cfg: ScenarioConfig) -> str:
    rng = np.random.default_rng(int(cfg.params.get("seed", 0)))
    n = int(cfg.steps or 200)
    ctx = cfg.ctx
    bad = 0
    worst = 0.0
    for k in range(n):
        d = 2 if k % 2 else 4
        a = rng.normal(size=(d, d))
        a = a + a.T
        ref = 0.25 * np.pi * signature(a, 0.0).sigma
        f = fresnel_signature_oracle(a, ctx)
        r = regularized_limit_oracle(a, ctx)
        err = max(abs(f.phase - ref), abs(r.phase - ref))
        worst = max(worst, err)
        bad += err > 1e-6
    # harmonic double cover against the step-composition oracle
    tr = trace_family(lambda t: rotation(t), (0.0, 3.5 * np.pi), None, TraceConfig(tol=ctx.tol))
    fp = fine_path_composition_oracle(np.eye(2), 3.5 * np.pi, 2048, ctx)
    dphi = abs(np.angle(np.exp(1j * (tr.phase_windings[-1] - fp.phase_winding))))
    rec = {"signature_samples": n, "signature_disagreements": int(bad),
           "worst_phase_error": worst, "trace_vs_fine_path_error": float(dphi),
           "disagreements": int(bad) + int(dphi > 1e-6)}
    if cfg.format == "csv":
        return _table(list(rec), [tuple(rec.values())], "csv")
    return json.dumps(rec, indent=1) + "\n"


RUNNERS = {"classify": run_classify, "trace": run_trace, "product": run_product,
           "figure1": run_figure1, "figure2": run_figure2, "echo": run_echo,
           "oracle-audit": run_oracle_audit}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="python -m metaplectic", description=__doc__.split("\n")[0])
    ap.add_argument("--config", help="JSON scenario file")
    ap.add_argument("--command", choices=COMMANDS)
    ap.add_argument("--hbar", type=float)
    ap.add_argument("--grid", type=int)
    ap.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"))
    ap.add_argument("--steps", type=int)
    ap.add_argument("--out", help="output file (default stdout)")
    ap.add_argument("--format", choices=FORMATS)
    ap.add_argument("--tol-caustic", type=float)
    ap.add_argument("--tol-eig", type=float)
    return ap


def load_config(args) -> ScenarioConfig:
    d: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
    for key in ("command", "hbar", "grid", "steps", "format"):
        v = getattr(args, key)
        if v is not None:
            d[key] = v
    if args.range is not None:
        d["range"] = list(args.range)
    if args.out is not None:
        d["output_path"] = args.out
    tol = dict(d.get("tolerances", {}))
    if args.tol_caustic is not None:
        tol["caustic"] = args.tol_caustic
    if args.tol_eig is not None:
        tol["eig"] = args.tol_eig
    d["tolerances"] = tol
    try:
        return ScenarioConfig.from_dict(d)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                 "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        return _fail(2, exc)
    try:
        text = RUNNERS[cfg.command](cfg)
    except (MetaplecticError, np.linalg.LinAlgError, FloatingPointError) as exc:
        return _fail(3, exc)
    except (ConfigError, KeyError, TypeError, ValueError) as exc:
        # bad values inside an otherwise readable config
        return _fail(2, exc)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0
