"""Cayley matrices and the one-freedom classification.

A symplectic matrix M is encoded by its centre Cayley matrix B (defined
while det(I + M) != 0) or by its chord Cayley matrix Bt (while
det(I - M) != 0).  For one degree of freedom the trace of M decides the
type of the map, and det B = (2 - tr M)/(2 + tr M).
"""
import numpy as np

from metaplectic import (btilde_from_b, cayley_from_m, classify_n1, flow, hyperbolic,
                         rotation, shear, signature)

print("harmonic rotation by 1 rad")
pair = cayley_from_m(rotation(1.0))
print("  B  =", np.round(pair.centre.b, 6).tolist(), " (-tan(1/2) I)")
print("  Bt =", np.round(pair.chord.b, 6).tolist(), " (eigenvalues are 1/eig B)")
print("  Bt from B agrees:", np.allclose(btilde_from_b(pair.centre).b, pair.chord.b))

print("\ncaustics show up as a missing form")
for name, m in [("identity", np.eye(2)), ("reflection -I", -np.eye(2)),
                ("-shear", -shear(0.5))]:
    pair = cayley_from_m(m)
    print(f"  {name:13s} centre: {'-' if pair.centre is None else 'ok'}"
          f"  chord: {'-' if pair.chord is None else 'ok'}")

print("\nclassification by trace")
for name, m in [("rotation", rotation(2.0)), ("shear", shear(0.3)),
                ("hyperbolic", hyperbolic(0.8)), ("-hyperbolic", -hyperbolic(0.8)),
                ("-I", -np.eye(2))]:
    tr = np.trace(m)
    det_b = (2 - tr) / (2 + tr) if abs(tr + 2) > 1e-12 else np.inf
    print(f"  {name:12s} tr M = {tr:+.3f}  det B = {det_b:+.3f}  -> {classify_n1(m).value}")

print("\na two-freedom flow and the signature of its Cayley matrix")
h = np.diag([1.0, 1.0, 1.0, 4.0])  # frequencies 1 and 2
for t in (0.5, 2.0, 3.5):
    b = cayley_from_m(flow(h, t)).centre
    print(f"  t = {t}: sigma(B) = {signature(b).sigma:+d}")
