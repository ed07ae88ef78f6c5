"""Products of metaplectic operators.

The phase of U2 U1 is the sum of the factor phases plus
Theta = pi (N - N-/2), where N- counts the negative eigenvalues of the
4N x 4N matrix [[B1, -J], [J, B2]].  Delta = det(I + J B2 J B1) vanishes
exactly when the product lands on a caustic.
"""
import numpy as np

from metaplectic import (elliptic_hyperbolic_factors, find_product_caustic,
                         harmonic_element, oscillator_product, product_metaplectic,
                         product_sign_map, reflect_element)
from metaplectic.errors import ProductCausticError

print("two harmonic factors: rotations add, phases follow the continuous sheet")
for a1, a2 in [(1.0, 1.5), (2.5, 2.5)]:
    res = product_metaplectic(harmonic_element(a2), harmonic_element(a1))
    print(f"  {a1} + {a2}: Theta = {res.theta / np.pi:+.1f} pi, Delta = {res.delta:.4f}, "
          f"winding {res.element.phase_winding / np.pi:+.2f} pi")

print("\nelliptic x hyperbolic family: the product caustic at gamma omega = 1")
for g in (0.3, 0.7):
    e1, e2 = elliptic_hyperbolic_factors(2.0, g)
    res = product_metaplectic(e2, e1)
    print(f"  gamma = {g}: Theta = {res.theta / np.pi:+.2f} pi, Delta = {res.delta:+.4f}")
rep = find_product_caustic(lambda g: elliptic_hyperbolic_factors(2.0, g)[::-1], 0.2, 0.9)
print(f"  root gamma = {rep.param}, tr M + 2 = {rep.trace_plus_2:.1e}, "
      f"{rep.class_before.value} -> {rep.class_after.value}")
try:
    product_metaplectic(*elliptic_hyperbolic_factors(2.0, rep.param)[::-1])
except ProductCausticError as exc:
    print("  at the root:", exc)

print("\nLoschmidt echo: forward with w, back with -w + 1e-3")
# an even number of times straddles pi without landing on the factor caustic
for t in np.linspace(0.95 * np.pi, 1.05 * np.pi, 6):
    op = oscillator_product(1.0, -1.0 + 1e-3, t)
    print(f"  w t = {t / np.pi:.3f} pi  sign {op.sign:+d}  case {op.case}")

sm = product_sign_map(256)
print(f"\nsign map 256 x 256: {int(np.sum(sm.sign < 0))} negative cells, "
      f"{int(np.sum(sm.sign == 0))} on the caustic lines")

e = reflect_element(harmonic_element(1.0))
print(f"\nR' U(1.0) has winding {e.phase_winding / np.pi:+.2f} pi, "
      f"same as U(1 + pi): {harmonic_element(1.0 + np.pi).phase_winding / np.pi:+.2f} pi")
