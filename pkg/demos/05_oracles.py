"""The brute-force validators side by side with the closed-form rules."""
import numpy as np

from metaplectic import (fresnel_signature_oracle, harmonic_element, product_metaplectic,
                         quadrature_product_oracle, regularized_limit_oracle, signature,
                         weyl_symbol)

rng = np.random.default_rng(1)
a = rng.normal(size=(4, 4))
a = a + a.T
print("Gaussian phase of a random 4 x 4 form")
print(f"  (pi/4) sigma        {0.25 * np.pi * signature(a).sigma:+.10f}")
print(f"  eigendecomposition  {fresnel_signature_oracle(a).phase:+.10f}")
print(f"  eps -> 0 limit      {regularized_limit_oracle(a).phase:+.10f}")

# product of two harmonic propagators, by damped quadrature on a 512 x 512 grid
e1, e2 = harmonic_element(0.8), harmonic_element(1.1)
sym = product_metaplectic(e2, e1).symbol
h = np.sqrt(np.pi / 512)
pts = np.array([[0, 0], [4, -3], [-6, 2]]) * h
quad = quadrature_product_oracle(weyl_symbol(e2), weyl_symbol(e1), pts)
print("\nproduct symbol vs quadrature")
for x, q, s in zip(pts, quad, sym.evaluate(pts)):
    print(f"  x = ({x[0]:+.3f}, {x[1]:+.3f}): {q:.6f}  {s:.6f}")
