"""Tracking the metaplectic phase through caustics.

Following the harmonic oscillator for two full periods returns the matrix
to the identity twice, but the operator only once: at wt = 2 pi the Weyl
symbol is -1, at 4 pi it is +1.  Each half period is a Weyl caustic where
the phase jumps by -pi.
"""
import numpy as np

from metaplectic import (elliptic_hyperbolic_factors, fine_path_composition_oracle,
                         rotation, trace_family, weyl_symbol)

tr = trace_family(rotation, (0.0, 4 * np.pi))
print("caustic events of the harmonic family on [0, 4 pi]")
for ev in tr.caustic_events:
    tag = " (range end)" if ev.boundary else ""
    print(f"  t = {ev.t_star / np.pi:.6f} pi  {ev.kind:5s}  jump {ev.theta_jump / np.pi:+.2f} pi"
          f"  degeneracy {ev.degeneracy}{tag}")
for t in (2 * np.pi, 4 * np.pi):
    print(f"Weyl symbol at {t / np.pi:.0f} pi: {weyl_symbol(tr.element_at(t)).prefactor.real:+.6f}")

# the same sheet, built by composing many small steps instead
fp = fine_path_composition_oracle(np.eye(2), 2 * np.pi, 2000)
print("step-composition check at 2 pi: sign", fp.sign())

# a caustic with a quarter-turn jump: elliptic times hyperbolic factor
def product_matrix(gamma):
    e1, e2 = elliptic_hyperbolic_factors(2.0, gamma)
    return e2.m @ e1.m

tr = trace_family(product_matrix, (0.2, 0.9))
(ev,) = tr.weyl_events
print(f"\nelliptic x hyperbolic: caustic at gamma = {ev.t_star:.9f}, "
      f"jump {ev.theta_jump / np.pi:+.2f} pi, N- {ev.n_minus_before} -> {ev.n_minus_after}")
print(tr.to_csv().split("\n")[0])
