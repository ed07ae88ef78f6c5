"""Weyl and chord symbols of the harmonic oscillator.

The Weyl propagator at time t is exp(-i tan(wt/2) x.x / hbar) / cos(wt/2);
the chord propagator is -i/(2 sin(wt/2)) exp(...).  The two are related by
a symplectic Fourier transform that adds (pi/4) sigma(B) to the phase.
"""
import numpy as np

from metaplectic import (EvaluationContext, chord_symbol, fourier_weyl_to_chord,
                         harmonic_element, weyl_symbol)

ctx = EvaluationContext(hbar=0.5)
for angle in (0.5, 2.0, 2.9):
    e = harmonic_element(angle)
    w, c = weyl_symbol(e, ctx), chord_symbol(e, ctx)
    f = fourier_weyl_to_chord(w, ctx)
    print(f"wt = {angle}:")
    print(f"  Weyl prefactor  {w.prefactor:.6f}   (1/cos = {1 / np.cos(angle / 2):.6f})")
    print(f"  chord prefactor {c.prefactor:.6f}   (-i/(2 sin) = {-0.5j / np.sin(angle / 2):.6f})")
    print(f"  Fourier of Weyl matches chord: {np.isclose(f.prefactor, c.prefactor)}")
    print(f"  U(x) at x = (0.3, 0.1): {w.evaluate([0.3, 0.1]):.6f}")

# at half a period the Weyl symbol is a delta (the reflection), the chord symbol is flat
e = harmonic_element(np.pi)
d = weyl_symbol(e, ctx)
print(f"\nwt = pi: delta symbol, prefactor {d.prefactor:.6f} = -i pi hbar")
print(f"         chord prefactor {chord_symbol(e, ctx).prefactor:.6f}")
