"""Metaplectic operators in the Weyl (centre) and chord representations.

Linear symplectic maps are encoded by their Cayley matrices; the quantum
operators above them carry a phase that is tracked continuously along
families, through caustics and through products.
"""
from .errors import *  # noqa: F401,F403
from .symplectic import (CENTRE, CHORD, DEFAULT_TOL, CayleyForm, CayleyPair,
                         N1Class, Signature, Tolerances, btilde_from_b,
                         b_from_btilde, cayley_angles, cayley_from_m,
                         centre_from_chord, check_symplectic, classify_n1,
                         endpoints_from_centre, flow, generating_values,
                         hyperbolic, is_symplectic, m_from_cayley, rotation,
                         shear, signature, symplectic_form)
from .symbols import (DEFAULT_CTX, METAPLECTIC_R, STANDARD_R, EvaluationContext,
                      GaussianSymbol, MetaplecticElement, chord_symbol,
                      fourier_chord_to_weyl, fourier_weyl_to_chord,
                      reflection_symbol, translation_symbol, weyl_symbol,
                      wrap_phase)
from .families import (elliptic_hyperbolic_factors, harmonic_chord_prefactor,
                       harmonic_element, harmonic_matrix, harmonic_weyl_prefactor,
                       inverted_element, reflected_hyperbolic_element)
from .tracking import (CausticEvent, FamilyTrace, TraceConfig, caustic_phase_jump,
                       chord_phase_jump, detect_caustics, trace_family)
from .products import (DoubleForm, OscillatorProduct, ProductCausticReport,
                       ProductResult, SignMap, delta_invariant, double_form,
                       find_product_caustic, oscillator_product,
                       product_metaplectic, product_sign_map,
                       product_with_reflection, product_with_translation,
                       reflect_element)
from .oracles import (FresnelResult, fine_path_composition_oracle,
                      fresnel_signature_oracle, quadrature_product_oracle,
                      regularized_limit_oracle)

__version__ = "0.1.0"
