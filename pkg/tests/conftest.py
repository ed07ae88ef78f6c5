import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from metaplectic import CayleyForm, MetaplecticElement, m_from_cayley, symplectic_form


def random_symmetric(rng, d, scale=1.0):
    a = rng.normal(size=(d, d)) * scale
    return 0.5 * (a + a.T)


def element_from_b(b, tol=None):
    """Causticless element over the centre form ``b``, on the identity sheet."""
    b = np.asarray(b, dtype=float)
    m = m_from_cayley(CayleyForm(b))
    d = np.linalg.det(np.eye(len(b)) + m)
    w = 0.0 if d > 0 else 0.5 * np.pi
    return MetaplecticElement(m, w) if tol is None else MetaplecticElement(m, w, tol)


def valid_centre(b, margin=1e-2):
    """True when JB keeps away from the eigenvalue -1 (M off the Weyl caustic)."""
    b = np.asarray(b, dtype=float)
    J = symplectic_form(len(b) // 2)
    return bool(np.min(np.abs(np.linalg.eigvals(J @ b) + 1.0)) > margin)


def direct_sum(a, b):
    """Embed two 2x2 blocks into (p1, p2, q1, q2) ordering."""
    m = np.zeros((4, 4))
    ia, ib = [0, 2], [1, 3]
    m[np.ix_(ia, ia)] = a
    m[np.ix_(ib, ib)] = b
    return m


def phase_dist(a, b):
    return abs(np.angle(np.exp(1j * (a - b))))


def symmetric_matrices(n_max=2, bound=3.0):
    """Hypothesis strategy for 2N x 2N symmetric matrices, N <= n_max."""
    elems = st.floats(-bound, bound, allow_nan=False, allow_infinity=False)

    def build(n):
        return arrays(np.float64, (2 * n, 2 * n), elements=elems).map(lambda a: 0.5 * (a + a.T))

    return st.integers(1, n_max).flatmap(build)


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)
