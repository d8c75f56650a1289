"""Built-in example state families.

These are the families shipped as JSON under ``data/`` and used throughout
the test suite. They cover the interesting regimes:

* ``bell_pair``          two Bell states, N = 1, perfectly distinguishable
* ``three_bells``        three Bell states, N = 3, success bound 0
* ``product_pair``       |00> and |11>, N = 0, trivially distinguishable
* ``profile_family``     three states on C^4 (x) C^4 with N = 3 and common
                         Schmidt coefficients (0.4, 0.3, 0.2, 0.1), so the
                         conclusive success bound is 0.3
"""

from __future__ import annotations

import numpy as np

from .states import StateFamily, from_operator, make_family

_SQ2 = np.sqrt(2.0)


def bell_pair() -> StateFamily:
    phi_plus = np.array([1, 0, 0, 1], dtype=np.complex128) / _SQ2
    phi_minus = np.array([1, 0, 0, -1], dtype=np.complex128) / _SQ2
    return make_family(2, 2, [phi_plus, phi_minus], ["phi+", "phi-"])


def three_bells() -> StateFamily:
    phi_plus = np.array([1, 0, 0, 1], dtype=np.complex128) / _SQ2
    phi_minus = np.array([1, 0, 0, -1], dtype=np.complex128) / _SQ2
    psi_plus = np.array([0, 1, 1, 0], dtype=np.complex128) / _SQ2
    return make_family(2, 2, [phi_plus, phi_minus, psi_plus],
                       ["phi+", "phi-", "psi+"])


def product_pair() -> StateFamily:
    zero_zero = np.array([1, 0, 0, 0], dtype=np.complex128)
    one_one = np.array([0, 0, 0, 1], dtype=np.complex128)
    return make_family(2, 2, [zero_zero, one_one], ["00", "11"])


def profile_family() -> StateFamily:
    """Three C^4 (x) C^4 states sharing the profile (0.4, 0.3, 0.2, 0.1).

    The coefficient matrices are C^j D for j = 0, 1, 2 with D the diagonal
    of square-rooted probabilities and C the cyclic shift. Shifting keeps
    the singular values, the shifted diagonals have zero trace against D^2
    (orthonormality), and the cross products span exactly three traceless
    Hermitian directions.
    """
    probs = np.array([0.4, 0.3, 0.2, 0.1])
    d_mat = np.diag(np.sqrt(probs)).astype(np.complex128)
    shift = np.zeros((4, 4), dtype=np.complex128)
    for j in range(4):
        shift[(j + 1) % 4, j] = 1.0
    states = [from_operator(np.linalg.matrix_power(shift, j) @ d_mat)
              for j in range(3)]
    return make_family(4, 4, states, ["rot0", "rot1", "rot2"])


BUILTIN = {
    "two_bell": bell_pair,
    "three_bell": three_bells,
    "product_pair": product_pair,
    "c4_profile": profile_family,
}
