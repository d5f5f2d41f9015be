"""Integral kernel of the Dirichlet half-line free resolvent R(z), z = k^2.

Closed form: G(x, y; k) = sin(k min(x,y)) e^{i k max(x,y)} / k for Im k >= 0,
evaluated in the overflow-safe exponential form
    G = (e^{ik(x+y)} - e^{ik|x-y|}) / (2ik),
which makes the uniform bound |G| <= 1/|k| manifest.
"""

from __future__ import annotations

import numpy as np


def check_wavenumber(k: complex) -> complex:
    """Validate Im k >= 0 and k != 0; real k means the boundary value from above."""
    k = complex(k)
    if k == 0:
        raise ValueError("wavenumber k = 0 is not allowed")
    if k.imag < 0:
        raise ValueError(f"wavenumber must satisfy Im k >= 0, got {k}")
    return k


def kernel(k: complex, x, y):
    """Free resolvent kernel at z = k^2; symmetric in (x, y), zero at x = 0."""
    k = check_wavenumber(k)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("kernel arguments must be nonnegative")
    out = (np.exp(1j * k * (x + y)) - np.exp(1j * k * np.abs(x - y))) / (2j * k)
    return out if out.shape else complex(out)
