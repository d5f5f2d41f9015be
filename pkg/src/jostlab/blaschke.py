"""Blaschke products over upper-half-plane zero sets and their power sums.

B(k) = prod_j (k - k_j)/(k - conj(k_j)) * k_j/|k_j|, unimodular on the real
axis and contractive in the upper half-plane.  The large-k expansion

    log B(k) = i*sum arg(k_j) - 2i S1/k - i S2/k^2 - (2i/3) S3/k^3 + O(k^-4),

with S_n = sum_j Im(k_j^n), feeds the trace identity.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ZeroSet:
    """Finitely many zeros in the open upper half-plane, with multiplicity."""

    zeros: tuple

    def __post_init__(self):
        zs = tuple(complex(z) for z in self.zeros)
        for z in zs:
            if z.imag <= 0:
                raise ValueError(f"zero {z} is not in the open upper half-plane")
        # stable evaluation order: ascending modulus
        object.__setattr__(self, "zeros", tuple(sorted(zs, key=abs)))

    @property
    def max_modulus(self) -> float:
        return max((abs(z) for z in self.zeros), default=0.0)

    def __len__(self):
        return len(self.zeros)


@dataclass(frozen=True)
class PowerSums:
    s1: float
    s2: float
    s3: float


def power_sums(zs: ZeroSet) -> PowerSums:
    """S_n = sum_j Im(k_j^n) for n = 1, 2, 3 (exact elementary sums)."""
    return PowerSums(
        s1=sum(z.imag for z in zs.zeros),
        s2=sum((z * z).imag for z in zs.zeros),
        s3=sum((z * z * z).imag for z in zs.zeros),
    )


def blaschke_eval(zs: ZeroSet, k: complex) -> complex:
    """Evaluate B(k) factor by factor in ascending-|k_j| order."""
    k = complex(k)
    out = 1.0 + 0j
    for z in zs.zeros:
        denom = k - z.conjugate()
        if abs(denom) < 1e-14:
            raise ValueError(f"evaluation point {k} too close to pole {z.conjugate()}")
        out *= (k - z) / denom * (z / abs(z))
    return out


def log_blaschke(zs: ZeroSet, k: complex) -> complex:
    """Sum of per-factor principal logs; avoids cancellation in the product.

    The imaginary part carries each factor's principal branch; callers that
    need a continuous argument along a path should unwrap (traceform does).
    """
    k = complex(k)
    out = 0j
    for z in zs.zeros:
        denom = k - z.conjugate()
        if abs(denom) < 1e-14:
            raise ValueError(f"evaluation point {k} too close to pole {z.conjugate()}")
        out += cmath.log((k - z) / denom) + 1j * cmath.phase(z)
    return out


def expansion(zs: ZeroSet, k: complex) -> complex:
    """Truncation of log B through order k^-3, with exact power-sum coefficients."""
    s = power_sums(zs)
    const = 1j * sum(cmath.phase(z) for z in zs.zeros)
    return const - 2j * s.s1 / k - 1j * s.s2 / k**2 - 2j * s.s3 / (3 * k**3)


def expansion_remainder_bound(zs: ZeroSet, k: complex) -> float:
    """Bound 2 sum_j r^4/(1-r), r = |k_j|/|k|, on |log B - expansion|."""
    total = 0.0
    for z in zs.zeros:
        r = abs(z) / abs(k)
        if r >= 1:
            return float("inf")
        total += 2 * r**4 / (1 - r)
    return total
