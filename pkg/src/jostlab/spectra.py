"""Zeros of a(k) in the upper half-plane: eigenvalues lambda = k^2.

Counting uses the argument principle on rectangle boundaries with adaptive
sampling (every accepted argument step < pi/2); location uses recursive
quadrisection driven by the counts, then Newton polishing with a
difference-quotient derivative and a Muller fallback.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import jost
from . import potential as pot


class BoundaryZeroError(RuntimeError):
    """A zero (or near-zero) of the function sits on the sampling boundary."""


@dataclass(frozen=True)
class SpectralPoint:
    k: complex
    lam: complex
    residual: float
    multiplicity: int


@dataclass(frozen=True)
class SearchRegion:
    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float

    def __post_init__(self):
        if self.im_lo <= 0:
            raise ValueError("search region must stay in the open upper half-plane")
        if self.re_hi <= self.re_lo or self.im_hi <= self.im_lo:
            raise ValueError("degenerate search region")

    @property
    def diameter(self) -> float:
        return math.hypot(self.re_hi - self.re_lo, self.im_hi - self.im_lo)

    def corners(self):
        return (
            complex(self.re_lo, self.im_lo),
            complex(self.re_hi, self.im_lo),
            complex(self.re_hi, self.im_hi),
            complex(self.re_lo, self.im_hi),
        )

    def split(self):
        # slightly irrational split ratios: symmetric regions would otherwise
        # put cut lines exactly through imaginary-axis zeros (real potentials),
        # letting adjacent boxes double-count them
        rm = self.re_lo + 0.5136821 * (self.re_hi - self.re_lo)
        im = self.im_lo + 0.4863179 * (self.im_hi - self.im_lo)
        return (
            SearchRegion(self.re_lo, rm, self.im_lo, im),
            SearchRegion(rm, self.re_hi, self.im_lo, im),
            SearchRegion(self.re_lo, rm, im, self.im_hi),
            SearchRegion(rm, self.re_hi, im, self.im_hi),
        )

    def contains(self, k: complex, pad: float = 0.0) -> bool:
        return (
            self.re_lo - pad <= k.real <= self.re_hi + pad
            and self.im_lo - pad <= k.imag <= self.im_hi + pad
        )


def default_region(spec) -> SearchRegion:
    """Rectangle covering the disk |k| <= int|V| (where all zeros live),
    with a 10% margin and a tiny real-axis standoff."""
    m1 = spec.l1()
    if m1 == 0:
        return SearchRegion(-1.0, 1.0, 1e-6, 1.0)
    delta = 1e-6 * max(2 * m1, 1.0)
    hi = 1.1 * m1
    return SearchRegion(-hi, hi, delta, hi)


def _argument_change(f, box: SearchRegion, zero_tol: float = 1e-12):
    """Total continuous argument change of f around the box boundary (CCW)."""
    c = box.corners()
    corners = [c[0], c[1], c[2], c[3], c[0]]
    perim_scale = 2 ** -16

    total = 0.0
    for z0, z1 in zip(corners, corners[1:]):
        # adaptive sampling on this edge, parameter t in [0, 1]
        ts = list(np.linspace(0.0, 1.0, 9))
        vals = {t: f(z0 + (z1 - z0) * t) for t in ts}
        for t in ts:
            if abs(vals[t]) < zero_tol:
                raise BoundaryZeroError(f"|f|={abs(vals[t]):.1e} at {z0 + (z1-z0)*t}")
        i = 0
        while i < len(ts) - 1:
            a, b = ts[i], ts[i + 1]
            ratio = vals[b] / vals[a]
            dphi = cmath.phase(ratio)
            # a large modulus swing flags a nearby zero whose full phase
            # rotation could alias to a small step; refine on it too
            if abs(dphi) < 0.5 * math.pi and 0.5 <= abs(ratio) <= 2.0:
                total += dphi
                i += 1
                continue
            if b - a < perim_scale:
                if abs(dphi) < 0.5 * math.pi:
                    total += dphi  # genuine sharp modulus dip, phase resolved
                    i += 1
                    continue
                raise BoundaryZeroError(
                    f"argument jump {dphi:.2f} persists at minimum step near "
                    f"{z0 + (z1 - z0) * a}"
                )
            mid = 0.5 * (a + b)
            v = f(z0 + (z1 - z0) * mid)
            if abs(v) < zero_tol:
                raise BoundaryZeroError(f"|f|={abs(v):.1e} at {z0 + (z1-z0)*mid}")
            vals[mid] = v
            ts.insert(i + 1, mid)
    return total


def _winding(f, box: SearchRegion, retries: int = 5) -> int:
    """Winding number with boundary-zero perturbation retries."""
    for attempt in range(retries + 1):
        try:
            total = _argument_change(f, box)
        except BoundaryZeroError:
            if attempt == retries:
                raise
            pad = (1 + attempt) * 1e-3 * box.diameter
            box = SearchRegion(
                box.re_lo - pad,
                box.re_hi + pad,
                max(box.im_lo - pad, 0.3 * box.im_lo),
                box.im_hi + pad,
            )
            continue
        w = total / (2 * math.pi)
        if abs(w - round(w)) > 0.25:
            warnings.warn(f"non-integer winding {w:.3f} on {box}; treating as round")
        return int(round(w))
    raise AssertionError("unreachable")


def winding_number(spec, box: SearchRegion, evaluator=None) -> int:
    """Argument-principle count of zeros of a(k) inside the box."""
    if evaluator is None:
        evaluator = jost.make_evaluator(spec, x_max=pot.spectral_cutoff(spec))
    return _winding(evaluator, box)


def _derivative(f, k: complex) -> complex:
    h = 1e-6 * (1 + abs(k))
    return (f(k + h) - f(k - h)) / (2 * h)


def _newton(f, k0: complex, residual_tol: float, max_iter: int = 60, trust: float = 1.0):
    k = k0
    for _ in range(max_iter):
        if k.imag <= 0 or abs(k - k0) > trust:
            return None  # left the domain where f is meaningful
        fk = f(k)
        d = _derivative(f, k)
        if d == 0:
            break
        step = fk / d
        k = k - step
        if abs(step) < 1e-12 * (1 + abs(k)):
            break
    if k.imag <= 0 or abs(k - k0) > trust:
        return None
    return k if abs(f(k)) <= residual_tol else None


def _muller(f, k0: complex, residual_tol: float, max_iter: int = 60, trust: float = 1.0):
    h = 1e-3 * (1 + abs(k0))
    xs = [k0 - h, k0 + h, k0]
    fs = [f(x) for x in xs]
    for _ in range(max_iter):
        x0, x1, x2 = xs
        f0, f1, f2 = fs
        q = (x2 - x1) / (x1 - x0) if x1 != x0 else 1.0
        A = q * f2 - q * (1 + q) * f1 + q * q * f0
        B = (2 * q + 1) * f2 - (1 + q) ** 2 * f1 + q * q * f0
        C = (1 + q) * f2
        disc = cmath.sqrt(B * B - 4 * A * C)
        denom = B + disc if abs(B + disc) > abs(B - disc) else B - disc
        if denom == 0:
            break
        x3 = x2 - (x2 - x1) * 2 * C / denom
        if x3.imag <= 0 or abs(x3 - k0) > trust:
            return None
        xs = [x1, x2, x3]
        fs = [f1, f2, f(x3)]
        if abs(fs[-1]) <= residual_tol and abs(x3 - x2) < 1e-11 * (1 + abs(x3)):
            return x3
    return xs[-1] if abs(fs[-1]) <= residual_tol else None


def find_spectrum(
    spec,
    region: SearchRegion | None = None,
    evaluator=None,
    residual_tol: float = 1e-10,
    min_box: float = 1e-7,
) -> list[SpectralPoint]:
    """All zeros of a(k) in the search region, polished and deduplicated.

    Quadrisection drops winding-0 boxes; a winding-1 box is polished by
    Newton (Muller fallback) launched from its center, and subdivided if the
    polished root escapes the box.  Unresolvable clusters below min_box are
    reported with their winding as multiplicity.
    """
    if region is None:
        region = default_region(spec)
    if evaluator is None:
        # a fixed truncation keeps the map analytic in k, which the winding
        # counts rely on; zeros in the open upper half-plane are insensitive
        # to the discarded tail (eigenfunctions decay exponentially)
        evaluator = jost.make_evaluator(spec, x_max=pot.spectral_cutoff(spec))
    f = evaluator
    found: list[SpectralPoint] = []
    cluster_scale = 100 * min_box
    stack = [region]
    while stack:
        box = stack.pop()
        try:
            w = _winding(f, box)
        except BoundaryZeroError:
            # a tiny box whose boundary cannot clear |f| > 0 is sitting on a
            # multiple zero; count it on an inflated contour instead
            if box.diameter > cluster_scale:
                raise
            center = complex(
                0.5 * (box.re_lo + box.re_hi), 0.5 * (box.im_lo + box.im_hi)
            )
            if any(abs(s.k - center) < 2 * cluster_scale for s in found):
                continue
            big = SearchRegion(
                center.real - cluster_scale,
                center.real + cluster_scale,
                max(center.imag - cluster_scale, 0.5 * box.im_lo),
                center.imag + cluster_scale,
            )
            w = _winding(f, big)
            if w == 0:
                continue
            warnings.warn(
                f"zero cluster of winding {w} near {center}; "
                "reporting as a multiple zero"
            )
            found.append(
                SpectralPoint(
                    k=center, lam=center * center, residual=abs(f(center)),
                    multiplicity=w,
                )
            )
            continue
        if w == 0:
            continue
        if w == 1:
            center = complex(
                0.5 * (box.re_lo + box.re_hi), 0.5 * (box.im_lo + box.im_hi)
            )
            trust = 2.0 * box.diameter
            root = _newton(f, center, residual_tol, trust=trust)
            if root is None:
                root = _muller(f, center, residual_tol, trust=trust)
            if (
                root is not None
                and root.imag > 0
                and box.contains(root, pad=1e-9 * (1 + box.diameter))
            ):
                found.append(
                    SpectralPoint(
                        k=root, lam=root * root, residual=abs(f(root)), multiplicity=1
                    )
                )
                continue
        if box.diameter < min_box:
            center = complex(
                0.5 * (box.re_lo + box.re_hi), 0.5 * (box.im_lo + box.im_hi)
            )
            warnings.warn(
                f"unresolved zero cluster of winding {w} near {center}; "
                "reporting as a multiple zero"
            )
            found.append(
                SpectralPoint(
                    k=center, lam=center * center, residual=abs(f(center)), multiplicity=w
                )
            )
            continue
        stack.extend(box.split())

    # merge coincident polished roots
    found.sort(key=lambda s: (s.k.real, s.k.imag))
    merged: list[SpectralPoint] = []
    for s in found:
        if merged and abs(merged[-1].k - s.k) < 1e-7:
            prev = merged[-1]
            merged[-1] = SpectralPoint(
                k=prev.k,
                lam=prev.lam,
                residual=max(prev.residual, s.residual),
                multiplicity=prev.multiplicity + s.multiplicity,
            )
        else:
            merged.append(s)
    return merged
