"""Complex-valued potentials V on [0, oo) and their absolute moments.

Every family is absolutely integrable under its parameter constraints.
Specs are immutable; all functions here are pure.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special


class DivergentMomentError(ValueError):
    """Requested moment integral does not converge."""


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        re, im = v
        return complex(re, im)
    return complex(v)


@dataclass(frozen=True)
class Step:
    """Piecewise-constant potential: ``value`` on each [x_lo, x_hi), zero elsewhere."""

    segments: tuple  # of (x_lo, x_hi, value)

    def __post_init__(self):
        segs = tuple(
            (float(lo), float(hi), _as_complex(v)) for lo, hi, v in self.segments
        )
        prev_hi = 0.0
        for lo, hi, _ in segs:
            if lo < 0:
                raise ValueError(f"segment starts at negative x: {lo}")
            if hi <= lo:
                raise ValueError(f"segment must have x_hi > x_lo, got [{lo}, {hi}]")
            if lo < prev_hi:
                raise ValueError("segments must be disjoint and ordered")
            prev_hi = hi
        object.__setattr__(self, "segments", segs)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for lo, hi, v in self.segments:
            out[(x >= lo) & (x < hi)] = v
        return out if out.shape else complex(out)

    def l1(self) -> float:
        return sum(abs(v) * (hi - lo) for lo, hi, v in self.segments)

    def weighted_moment(self, p: float) -> float:
        return sum(
            abs(v) * (hi ** (p + 1) - lo ** (p + 1)) / (p + 1)
            for lo, hi, v in self.segments
        )

    def tail_mass(self, x: float) -> float:
        return sum(
            abs(v) * (hi - max(lo, x)) for lo, hi, v in self.segments if hi > x
        )

    def support_end(self) -> float:
        return self.segments[-1][1] if self.segments else 0.0

    def breakpoints(self):
        pts = set()
        for lo, hi, _ in self.segments:
            pts.add(lo)
            pts.add(hi)
        return sorted(pts)

    def scaled(self, c: complex) -> "Step":
        return Step(tuple((lo, hi, c * v) for lo, hi, v in self.segments))


@dataclass(frozen=True)
class Gaussian:
    """V(x) = amplitude * exp(-((x - center)/width)^2)."""

    amplitude: complex
    width: float
    center: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "amplitude", _as_complex(self.amplitude))
        if self.width <= 0:
            raise ValueError("width must be positive")
        if self.center < 0:
            raise ValueError("center must be >= 0")

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(
            self.amplitude * np.exp(-(((x - self.center) / self.width) ** 2))
        )
        return out if out.shape else complex(out)

    def l1(self) -> float:
        a = abs(self.amplitude)
        return a * self.width * math.sqrt(math.pi) / 2 * (
            1 + math.erf(self.center / self.width)
        )

    def weighted_moment(self, p: float) -> float:
        a = abs(self.amplitude)
        if self.center == 0.0:
            # int_0^oo x^p exp(-(x/w)^2) dx = w^(p+1) Gamma((p+1)/2) / 2
            return a * self.width ** (p + 1) * special.gamma((p + 1) / 2) / 2
        val, _ = integrate.quad(
            lambda x: x**p * math.exp(-(((x - self.center) / self.width) ** 2)),
            0.0,
            np.inf,
            epsabs=1e-14,
            epsrel=1e-12,
        )
        return a * val

    def tail_mass(self, x: float) -> float:
        a = abs(self.amplitude)
        return a * self.width * math.sqrt(math.pi) / 2 * special.erfc(
            (x - self.center) / self.width
        )

    def support_end(self) -> float:
        return math.inf

    def breakpoints(self):
        return [self.center] if self.center > 0 else []

    def scaled(self, c: complex) -> "Gaussian":
        return Gaussian(c * self.amplitude, self.width, self.center)


@dataclass(frozen=True)
class ExpDecay:
    """V(x) = amplitude * exp(-rate * x)."""

    amplitude: complex
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "amplitude", _as_complex(self.amplitude))
        if self.rate <= 0:
            raise ValueError("rate must be positive")

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.amplitude * np.exp(-self.rate * x))
        return out if out.shape else complex(out)

    def l1(self) -> float:
        return abs(self.amplitude) / self.rate

    def weighted_moment(self, p: float) -> float:
        return abs(self.amplitude) * special.gamma(p + 1) / self.rate ** (p + 1)

    def tail_mass(self, x: float) -> float:
        return abs(self.amplitude) * math.exp(-self.rate * x) / self.rate

    def support_end(self) -> float:
        return math.inf

    def breakpoints(self):
        return []

    def scaled(self, c: complex) -> "ExpDecay":
        return ExpDecay(c * self.amplitude, self.rate)


@dataclass(frozen=True)
class PowerTail:
    """V(x) = amplitude * (1 + x)^(-exponent), exponent > 1."""

    amplitude: complex
    exponent: float

    def __post_init__(self):
        object.__setattr__(self, "amplitude", _as_complex(self.amplitude))
        if self.exponent <= 1:
            raise ValueError("exponent must exceed 1 for integrability")

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.amplitude * (1.0 + x) ** (-self.exponent))
        return out if out.shape else complex(out)

    def l1(self) -> float:
        return abs(self.amplitude) / (self.exponent - 1)

    def weighted_moment(self, p: float) -> float:
        q = self.exponent
        if p >= q - 1:
            raise DivergentMomentError(
                f"x^p moment diverges for p={p} >= exponent-1={q - 1}"
            )
        # int_0^oo x^p (1+x)^(-q) dx = B(p+1, q-p-1)
        return abs(self.amplitude) * special.beta(p + 1, q - p - 1)

    def tail_mass(self, x: float) -> float:
        q = self.exponent
        return abs(self.amplitude) * (1.0 + x) ** (1 - q) / (q - 1)

    def support_end(self) -> float:
        return math.inf

    def breakpoints(self):
        return []

    def scaled(self, c: complex) -> "PowerTail":
        return PowerTail(c * self.amplitude, self.exponent)


@dataclass(frozen=True)
class Sampled:
    """Linear interpolation of complex samples; zero outside the sampled range."""

    grid: tuple
    values: tuple

    def __post_init__(self):
        g = tuple(float(x) for x in self.grid)
        v = tuple(_as_complex(x) for x in self.values)
        if len(g) != len(v):
            raise ValueError("grid and values must have equal length")
        if len(g) < 2:
            raise ValueError("need at least two sample nodes")
        if g[0] < 0:
            raise ValueError("grid must start at x >= 0")
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        g = np.asarray(self.grid)
        v = np.asarray(self.values, dtype=complex)
        re = np.interp(x, g, v.real, left=0.0, right=0.0)
        im = np.interp(x, g, v.imag, left=0.0, right=0.0)
        out = re + 1j * im
        inside = (x >= g[0]) & (x <= g[-1])
        out = np.where(inside, out, 0.0)
        return out if out.shape else complex(out)

    def _piece_integral(self, weight):
        total = 0.0
        g = self.grid
        for a, b in zip(g, g[1:]):
            val, _ = integrate.quad(
                lambda x: weight(x) * abs(self.eval(x)),
                a,
                b,
                epsabs=1e-14,
                epsrel=1e-11,
            )
            total += val
        return total

    def l1(self) -> float:
        return self._piece_integral(lambda x: 1.0)

    def weighted_moment(self, p: float) -> float:
        return self._piece_integral(lambda x: x**p)

    def tail_mass(self, x: float) -> float:
        if x >= self.grid[-1]:
            return 0.0
        g = self.grid
        total = 0.0
        for a, b in zip(g, g[1:]):
            lo = max(a, x)
            if lo >= b:
                continue
            val, _ = integrate.quad(
                lambda t: abs(self.eval(t)), lo, b, epsabs=1e-14, epsrel=1e-11
            )
            total += val
        return total

    def support_end(self) -> float:
        return self.grid[-1]

    def breakpoints(self):
        return list(self.grid)

    def scaled(self, c: complex) -> "Sampled":
        return Sampled(self.grid, tuple(c * v for v in self.values))


PotentialSpec = Step | Gaussian | ExpDecay | PowerTail | Sampled


@dataclass(frozen=True)
class Moments:
    """L1 mass and the x^p-weighted mass of |V|, for a fixed p in (0,1)."""

    l1: float
    weighted: float
    p: float


def evaluate(spec: PotentialSpec, x):
    """Evaluate V at x (scalar or array); x must be nonnegative."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("potential is defined on [0, oo); got negative x")
    return spec.eval(x)


def moments(spec: PotentialSpec, p: float) -> Moments:
    """Compute (int |V| dx, int x^p |V| dx) for p in (0,1)."""
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0,1), got {p}")
    return Moments(l1=spec.l1(), weighted=spec.weighted_moment(p), p=p)


def radius(spec: PotentialSpec) -> float:
    """Contour radius R = 2 * int |V| dx."""
    return 2.0 * spec.l1()


def tail_cutoff(spec: PotentialSpec, tol: float = 1e-10) -> float:
    """Smallest x_max with int_{x_max}^oo |V| dx < tol, from analytic tail bounds."""
    end = spec.support_end()
    if math.isfinite(end):
        return end
    if spec.tail_mass(0.0) < tol:
        return 0.0
    lo, hi = 0.0, 1.0
    while spec.tail_mass(hi) >= tol:
        hi *= 2.0
        if hi > 1e18:
            raise ValueError("tail cutoff beyond representable range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if spec.tail_mass(mid) >= tol:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9 * (1 + hi):
            break
    return hi


def effective_cutoff(spec: PotentialSpec, k: complex, tol: float = 1e-10) -> float:
    """Truncation point adequate for evaluating a(k) at this wavenumber.

    Discarding the tail beyond x perturbs the Jost function at first order by
    ~ tail_mass(x) / |k| (the constant part of the Volterra kernel is not
    damped at Im k > 0), so the cutoff is driven by the tail mass alone.
    """
    end = spec.support_end()
    if math.isfinite(end):
        return end
    target = tol * max(abs(k), 1e-2)

    def excess(x):
        return spec.tail_mass(x) - target

    if excess(0.0) <= 0:
        return max(1.0, tail_cutoff(spec, tol))
    lo, hi = 0.0, 1.0
    while excess(hi) > 0:
        hi *= 2.0
        if hi > 1e18:
            raise ValueError("effective cutoff beyond representable range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9 * (1 + hi):
            break
    return hi


def spectral_cutoff(spec: PotentialSpec, tol: float = 1e-10, budget: float = 200.0) -> float:
    """Fixed (k-independent) truncation point for zero searches.

    Truncating at any fixed x_max leaves a(k) analytic in k, and shifts zeros
    in the open upper half-plane only by O(e^{-2 Im(k_j) x_max}) because the
    corresponding eigenfunctions decay.  Slowly decaying tails are therefore
    capped at the cost budget rather than forced down to tol.
    """
    end = spec.support_end()
    if math.isfinite(end):
        return end
    if spec.tail_mass(budget) > tol:
        return budget
    lo, hi = 0.0, budget
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if spec.tail_mass(mid) > tol:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9 * (1 + hi):
            break
    return hi


def breakpoints(spec: PotentialSpec):
    """Interior points where V is non-smooth (for quadrature panel alignment)."""
    return spec.breakpoints()


def scaled(spec: PotentialSpec, c: complex) -> PotentialSpec:
    """The potential c * V."""
    return spec.scaled(complex(c))


_KINDS = {
    "step": Step,
    "gaussian": Gaussian,
    "expdecay": ExpDecay,
    "powertail": PowerTail,
    "sampled": Sampled,
}


def from_dict(d: dict) -> PotentialSpec:
    """Build a spec from a config table with a `kind` discriminator.

    Complex parameters may be given as a number or an [re, im] pair; step
    segments as [x_lo, x_hi, value] or [x_lo, x_hi, re, im].
    """
    d = dict(d)
    try:
        kind = d.pop("kind")
    except KeyError:
        raise ValueError("potential table needs a 'kind' field") from None
    if kind not in _KINDS:
        raise ValueError(f"unknown potential kind {kind!r}")
    if kind == "step":
        segs = []
        for row in d.pop("segments"):
            if len(row) == 3:
                segs.append((row[0], row[1], row[2]))
            elif len(row) == 4:
                segs.append((row[0], row[1], complex(row[2], row[3])))
            else:
                raise ValueError(f"bad step segment {row!r}")
        return Step(tuple(segs), **d)
    return _KINDS[kind](**d)


def value_fn(spec: PotentialSpec):
    """Fast scalar evaluator x -> V(x), for use inside ODE right-hand sides."""
    if isinstance(spec, Step):
        segs = spec.segments

        def f(x):
            for lo, hi, v in segs:
                if lo <= x < hi:
                    return v
            return 0j

        return f
    if isinstance(spec, Gaussian):
        a, w, c = spec.amplitude, spec.width, spec.center
        return lambda x: a * math.exp(-(((x - c) / w) ** 2))
    if isinstance(spec, ExpDecay):
        a, r = spec.amplitude, spec.rate
        return lambda x: a * math.exp(-r * x)
    if isinstance(spec, PowerTail):
        a, q = spec.amplitude, spec.exponent
        return lambda x: a * (1.0 + x) ** (-q)
    return lambda x: complex(spec.eval(x))
