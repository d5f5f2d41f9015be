"""Brute-force reference computations, independent of the analytic machinery.

fd_spectrum diagonalizes the standard second-order finite-difference
approximation of -d^2/dx^2 + V on [0, L] with Dirichlet ends and filters the
eigenvalues to the disk where bound states can live.  well_bound_states
solves the square-well transcendental condition by bracketed bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal, solve_banded

from . import potential as pot


@dataclass(frozen=True)
class FDSpectrumResult:
    L: float
    n: int
    eigenvalues: tuple


def _dist_to_positive_axis(lam: complex) -> float:
    if lam.real >= 0:
        return abs(lam.imag)
    return abs(lam)


def _potential_samples(spec, x: np.ndarray, h: float) -> np.ndarray:
    """V at grid nodes; for step potentials, exact cell averages over
    [x - h/2, x + h/2] so the discontinuity does not degrade the FD order."""
    if isinstance(spec, pot.Step):
        v = np.zeros(x.size, dtype=complex)
        a, b = x - h / 2, x + h / 2
        for lo, hi, val in spec.segments:
            overlap = np.clip(np.minimum(b, hi) - np.maximum(a, lo), 0.0, None)
            v += val * overlap / h
        return v
    return np.asarray(pot.evaluate(spec, x), dtype=complex)


def _tail_fraction(diag, off: float, lam: complex, tail_mask) -> float:
    """|psi|^2 weight beyond the tail mask boundary, via two inverse-iteration
    steps with a tridiagonal solve.  Discretized-continuum artifacts spread
    over the whole box; genuine bound states decay."""
    n = diag.size
    shift = lam + 1e-9 * (1 + abs(lam)) * (1 + 1j)
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = off
    ab[1, :] = diag - shift
    ab[2, :-1] = off
    rng = np.random.default_rng(12345)
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    for _ in range(2):
        psi = solve_banded((1, 1), ab, psi)
        psi /= np.linalg.norm(psi)
    w = np.abs(psi) ** 2
    return float(w[tail_mask].sum() / w.sum())


def fd_spectrum(
    spec,
    L: float = 20.0,
    n: int = 4000,
    disk_margin: float = 0.10,
    axis_standoff: float = 1e-3,
    localization_cut: float = 0.02,
) -> FDSpectrumResult:
    """Eigenvalues of the FD matrix, filtered to |lambda| <= (1+margin) (int|V|)^2,
    away from [0, oo), and with localized eigenfunctions.  Real potentials take
    the fast tridiagonal path."""
    h = L / (n + 1)
    x = h * np.arange(1, n + 1)
    v = _potential_samples(spec, x, h)
    off = -1.0 / h**2
    diag = 2.0 / h**2 + v
    if np.max(np.abs(v.imag)) == 0.0:
        lam = eigvalsh_tridiagonal(diag.real, np.full(n - 1, off), select="a").astype(
            complex
        )
    else:
        A = np.diag(diag) + np.diag(np.full(n - 1, off), 1) + np.diag(
            np.full(n - 1, off), -1
        )
        lam = np.linalg.eigvals(A)
    r2 = (1.0 + disk_margin) * spec.l1() ** 2
    tail_mask = x > 0.75 * L
    keep = []
    for z in lam:
        z = complex(z)
        if abs(z) > r2 or _dist_to_positive_axis(z) <= axis_standoff:
            continue
        if _tail_fraction(diag, off, z, tail_mask) < localization_cut:
            keep.append(z)
    keep.sort(key=lambda z: (z.real, z.imag))
    return FDSpectrumResult(L=float(L), n=int(n), eigenvalues=tuple(keep))


def well_bound_states(v0: float, width: float, tol: float = 1e-12):
    """All kappa in (0, sqrt(v0)) with
    sqrt(v0 - kappa^2) * cot(width * sqrt(v0 - kappa^2)) = -kappa,
    the Dirichlet half-line bound-state condition for V = -v0 on [0, width].

    Bound states correspond to sign changes of
        g(s) = (s/width) cos(s) + sqrt(v0 - (s/width)^2) sin(s),
    s = width * sqrt(v0 - kappa^2), scanned between the poles of cot.
    """
    if v0 <= 0 or width <= 0:
        raise ValueError("need v0 > 0 and width > 0")
    s_top = width * math.sqrt(v0)

    def g(s):
        return (s / width) * math.cos(s) + math.sqrt(
            max(v0 - (s / width) ** 2, 0.0)
        ) * math.sin(s)

    roots = []
    n_scan = max(2000, int(200 * s_top))
    ss = np.linspace(1e-12, s_top - 1e-12, n_scan)
    gs = [g(s) for s in ss]
    for a, b, ga, gb in zip(ss, ss[1:], gs, gs[1:]):
        if ga == 0.0:
            continue
        if ga * gb < 0:
            lo, hi, glo = a, b, ga
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                gm = g(mid)
                if glo * gm <= 0:
                    hi = mid
                else:
                    lo, glo = mid, gm
            s = 0.5 * (lo + hi)
            kap = math.sqrt(max(v0 - (s / width) ** 2, 0.0))
            # reject spurious crossings: verify the cot form, away from sin s = 0
            if abs(math.sin(s)) > 1e-8 and kap > tol:
                resid = math.sqrt(v0 - kap**2) / math.tan(s) + kap
                if abs(resid) < 1e-6 * (1 + v0):
                    roots.append(kap)
    roots.sort(reverse=True)
    return roots
