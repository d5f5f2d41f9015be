"""Nystrom discretization of the Birman-Schwinger operator X = W R(z) W.

The matrix is built in the symmetric similarity form
    M_ij = W(x_i) sqrt(w_i) G(x_i, x_j; k) sqrt(w_j) W(x_j),
whose nonzero spectrum approximates that of X.  det(I + V R(z)) is recovered
as det(I + U M) with the phase matrix U = V/|V|, since multiplication
operators commute and det(I + AB) = det(I + BA).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import potential as pot
from .freeresolvent import check_wavenumber, kernel


@dataclass(frozen=True)
class QuadratureGrid:
    """Composite Gauss-Legendre nodes/weights on [0, x_max], breakpoint-aligned."""

    nodes: np.ndarray
    weights: np.ndarray
    panel_edges: np.ndarray
    x_max: float

    @property
    def n(self) -> int:
        return self.nodes.size


def build_grid(
    spec=None,
    x_max: float | None = None,
    n: int = 400,
    panel_degree: int = 10,
    breakpoints=(),
) -> QuadratureGrid:
    """Composite Gauss-Legendre grid with ~n nodes, panels split at breakpoints."""
    if x_max is None:
        if spec is None:
            raise ValueError("need either spec or x_max")
        x_max = pot.tail_cutoff(spec, 1e-10)
    pts = sorted({0.0, float(x_max)} | {float(b) for b in breakpoints if 0 < b < x_max})
    if spec is not None:
        pts = sorted(
            set(pts) | {float(b) for b in pot.breakpoints(spec) if 0 < b < x_max}
        )
    n_panels = max(1, n // panel_degree)
    lengths = np.diff(pts)
    # at least one panel per breakpoint interval, remainder by length
    alloc = np.ones(len(lengths), dtype=int)
    extra = n_panels - len(lengths)
    if extra > 0:
        share = np.floor(extra * lengths / lengths.sum()).astype(int)
        alloc += share
        for _ in range(extra - share.sum()):
            alloc[np.argmax(lengths / alloc)] += 1
    gx, gw = np.polynomial.legendre.leggauss(panel_degree)
    nodes, weights, edges = [], [], [pts[0]]
    for (a, b), m in zip(zip(pts, pts[1:]), alloc):
        sub = np.linspace(a, b, m + 1)
        edges.extend(sub[1:])
        for lo, hi in zip(sub, sub[1:]):
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
            nodes.append(mid + half * gx)
            weights.append(half * gw)
    return QuadratureGrid(
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
        panel_edges=np.asarray(edges),
        x_max=float(x_max),
    )


def grid_for(spec, k: complex | None = None, n: int = 400, osc_cap: float = 200.0):
    """Grid sized for this potential; long slow tails are truncated at the point
    where the kernel has completed ~osc_cap radians of phase, keeping the node
    density per wavelength fixed as k varies."""
    cap = osc_cap / abs(k) if k is not None and k != 0 else 200.0
    x_max = pot.spectral_cutoff(spec, 1e-10, budget=cap)
    return build_grid(spec, x_max=x_max, n=n)


@dataclass(frozen=True)
class DiscretizedBS:
    k: complex
    entries: np.ndarray
    phases: np.ndarray
    grid: QuadratureGrid


def discretize(spec, k: complex, grid: QuadratureGrid) -> DiscretizedBS:
    k = check_wavenumber(k)
    x = grid.nodes
    v = np.asarray(pot.evaluate(spec, x), dtype=complex)
    absv = np.abs(v)
    w_sqrtw = np.sqrt(absv) * np.sqrt(grid.weights)
    entries = w_sqrtw[:, None] * kernel(k, x[:, None], x[None, :]) * w_sqrtw[None, :]
    phases = np.where(absv < 1e-300, 1.0 + 0j, v / np.where(absv < 1e-300, 1.0, absv))
    return DiscretizedBS(k=k, entries=entries, phases=phases, grid=grid)


@dataclass(frozen=True)
class SchattenReport:
    s1: float
    s2: float
    opnorm: float
    singular_values: np.ndarray


def schatten_report(M: DiscretizedBS) -> SchattenReport:
    sv = np.linalg.svd(M.entries, compute_uv=False)
    return SchattenReport(
        s1=float(sv.sum()),
        s2=float(np.sqrt((sv**2).sum())),
        opnorm=float(sv[0]) if sv.size else 0.0,
        singular_values=sv,
    )


def _log_det(A: np.ndarray) -> complex:
    sign, logabs = np.linalg.slogdet(A)
    if sign == 0:
        return complex(-np.inf, 0.0)
    return complex(logabs) + np.log(sign)


def perturbation_det(M: DiscretizedBS) -> complex:
    """det(I + U M), accumulated as a log-determinant to dodge overflow."""
    n = M.entries.shape[0]
    A = np.eye(n, dtype=complex) + M.phases[:, None] * M.entries
    return np.exp(_log_det(A))


def det2(M: DiscretizedBS) -> complex:
    """Second regularized determinant det(I + UM) e^{-tr(UM)}."""
    tr = np.sum(M.phases * np.diag(M.entries))
    n = M.entries.shape[0]
    A = np.eye(n, dtype=complex) + M.phases[:, None] * M.entries
    return np.exp(_log_det(A) - tr)


def trace(M: DiscretizedBS) -> complex:
    """tr(UM), the quadrature of int V(x) G(x, x; k) dx."""
    return complex(np.sum(M.phases * np.diag(M.entries)))


@dataclass(frozen=True)
class SineFunctional:
    """l_xi(u) = int sin(xi*y) W(y) u(y) dy, discretized against the grid."""

    xi: float
    vector: np.ndarray  # components sin(xi*x_i) W(x_i) sqrt(w_i)

    @property
    def norm_sq(self) -> float:
        return float(self.vector @ self.vector)


def sine_functional(spec, xi: float, grid: QuadratureGrid) -> SineFunctional:
    x = grid.nodes
    w = np.sqrt(np.abs(np.asarray(pot.evaluate(spec, x), dtype=complex)))
    return SineFunctional(xi=float(xi), vector=np.sin(xi * x) * w * np.sqrt(grid.weights))


def sine_rank_one(spec, xi: float, eta: float, grid: QuadratureGrid):
    """(l_xi, l_eta, ||G_xi - G_eta||_S1) with the S1 norm from rank-2 algebra.

    G_xi = l_xi* l_xi; the difference acts on span{v, u}, so its eigenvalues
    are those of the 2x2 matrix [[v.v, v.u], [-u.v, -u.u]].
    """
    lf = sine_functional(spec, xi, grid)
    le = sine_functional(spec, eta, grid)
    v, u = lf.vector, le.vector
    a, b, c = float(v @ v), float(v @ u), float(u @ u)
    eig = np.linalg.eigvals(np.array([[a, b], [-b, -c]]))
    s1_diff = float(np.sum(np.abs(eig.real)))
    return lf, le, s1_diff
