"""Numerical laboratory for the spectral theory of half-line Schrodinger
operators -d^2/dx^2 + V with complex-valued potentials and a Dirichlet
condition at the origin.

Eigenvalues are located as zeros of the Jost function a(k) (the perturbation
determinant) in the upper half-plane, and the package cross-checks the
operator-theoretic machinery behind eigenvalue-sum bounds: Birman-Schwinger
Schatten estimates, Blaschke products, regularized determinants, and the
contour trace identity tying zero sums to boundary integrals of log a.
"""

from . import blaschke, bs_operator, freeresolvent, harness, jost, oracle
from . import potential, spectra, traceform
from .blaschke import PowerSums, ZeroSet, blaschke_eval, log_blaschke, power_sums
from .bs_operator import (
    DiscretizedBS,
    QuadratureGrid,
    SchattenReport,
    build_grid,
    det2,
    discretize,
    grid_for,
    perturbation_det,
    schatten_report,
    sine_functional,
    sine_rank_one,
)
from .freeresolvent import kernel
from .harness import (
    ConfigError,
    ConstantEstimate,
    RunConfig,
    TheoremRow,
    default_corpus,
    load_config,
    run_config,
    theorem_report,
)
from .jost import IntegrationError, JostSolution, JostValue, jost_function, jost_solution
from .oracle import FDSpectrumResult, fd_spectrum, well_bound_states
from .potential import (
    DivergentMomentError,
    ExpDecay,
    Gaussian,
    PotentialSpec,
    PowerTail,
    Sampled,
    Step,
)
from .spectra import SearchRegion, SpectralPoint, find_spectrum, winding_number
from .traceform import ContourSpec, TraceReport, contour_log_integral, trace_report

__version__ = "0.1.0"
