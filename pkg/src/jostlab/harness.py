"""Batch driver: load a declarative run configuration, sweep the check suite
over a corpus of potentials, and emit machine-readable reports.

Tasks
-----
spectrum   zeros of a(k) in the upper half-plane, residual and disk-bound checks
trace      both sides of the contour trace identity
bounds     Schatten/operator-norm inequalities and the S1 scaling constant
theorem    the eigenvalue-sum inequality table with an amplitude sweep

Exit codes: 0 all checks passed, 1 invariant violation, 2 bad configuration,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import blaschke, bs_operator, jost, spectra, traceform
from . import potential as pot

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

SCHEMA_VERSION = 1
ALL_TASKS = ("spectrum", "trace", "bounds", "theorem")
THEOREM_SWEEP = (0.25, 0.5, 1.0, 2.0, 4.0)

DEFAULT_TOLERANCES = {
    "residual": 1e-10,
    "disk_slack": 1e-8,
    "bound_slack": 1e-8,
    "trace": 1e-5,
    "ratio_spread": 50.0,
    "stability": 0.10,
    "slope_margin": 0.05,
}


class ConfigError(ValueError):
    """The run configuration failed to parse or validate."""


class NumericalFailure(RuntimeError):
    """A task aborted for numerical (not logical) reasons."""


@dataclass(frozen=True)
class RunConfig:
    potentials: tuple  # of (id, PotentialSpec)
    p: float = 0.5
    tasks: tuple = ALL_TASKS
    sweep: tuple | None = None  # amplitude scalars c applied as c*V
    tolerances: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ConfigError(f"p must lie in (0,1), got {self.p}")
        if not self.tasks:
            raise ConfigError("task set must be nonempty")
        for t in self.tasks:
            if t not in ALL_TASKS:
                raise ConfigError(f"unknown task {t!r}")
        ids = [pid for pid, _ in self.potentials]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate potential ids")
        if self.sweep is not None:
            if any(c == 0 for c in self.sweep):
                raise ConfigError("sweep scalars must be nonzero")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance keys {sorted(unknown)}")

    def tolerance(self, name: str, scale: float = 1.0) -> float:
        base = self.tolerances.get(name, DEFAULT_TOLERANCES[name])
        return base * scale


@dataclass(frozen=True)
class TheoremRow:
    potential_id: str
    c: complex
    lhs: float  # sum of Im k_j over found zeros
    m1: float  # int |V|
    mp: float  # int x^p |V|
    rhs_core: float  # mp * m1^p + m1
    ratio: float


@dataclass(frozen=True)
class ConstantEstimate:
    name: str
    value: float
    stability: float  # relative change under refinement


def default_corpus():
    """The shipped test corpus: wells with real, complex, and piecewise
    amplitudes, plus smooth and slowly decaying tails.  Sorted by id."""
    phase = cmath.exp(0.25j * math.pi)
    corpus = [
        ("exp_well", pot.ExpDecay(-2.0, 1.0)),
        ("gauss_well", pot.Gaussian(-3.0, 1.0, 1.0)),
        ("power_15", pot.PowerTail(-1.0, 1.5)),
        ("power_20", pot.PowerTail(-1.0, 2.0)),
        ("power_30", pot.PowerTail(-1.0, 3.0)),
        ("step_complex", pot.Step(((0.0, 1.0, -4.0 * phase),))),
        ("step_two", pot.Step(((0.0, 1.0, -3.0), (1.0, 2.0, 1.0j)))),
        ("step_well", pot.Step(((0.0, 1.0, -4.0),))),
    ]
    return tuple(sorted(corpus, key=lambda t: t[0]))


def _parse_scalar(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex value must be [re, im], got {v!r}")
        return complex(v[0], v[1])
    return complex(v)


def load_config(path) -> RunConfig:
    """Read a TOML or JSON run configuration.

    Layout: tables `potential.<id>` (with a `kind` discriminator and family
    parameters), and top-level keys `p`, `tasks`, `sweep`, `tolerances`,
    `seed`.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(raw.decode())
        except ValueError as exc:
            raise ConfigError(f"bad JSON in {path}: {exc}") from exc
    else:
        try:
            data = tomllib.loads(raw.decode())
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"bad TOML in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a table")
    pots = []
    for pid, table in sorted(data.get("potential", {}).items()):
        if not isinstance(table, dict):
            raise ConfigError(f"potential.{pid} must be a table")
        try:
            pots.append((pid, pot.from_dict(table)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"potential.{pid}: {exc}") from exc
    sweep = data.get("sweep")
    if sweep is not None:
        try:
            sweep = tuple(_parse_scalar(c) for c in sweep)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad sweep: {exc}") from exc
    tol = data.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("tolerances must be a table")
    try:
        return RunConfig(
            potentials=tuple(pots),
            p=float(data.get("p", 0.5)),
            tasks=tuple(data.get("tasks", ALL_TASKS)),
            sweep=sweep,
            tolerances={k: float(v) for k, v in tol.items()},
            seed=int(data.get("seed", 0)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# serialization helpers


def _cnum(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _check(checks, name, potential_id, c, passed, observed, threshold, note=""):
    checks.append(
        {
            "name": name,
            "potential": potential_id,
            "c": _cnum(c),
            "passed": bool(passed),
            "observed": observed,
            "threshold": threshold,
            "note": note,
        }
    )


def _trace_feasible(spec) -> bool:
    """The contour integral needs the true tail below 1e-10 at moderate x;
    heavy power-law tails cannot reach that and are skipped (and reported)."""
    end = spec.support_end()
    if math.isfinite(end):
        return True
    return spec.tail_mass(100.0) <= 1e-10


# ---------------------------------------------------------------------------
# tasks


def _spectrum_for(cache, pid, spec, c):
    key = (pid, complex(c))
    if key not in cache:
        cache[key] = spectra.find_spectrum(pot.scaled(spec, c))
    return cache[key]


def _task_spectrum(cfg, pid, spec, c, cache, checks, tol_scale):
    scaled = pot.scaled(spec, c)
    m1 = scaled.l1()
    sp = _spectrum_for(cache, pid, spec, c)
    res_tol = cfg.tolerance("residual", tol_scale)
    disk = (1.0 + cfg.tolerance("disk_slack", tol_scale)) * m1 * m1
    for s in sp:
        _check(checks, "spectrum.residual", pid, c, s.residual <= res_tol,
               s.residual, res_tol, f"k={s.k:.8g}")
        _check(checks, "spectrum.disk_bound", pid, c, abs(s.lam) <= disk,
               abs(s.lam), disk, f"lambda={s.lam:.8g}")
    return {
        "m1": m1,
        "zeros": [
            {
                "k": _cnum(s.k),
                "lambda": _cnum(s.lam),
                "residual": s.residual,
                "multiplicity": s.multiplicity,
            }
            for s in sp
        ],
    }


def _task_trace(cfg, pid, spec, c, cache, checks, tol_scale):
    scaled = pot.scaled(spec, c)
    if not _trace_feasible(scaled):
        return {"skipped": "tail too heavy for the contour tolerance"}
    sp = _spectrum_for(cache, pid, spec, c)
    report = traceform.trace_report(scaled, spectrum=sp)
    tol = cfg.tolerance("trace", tol_scale)
    thresh = tol * (1 + abs(report.lhs))
    _check(checks, "trace.identity", pid, c, report.discrepancy <= thresh,
           report.discrepancy, thresh)
    return {
        "lhs": report.lhs,
        "rhs": report.rhs,
        "discrepancy": report.discrepancy,
        "radius": report.radius,
        "arc_part": _cnum(report.arc_part),
        "interval_part": report.interval_part,
        "near_resonance": report.near_resonance,
    }


def _schatten_sweep(spec, ks, n):
    out = []
    for k in ks:
        grid = bs_operator.grid_for(spec, k, n=n)
        rep = bs_operator.schatten_report(bs_operator.discretize(spec, k, grid))
        out.append(rep)
    return out


def _task_bounds(cfg, pid, spec, c, checks, tol_scale, rng, n=400):
    scaled = pot.scaled(spec, c)
    m1 = scaled.l1()
    if m1 == 0:
        return {"skipped": "zero potential"}
    R = 2.0 * m1
    slack = 1.0 + cfg.tolerance("bound_slack", tol_scale)
    ks_real = [complex(k) for k in np.geomspace(1e-3 * R, R, 12)]
    ks_cplx = [R * cmath.exp(1j * th) for th in np.linspace(0.15, math.pi - 0.15, 8)]
    ks = ks_real + ks_cplx
    reps = _schatten_sweep(scaled, ks, n)
    worst_op = worst_s2 = worst_det = 0.0
    for k, rep in zip(ks, reps):
        cap = m1 / abs(k)
        worst_op = max(worst_op, rep.opnorm / cap)
        worst_s2 = max(worst_s2, rep.s2 / cap)
        grid = bs_operator.grid_for(scaled, k, n=n)
        M = bs_operator.discretize(scaled, k, grid)
        worst_det = max(
            worst_det, abs(bs_operator.perturbation_det(M)) / math.exp(rep.s1)
        )
    _check(checks, "bounds.opnorm", pid, c, worst_op <= slack, worst_op, slack)
    _check(checks, "bounds.s2", pid, c, worst_s2 <= slack, worst_s2, slack)
    _check(checks, "bounds.det_exp_s1", pid, c, worst_det <= slack, worst_det, slack)

    result = {
        "m1": m1,
        "opnorm_ratio_max": worst_op,
        "s2_ratio_max": worst_s2,
        "det_ratio_max": worst_det,
    }

    try:
        mp = scaled.weighted_moment(cfg.p)
    except pot.DivergentMomentError:
        result["s1_scaling"] = {"skipped": f"x^p moment divergent at p={cfg.p}"}
        return result

    s1s = np.array([rep.s1 for rep in reps[: len(ks_real)]])
    kabs = np.abs(ks_real)
    ratios = kabs ** (1 - cfg.p) * s1s / mp
    sup = float(np.max(ratios))
    s1s2 = np.array([rep.s1 for rep in _schatten_sweep(scaled, ks_real, 2 * n)])
    sup2 = float(np.max(kabs ** (1 - cfg.p) * s1s2 / mp))
    stability = abs(sup2 - sup) / sup if sup > 0 else 0.0
    _check(checks, "bounds.s1_scaling_stable", pid, c,
           stability <= cfg.tolerance("stability", tol_scale) / 2,
           stability, cfg.tolerance("stability", tol_scale) / 2)

    # one-sided slope check: s1 <= C k^{p-1} forces slope >= -(1-p) as k -> 0
    low = kabs <= kabs[0] * 10.0
    slope = float(np.polyfit(np.log(kabs[low]), np.log(s1s2[low]), 1)[0])
    margin = cfg.tolerance("slope_margin", tol_scale)
    _check(checks, "bounds.s1_slope_lower", pid, c,
           slope >= -(1 - cfg.p) - margin, slope, -(1 - cfg.p) - margin)

    # rank-one functional bound at randomized frequencies
    xi = rng.uniform(1e-3, 2 * R, size=100)
    worst_fn = 0.0
    for x in xi:
        grid = bs_operator.grid_for(scaled, complex(x), n=n)
        lf = bs_operator.sine_functional(scaled, float(x), grid)
        worst_fn = max(worst_fn, lf.norm_sq / (x**cfg.p * mp))
    _check(checks, "bounds.sine_functional", pid, c, worst_fn <= slack,
           worst_fn, slack)
    result["s1_scaling"] = {
        "sup_ratio": sup2,
        "stability": stability,
        "low_k_slope": slope,
        "sine_functional_ratio_max": worst_fn,
    }
    return result


def theorem_report(cfg: RunConfig, cache=None, checks=None, tol_scale: float = 1.0):
    """One TheoremRow per (potential, amplitude scalar), plus the fitted
    constant: the maximal ratio (sum Im k_j) / (mp * m1^p + m1)."""
    if cache is None:
        cache = {}
    if checks is None:
        checks = []
    sweep = cfg.sweep if cfg.sweep is not None else THEOREM_SWEEP
    rows = []
    for pid, spec in sorted(cfg.potentials, key=lambda t: t[0]):
        ratios = []
        for c in sweep:
            scaled = pot.scaled(spec, c)
            m1 = scaled.l1()
            try:
                mp = scaled.weighted_moment(cfg.p)
            except pot.DivergentMomentError:
                _check(checks, "theorem.moment", pid, c, True, None, None,
                       f"x^p moment divergent at p={cfg.p}; row skipped")
                continue
            sp = _spectrum_for(cache, pid, spec, c)
            mp, m1 = float(mp), float(m1)
            zeros = [complex(s.k) for s in sp for _ in range(s.multiplicity)]
            lhs = float(sum(z.imag for z in zeros))
            rhs_core = mp * m1**cfg.p + m1
            ratio = lhs / rhs_core if rhs_core > 0 else 0.0
            rows.append(TheoremRow(pid, complex(c), lhs, m1, mp, rhs_core, ratio))
            if ratio > 0:
                ratios.append(ratio)
            R = 2.0 * m1
            for z in zeros:
                _check(checks, "theorem.disk", pid, c, abs(z) <= m1 * (1 + 1e-8),
                       abs(z), m1, f"k={z:.8g}")
                lhs3 = (z**3).imag / (3 * R * R)
                _check(checks, "theorem.cubic_lemma", pid, c,
                       lhs3 <= 0.25 * z.imag + 1e-15, lhs3, 0.25 * z.imag,
                       f"k={z:.8g}")
        if len(ratios) >= 2:
            spread = max(ratios) / min(ratios)
            cap = cfg.tolerance("ratio_spread", tol_scale)
            _check(checks, "theorem.ratio_spread", pid, sweep[0],
                   spread <= cap, spread, cap)
    finite = [r.ratio for r in rows if r.ratio > 0]
    theorem_c = ConstantEstimate(
        name="theorem_C",
        value=max(finite) if finite else 0.0,
        stability=0.0,
    )
    return rows, theorem_c


# ---------------------------------------------------------------------------
# report assembly


def _write_theorem_table(rows, out_dir: Path, fmt: str):
    if fmt == "json":
        payload = [
            {
                "id": r.potential_id,
                "c": _cnum(r.c),
                "lhs": r.lhs,
                "m1": r.m1,
                "mp": r.mp,
                "rhs_core": r.rhs_core,
                "ratio": r.ratio,
            }
            for r in rows
        ]
        (out_dir / "theorem.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n"
        )
        return
    lines = ["id,c,lhs,m1,mp,rhs_core,ratio"]
    for r in rows:
        cval = repr(r.c.real) if r.c.imag == 0 else repr(r.c)
        lines.append(
            f"{r.potential_id},{cval},{r.lhs!r},{r.m1!r},{r.mp!r},"
            f"{r.rhs_core!r},{r.ratio!r}"
        )
    (out_dir / "theorem.csv").write_text("\n".join(lines) + "\n")


def _write_svg(cfg, cache, out_dir: Path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for pid, spec in sorted(cfg.potentials, key=lambda t: t[0]):
        key = (pid, 1 + 0j)
        sp = cache.get(key)
        if sp is None:
            sp = cache[key] = spectra.find_spectrum(spec)
        m1 = spec.l1()
        R = 2 * m1
        fig, (axk, axl) = plt.subplots(1, 2, figsize=(9, 4.2))
        th = np.linspace(0, math.pi, 200)
        axk.plot(m1 * np.cos(th), m1 * np.sin(th), "--", lw=0.8, label="|k| = m1")
        axk.plot(R * np.cos(th), R * np.sin(th), ":", lw=0.8, label="|k| = R")
        axk.scatter([s.k.real for s in sp], [s.k.imag for s in sp], marker="x")
        axk.set_title(f"{pid}: zeros of a(k)")
        axk.set_xlabel("Re k")
        axk.set_ylabel("Im k")
        axk.legend(fontsize=7)
        axk.set_aspect("equal", adjustable="datalim")
        full = np.linspace(0, 2 * math.pi, 300)
        axl.plot(m1**2 * np.cos(full), m1**2 * np.sin(full), "--", lw=0.8,
                 label="|lambda| = m1^2")
        axl.scatter([s.lam.real for s in sp], [s.lam.imag for s in sp], marker="x")
        axl.set_title("eigenvalues lambda = k^2")
        axl.set_xlabel("Re lambda")
        axl.set_ylabel("Im lambda")
        axl.legend(fontsize=7)
        axl.set_aspect("equal", adjustable="datalim")
        fig.tight_layout()
        fig.savefig(out_dir / f"{pid}.svg")
        plt.close(fig)


def run_config(
    cfg: RunConfig,
    out_dir="jostlab-out",
    fmt: str = "csv",
    svg: bool = False,
    tol_scale: float = 1.0,
) -> int:
    """Execute the configured tasks, write the report bundle, and return the
    process exit status."""
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown format {fmt!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checks: list[dict] = []
    cache: dict = {}
    rng = np.random.default_rng(cfg.seed)
    results: dict = {}
    failures: list[str] = []
    sweep = cfg.sweep if cfg.sweep is not None else (1.0 + 0j,)

    task_fns = {
        "spectrum": lambda pid, spec, c: _task_spectrum(
            cfg, pid, spec, c, cache, checks, tol_scale
        ),
        "trace": lambda pid, spec, c: _task_trace(
            cfg, pid, spec, c, cache, checks, tol_scale
        ),
        "bounds": lambda pid, spec, c: _task_bounds(
            cfg, pid, spec, c, checks, tol_scale, rng
        ),
    }
    for pid, spec in sorted(cfg.potentials, key=lambda t: t[0]):
        per_pot: dict = {}
        for task in ALL_TASKS[:3]:
            if task not in cfg.tasks:
                continue
            per_task = {}
            for c in sweep:
                try:
                    per_task[_scalar_key(c)] = task_fns[task](pid, spec, complex(c))
                except (
                    jost.IntegrationError,
                    traceform.UnwrapError,
                    spectra.BoundaryZeroError,
                ) as exc:
                    failures.append(f"{task}/{pid}/c={c}: {exc}")
                    per_task[_scalar_key(c)] = {"error": str(exc)}
            per_pot[task] = per_task
        results[pid] = per_pot

    constants = []
    if "theorem" in cfg.tasks:
        try:
            rows, theorem_c = theorem_report(cfg, cache, checks, tol_scale)
        except (
            jost.IntegrationError,
            traceform.UnwrapError,
            spectra.BoundaryZeroError,
        ) as exc:
            failures.append(f"theorem: {exc}")
            rows, theorem_c = [], None
        else:
            _write_theorem_table(rows, out_dir, fmt)
            constants.append(theorem_c)
            results["theorem"] = {
                "rows": len(rows),
                "theorem_C": theorem_c.value,
            }

    if "bounds" in cfg.tasks:
        sups = [
            r["bounds"][key]["s1_scaling"]["sup_ratio"]
            for r in results.values()
            if isinstance(r, dict) and "bounds" in r
            for key in r["bounds"]
            if isinstance(r["bounds"][key].get("s1_scaling"), dict)
            and "sup_ratio" in r["bounds"][key]["s1_scaling"]
        ]
        stabs = [
            r["bounds"][key]["s1_scaling"]["stability"]
            for r in results.values()
            if isinstance(r, dict) and "bounds" in r
            for key in r["bounds"]
            if isinstance(r["bounds"][key].get("s1_scaling"), dict)
            and "stability" in r["bounds"][key]["s1_scaling"]
        ]
        if sups:
            constants.append(
                ConstantEstimate(
                    name="s1_scaling_C",
                    value=max(sups),
                    stability=max(stabs) if stabs else 0.0,
                )
            )

    failed = [c for c in checks if not c["passed"]]
    report = {
        "schema_version": SCHEMA_VERSION,
        "p": cfg.p,
        "seed": cfg.seed,
        "tasks": list(cfg.tasks),
        "tol_scale": tol_scale,
        "potentials": [pid for pid, _ in sorted(cfg.potentials, key=lambda t: t[0])],
        "results": results,
        "checks": checks,
        "failed_checks": failed,
        "numerical_failures": failures,
    }
    (out_dir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
    )
    (out_dir / "constants.json").write_text(
        json.dumps(
            [
                {"name": c.name, "value": c.value, "stability": c.stability}
                for c in constants
            ],
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    if svg:
        _write_svg(cfg, cache, out_dir)

    for c in failed:
        print(
            f"FAIL {c['name']} potential={c['potential']} c={c['c']} "
            f"observed={c['observed']} threshold={c['threshold']} {c['note']}",
            file=sys.stderr,
        )
    for f in failures:
        print(f"NUMERICAL {f}", file=sys.stderr)
    if failures:
        return 3
    return 1 if failed else 0


def _scalar_key(c) -> str:
    c = complex(c)
    return repr(c.real) if c.imag == 0 else repr(c)


def _json_default(obj):
    if isinstance(obj, complex):
        return _cnum(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not serializable: {obj!r}")


# ---------------------------------------------------------------------------
# CLI


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="jostlab",
        description="Spectral checks for half-line Schrodinger operators "
        "with complex potentials",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ALL_TASKS + ("all",):
        p = sub.add_parser(name, help=f"run the {name} task(s)")
        p.add_argument("--config", type=str, default=None,
                       help="TOML or JSON run configuration")
        p.add_argument("--out", type=str, default="jostlab-out")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--svg", action="store_true")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol-scale", type=float, default=1.0)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config is not None:
            cfg = load_config(args.config)
        else:
            cfg = RunConfig(potentials=default_corpus())
        tasks = ALL_TASKS if args.command == "all" else (args.command,)
        cfg = RunConfig(
            potentials=cfg.potentials,
            p=cfg.p,
            tasks=tasks,
            sweep=cfg.sweep,
            tolerances=cfg.tolerances,
            seed=cfg.seed if args.seed is None else args.seed,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run_config(
            cfg,
            out_dir=args.out,
            fmt=args.format,
            svg=args.svg,
            tol_scale=args.tol_scale,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (jost.IntegrationError, traceform.UnwrapError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
