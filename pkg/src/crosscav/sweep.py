"""Parameter sweeps, figure presets and tabular output.

A sweep varies one quantity (cavity detuning, drive phase difference, the
cross-correlation strength, or the ensemble size) over a uniform grid and
evaluates one or more solvers per grid point.  Presets reproduce the
captioned parameter sets of the reference figures; they carry the
scaled combinations (sqrt(N) Omega, sqrt(N) g_c, sqrt(N) eta) and derive
per-emitter values from a documented default of N = 100, since only the
scaled combinations are physically pinned.

Each preset that has a dashed (eta = 0) and a solid (sqrt(N) eta = 1) curve
runs both as named variants of one sweep, so a single emitted file contains
both curves.
"""

from __future__ import annotations

import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator

from . import analytic, lindblad
from .analytic import Branch, Observables
from .model import (EffectiveModel, ModelError, PhysicalParams,
                    build_effective_model)


class SweepVariable(str, Enum):
    DELTA_C = "delta-c"
    DELTA_PHI = "delta-phi"
    ETA = "eta"
    N = "n"


class Solver(str, Enum):
    ANALYTIC_AUTO = "analytic"
    NUMERIC_GAMMA0_ON = "numeric-g0on"
    NUMERIC_GAMMA0_OFF = "numeric-g0off"
    LINEAR_LIMIT = "linear"


@dataclass(frozen=True)
class SweepSpec:
    base: PhysicalParams
    variable: SweepVariable
    start: float
    stop: float
    count: int
    solvers: tuple[Solver, ...]
    eta_variants: tuple[tuple[str, float], ...] = ()
    output_path: str = "-"
    numeric_start_dim: int = 16
    numeric_max_dim: int = 64

    def __post_init__(self):
        if self.count < 2:
            raise ValueError(f"grid count must be >= 2, got {self.count}")
        if not self.start < self.stop:
            raise ValueError(
                f"grid start must be < stop, got [{self.start}, {self.stop}]")
        if not self.solvers:
            raise ValueError("at least one solver is required")

    def grid(self) -> list[float]:
        step = (self.stop - self.start) / (self.count - 1)
        return [self.start + i * step for i in range(self.count)]

    def variants(self) -> tuple[tuple[str, float], ...]:
        if self.eta_variants:
            return self.eta_variants
        return (("", self.base.eta),)


@dataclass(frozen=True)
class DerivedRates:
    """Per-variant closed-form rate columns."""

    n_delta_c: float
    n_gamma_c: float
    gamma_s: float
    g_eff_sq: float


@dataclass(frozen=True)
class SweepRow:
    variable_value: float
    observables: dict[tuple[str, Solver], Observables | None]
    derived: dict[str, DerivedRates]
    errors: dict[tuple[str, Solver], str]


def _apply_variable(base: PhysicalParams, variable: SweepVariable,
                    value: float) -> PhysicalParams:
    if variable is SweepVariable.DELTA_C:
        return replace(base, delta_c=value)
    if variable is SweepVariable.DELTA_PHI:
        return replace(base, phi1=base.phi2 + value)
    if variable is SweepVariable.ETA:
        return replace(base, eta=value)
    if variable is SweepVariable.N:
        n = int(round(value))
        if n < 1 or abs(value - n) > 1e-9:
            raise ValueError(f"ensemble-size grid value {value} is not a "
                             "positive integer")
        return replace(base, n_emitters=n)
    raise ValueError(f"unknown sweep variable {variable}")


def _solve_one(model: EffectiveModel, solver: Solver, spec: SweepSpec):
    if solver is Solver.ANALYTIC_AUTO:
        return analytic.observables_auto(model)
    if solver is Solver.LINEAR_LIMIT:
        return analytic.linear_limit_observables(model)
    include_g0 = solver is Solver.NUMERIC_GAMMA0_ON
    rho = lindblad.steady_state_auto(
        model, include_gamma0=include_g0,
        start_dim=spec.numeric_start_dim, max_dim=spec.numeric_max_dim,
        validate=False)
    return lindblad.observables_from_rho(rho)


def evaluate_point(spec: SweepSpec, value: float) -> SweepRow:
    """One grid point: all variants x solvers, failures recorded in-row."""
    observables: dict[tuple[str, Solver], Observables | None] = {}
    derived: dict[str, DerivedRates] = {}
    errors: dict[tuple[str, Solver], str] = {}
    for label, eta in spec.variants():
        try:
            params = _apply_variable(spec.base, spec.variable, value)
            params = replace(params, eta=eta)
        except (ValueError, ModelError) as err:
            for solver in spec.solvers:
                observables[(label, solver)] = None
                errors[(label, solver)] = str(err)
            continue
        n = params.n_emitters
        from .model import (collective_decay_rate, dipole_shift,
                            effective_drive, single_emitter_rate)
        derived[label] = DerivedRates(
            n_delta_c=n * dipole_shift(params),
            n_gamma_c=n * collective_decay_rate(params),
            gamma_s=single_emitter_rate(params),
            g_eff_sq=abs(effective_drive(params)) ** 2,
        )
        try:
            model = build_effective_model(params, warn_bad_cavity=False)
        except ModelError as err:
            for solver in spec.solvers:
                observables[(label, solver)] = None
                errors[(label, solver)] = str(err)
            continue
        for solver in spec.solvers:
            try:
                observables[(label, solver)] = _solve_one(model, solver, spec)
            except Exception as err:  # per-point isolation
                observables[(label, solver)] = None
                errors[(label, solver)] = f"{type(err).__name__}: {err}"
    return SweepRow(value, observables, derived, errors)


def run_sweep(spec: SweepSpec, workers: int = 1) -> Iterator[SweepRow]:
    """Rows in ascending grid order; grid points are independent."""
    grid = spec.grid()
    if workers <= 1:
        for value in grid:
            yield evaluate_point(spec, value)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(evaluate_point, spec, v) for v in grid]
        for fut in futures:  # submission order == grid order
            yield fut.result()


# --- presets -------------------------------------------------------------

PRESET_NAMES = ("fig1a", "fig1b", "fig2", "fig3a", "fig3b", "fig4")

_CAPTION = dict(kappa_over_gamma=1.62e6, sqrt_n_g_c=5.02e3,
                omega_n_minus_omega_c=50.0, sqrt_n_eta_solid=1.0)
DEFAULT_PRESET_N = 100  # documented choice; captions pin only sqrt(N)-scaled combinations


def _caption_base(n_emitters: int, sqrt_n_omega: float, epsilon: float,
                  delta_phi: float = 0.0, eta_sqrt_n: float = 1.0) -> PhysicalParams:
    sq = math.sqrt(n_emitters)
    return PhysicalParams(
        gamma=1.0,
        kappa=_CAPTION["kappa_over_gamma"],
        g_c=_CAPTION["sqrt_n_g_c"] / sq,
        n_emitters=n_emitters,
        omega_n_minus_omega_c=_CAPTION["omega_n_minus_omega_c"],
        delta_c=0.0,
        omega_rabi=sqrt_n_omega / sq,
        epsilon_drive=epsilon,
        phi1=delta_phi,
        phi2=0.0,
        eta=eta_sqrt_n / sq,
    )


def preset(name: str, n_emitters: int = DEFAULT_PRESET_N) -> SweepSpec:
    """Figure-reproduction sweep specifications."""
    sq = math.sqrt(n_emitters)
    both_etas = (("eta0_", 0.0), ("etaN_", 1.0 / sq))
    if name == "fig1a":
        return SweepSpec(
            base=_caption_base(n_emitters, sqrt_n_omega=50.0, epsilon=0.0),
            variable=SweepVariable.DELTA_C, start=-200.0, stop=100.0,
            count=401, solvers=(Solver.ANALYTIC_AUTO,),
            eta_variants=both_etas)
    if name == "fig1b":
        return SweepSpec(
            base=_caption_base(n_emitters, sqrt_n_omega=0.0, epsilon=3.0e3),
            variable=SweepVariable.DELTA_C, start=-200.0, stop=100.0,
            count=401, solvers=(Solver.ANALYTIC_AUTO,),
            eta_variants=both_etas)
    if name == "fig2":
        # rate sweep: the content is in the derived columns N delta_c etc.
        return SweepSpec(
            base=_caption_base(n_emitters, sqrt_n_omega=0.0, epsilon=0.0),
            variable=SweepVariable.DELTA_C, start=-2.0e6, stop=2.0e6,
            count=401, solvers=(Solver.LINEAR_LIMIT,),
            eta_variants=both_etas)
    if name == "fig3a":
        return SweepSpec(
            base=_caption_base(n_emitters, sqrt_n_omega=50.0, epsilon=3.0e3,
                               delta_phi=0.0),
            variable=SweepVariable.DELTA_C, start=-200.0, stop=100.0,
            count=401, solvers=(Solver.ANALYTIC_AUTO,),
            eta_variants=both_etas)
    if name == "fig3b":
        return SweepSpec(
            base=_caption_base(n_emitters, sqrt_n_omega=50.0, epsilon=3.0e3,
                               delta_phi=math.pi / 2.0),
            variable=SweepVariable.DELTA_C, start=-200.0, stop=100.0,
            count=401, solvers=(Solver.ANALYTIC_AUTO,),
            eta_variants=both_etas)
    if name == "fig4":
        return SweepSpec(
            base=_caption_base(n_emitters, sqrt_n_omega=50.0, epsilon=3.0e3,
                               delta_phi=0.0, eta_sqrt_n=1.0),
            variable=SweepVariable.DELTA_C, start=-200.0, stop=100.0,
            count=101,
            solvers=(Solver.ANALYTIC_AUTO, Solver.NUMERIC_GAMMA0_ON))
    raise ValueError(
        f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")


# --- output --------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _columns(spec: SweepSpec) -> list[str]:
    cols = ["variable"]
    for label, _ in spec.variants():
        for solver in spec.solvers:
            base = f"{label}{solver.value}"
            cols += [f"{base}_mean_excitation", f"{base}_g2",
                     f"{base}_amplitude_re", f"{base}_amplitude_im",
                     f"{base}_second_moment", f"{base}_branch",
                     f"{base}_error"]
        cols += [f"{label}N_delta_c", f"{label}N_gamma_c",
                 f"{label}gamma_s", f"{label}g_eff_sq"]
    return cols


def _row_record(spec: SweepSpec, row: SweepRow) -> dict:
    rec: dict[str, object] = {"variable": row.variable_value}
    for label, _ in spec.variants():
        for solver in spec.solvers:
            base = f"{label}{solver.value}"
            obs = row.observables.get((label, solver))
            if obs is None:
                rec[f"{base}_mean_excitation"] = math.nan
                rec[f"{base}_g2"] = math.nan
                rec[f"{base}_amplitude_re"] = math.nan
                rec[f"{base}_amplitude_im"] = math.nan
                rec[f"{base}_second_moment"] = math.nan
                rec[f"{base}_branch"] = ""
                rec[f"{base}_error"] = row.errors.get((label, solver), "")
            else:
                rec[f"{base}_mean_excitation"] = obs.mean_excitation
                rec[f"{base}_g2"] = obs.g2
                rec[f"{base}_amplitude_re"] = obs.amplitude.real
                rec[f"{base}_amplitude_im"] = obs.amplitude.imag
                rec[f"{base}_second_moment"] = obs.second_moment
                rec[f"{base}_branch"] = obs.branch.value
                rec[f"{base}_error"] = ""
        der = row.derived.get(label)
        rec[f"{label}N_delta_c"] = der.n_delta_c if der else math.nan
        rec[f"{label}N_gamma_c"] = der.n_gamma_c if der else math.nan
        rec[f"{label}gamma_s"] = der.gamma_s if der else math.nan
        rec[f"{label}g_eff_sq"] = der.g_eff_sq if der else math.nan
    return rec


def emit(spec: SweepSpec, rows: Iterable[SweepRow], fmt: str = "csv",
         path: str = "-") -> None:
    """Write rows as CSV or JSON-lines with 12 significant digits."""
    cols = _columns(spec)
    records = [_row_record(spec, row) for row in rows]
    if not records:
        raise ValueError("emit requires at least one row")

    def render(out) -> None:
        if fmt == "csv":
            out.write(",".join(cols) + "\n")
            for rec in records:
                cells = []
                for c in cols:
                    v = rec[c]
                    cells.append(_fmt(v) if isinstance(v, float) else str(v))
                out.write(",".join(cells) + "\n")
        elif fmt == "json-lines":
            for rec in records:
                clean = {}
                for c in cols:
                    v = rec[c]
                    if isinstance(v, float):
                        clean[c] = float(_fmt(v)) if math.isfinite(v) else None
                    else:
                        clean[c] = v
                out.write(json.dumps(clean) + "\n")
        else:
            raise ValueError(f"unknown output format {fmt!r}")

    if path == "-":
        render(sys.stdout)
    else:
        with open(path, "w") as fh:
            render(fh)
