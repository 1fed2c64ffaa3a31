"""Command-line front end.

Subcommands:
    sweep    -- scan delta-c / delta-phi / eta / N and tabulate observables
    preset   -- run a named figure-reproduction sweep (fig1a .. fig4)
    rates    -- print every derived model quantity for one parameter set
    validate -- run the spin+cavity oracle checks of the eliminated model

Exit codes: 0 success, 1 solver failure at every grid point (or failed
validation), 2 config-file parse error, 3 unwritable output path.
All rates are in units of gamma (gamma = 1).
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys

from . import analytic, lindblad
from .model import (ModelError, PhysicalParams, build_effective_model,
                    displacement_alpha)
from .sweep import (PRESET_NAMES, DEFAULT_PRESET_N, Solver, SweepSpec,
                    SweepVariable, emit, preset, run_sweep)

_PARAM_FIELDS = {f.name: f.type for f in dataclasses.fields(PhysicalParams)}


class ConfigError(Exception):
    def __init__(self, path, line, column, message):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}:{line}:{column}: {message}")


def parse_config(path: str) -> dict:
    """key = value lines, '#' comments; keys are PhysicalParams fields."""
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as err:
        raise ConfigError(path, 0, 0, f"cannot read config: {err}") from err
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].rstrip("\n")
        if not line.strip():
            continue
        if "=" not in line:
            raise ConfigError(path, lineno, len(line.rstrip()) + 1,
                              "expected 'key = value'")
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        if key not in _PARAM_FIELDS:
            raise ConfigError(path, lineno, line.index(key) + 1,
                              f"unknown parameter {key!r}")
        value_str = value_part.strip()
        col = line.index("=") + 2
        try:
            if key == "n_emitters":
                values[key] = int(value_str)
            else:
                values[key] = float(value_str)
        except ValueError as err:
            raise ConfigError(path, lineno, col,
                              f"bad value for {key}: {value_str!r}") from err
    return values


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("physical parameters (units of gamma)")
    g.add_argument("--config", help="key = value parameter file")
    g.add_argument("--gamma", type=float)
    g.add_argument("--kappa", type=float)
    g.add_argument("--g-c", dest="g_c", type=float)
    g.add_argument("--n-emitters", dest="n_emitters", type=int)
    g.add_argument("--omega-n-minus-omega-c", dest="omega_n_minus_omega_c",
                   type=float)
    g.add_argument("--delta-c", dest="delta_c", type=float)
    g.add_argument("--omega-rabi", dest="omega_rabi", type=float)
    g.add_argument("--epsilon-drive", dest="epsilon_drive", type=float)
    g.add_argument("--phi1", type=float)
    g.add_argument("--phi2", type=float)
    g.add_argument("--eta", type=float)
    s = parser.add_argument_group("scaled conveniences")
    s.add_argument("--delta-phi", dest="delta_phi", type=float,
                   help="sets phi1 = phi2 + delta_phi")
    s.add_argument("--eta-sqrtn", dest="eta_sqrtn", type=float,
                   help="sqrt(N) eta; converted using n_emitters")
    s.add_argument("--omega-sqrtn", dest="omega_sqrtn", type=float,
                   help="sqrt(N) Omega; converted using n_emitters")
    s.add_argument("--g-c-sqrtn", dest="g_c_sqrtn", type=float,
                   help="sqrt(N) g_c; converted using n_emitters")


def build_params(args, base: PhysicalParams | None = None) -> PhysicalParams:
    values = dataclasses.asdict(base) if base else {}
    if args.config:
        values.update(parse_config(args.config))
    for name in _PARAM_FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    params = PhysicalParams(**values) if values else PhysicalParams()
    sq = math.sqrt(params.n_emitters)
    updates = {}
    if getattr(args, "omega_sqrtn", None) is not None:
        updates["omega_rabi"] = args.omega_sqrtn / sq
    if getattr(args, "g_c_sqrtn", None) is not None:
        updates["g_c"] = args.g_c_sqrtn / sq
    if getattr(args, "eta_sqrtn", None) is not None:
        updates["eta"] = args.eta_sqrtn / sq
    if getattr(args, "delta_phi", None) is not None:
        updates["phi1"] = params.phi2 + args.delta_phi
    if updates:
        params = dataclasses.replace(params, **updates)
    return params


def _emit_rows(spec: SweepSpec, rows, fmt: str, path: str) -> int:
    try:
        emit(spec, rows, fmt=fmt, path=path)
    except OSError as err:
        print(f"error: cannot write {path!r}: {err}", file=sys.stderr)
        return 3
    return 0


def _run_and_emit(spec: SweepSpec, fmt: str, path: str, workers: int) -> int:
    rows = list(run_sweep(spec, workers=workers))
    any_ok = any(obs is not None for row in rows
                 for obs in row.observables.values())
    code = _emit_rows(spec, rows, fmt, path)
    if code:
        return code
    if not any_ok:
        print("error: every grid point failed; see the error columns",
              file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args) -> int:
    params = build_params(args)
    spec = SweepSpec(
        base=params,
        variable=SweepVariable(args.variable),
        start=args.start, stop=args.stop, count=args.count,
        solvers=tuple(Solver(s) for s in args.solver),
        output_path=args.output,
    )
    return _run_and_emit(spec, args.format, args.output, args.workers)


def cmd_preset(args) -> int:
    spec = preset(args.name, n_emitters=args.n_emitters)
    overrides = {}
    if args.count is not None:
        overrides["count"] = args.count
    if args.solver:
        overrides["solvers"] = tuple(Solver(s) for s in args.solver)
    if overrides:
        spec = dataclasses.replace(spec, **overrides)
    return _run_and_emit(spec, args.format, args.output, args.workers)


def cmd_rates(args) -> int:
    params = build_params(args)
    try:
        model = build_effective_model(params)
    except ModelError as err:
        # derived rates exist even where the bosonic solvers do not
        print(f"note: {err}", file=sys.stderr)
        model = None
    print(f"# parameters (units of gamma = {params.gamma})")
    for f in dataclasses.fields(PhysicalParams):
        print(f"{f.name} = {getattr(params, f.name):.12g}")
    print("# derived")
    if model is None:
        from .model import (collective_decay_rate, dipole_shift,
                            effective_drive, effective_drive_sq,
                            single_emitter_rate)
        n = params.n_emitters
        print(f"delta_c_shift = {dipole_shift(params):.12g}")
        print(f"N_delta_c = {n * dipole_shift(params):.12g}")
        print(f"gamma_c = {collective_decay_rate(params):.12g}")
        print(f"gamma_s = {single_emitter_rate(params):.12g}")
        print(f"g_eff = {effective_drive(params):.12g}")
        print(f"g_eff_sq = {effective_drive_sq(params):.12g}")
        print(f"alpha = {displacement_alpha(params):.12g}")
        return 0
    n = model.n_emitters
    print(f"alpha = {model.alpha:.12g}")
    print(f"delta_n = {model.delta_n:.12g}")
    print(f"delta_c_shift = {model.delta_c_shift:.12g}")
    print(f"N_delta_c = {n * model.delta_c_shift:.12g}")
    print(f"gamma_c = {model.gamma_c:.12g}")
    print(f"N_gamma_c = {n * model.gamma_c:.12g}")
    print(f"gamma_s = {model.gamma_s:.12g}")
    print(f"g_eff = {model.g_eff:.12g}")
    print(f"g_eff_sq = {model.g_eff_sq:.12g}")
    print(f"bar_delta = {model.bar_delta:.12g}")
    print(f"big_gamma = {model.big_gamma:.12g}")
    print(f"gamma0 = {model.gamma0:.12g}")
    print(f"bar_delta_n = {model.bar_delta_n:.12g}")
    print(f"bar_omega = {model.bar_omega:.12g}")
    print(f"tilde_omega = {model.tilde_omega:.12g}")
    print(f"p = {model.p_param:.12g}")
    if model.theta is not None:
        print(f"theta = {model.theta:.12g}")
        print(f"bar_gamma = {model.bar_gamma_param:.12g}")
    print(f"branch = {analytic.select_branch(model).value}")
    return 0


def cmd_validate(args) -> int:
    """Oracle checks of the full spin+cavity model vs the eliminated rates."""
    import numpy as np

    failures = 0

    def report(name, ok, detail):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failures += 0 if ok else 1

    # 1. Purcell rate from an exponential fit (eta = 0)
    p1 = PhysicalParams(kappa=1.0e4, g_c=10.0, n_emitters=1, eta=0.0,
                        delta_c=0.0, omega_n_minus_omega_c=0.0,
                        omega_rabi=0.0, epsilon_drive=0.0)
    from .model import single_emitter_rate
    expected = single_emitter_rate(p1)
    fitted = lindblad.fitted_spin_decay_rate(p1)
    rel = abs(fitted - expected) / expected
    report("purcell-decay-fit", rel < 0.05,
           f"fitted {fitted:.6g} vs gamma_s {expected:.6g} (rel {rel:.2e})")

    # 2. Decay suppression at eta = 1, delta_c = g_c sqrt(kappa/gamma)
    dc = 10.0 * math.sqrt(1.0e4)
    p2 = PhysicalParams(kappa=1.0e4, g_c=10.0, n_emitters=1, eta=1.0,
                        delta_c=dc, omega_n_minus_omega_c=-dc,
                        omega_rabi=0.0, epsilon_drive=0.0)
    fitted2 = lindblad.fitted_spin_decay_rate(p2, expected_rate=0.0)
    report("decay-suppression", abs(fitted2) < 0.02,
           f"fitted rate {fitted2:.3e} at the suppression point")

    # 3. Driven empty cavity reaches the coherent displaced state
    p3 = PhysicalParams(kappa=1.0e4, g_c=0.0, n_emitters=1, eta=0.0,
                        delta_c=2.0e3, omega_n_minus_omega_c=0.0,
                        omega_rabi=0.0, epsilon_drive=1.0e3, phi2=0.4)
    liouv = lindblad.build_full_liouvillian(p3, n_spins=1, cavity_dim=8)
    rho = lindblad.steady_state(liouv, validate=False)
    a_full = np.kron(np.eye(2, dtype=complex), lindblad.annihilation(8))
    a_mean = rho.expect(a_full)
    alpha = displacement_alpha(p3)
    target = -alpha * np.exp(-1j * p3.phi2)
    err = abs(a_mean - target)
    report("displaced-cavity", err < 1e-6,
           f"<a> = {a_mean:.6g}, expected {target:.6g} (|diff| {err:.2e})")

    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="crosscav",
        description="Steady states of driven two-level ensembles in leaky "
                    "cavities with cross-correlated decay (rates in units "
                    "of gamma).")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="scan one variable over a grid")
    p_sweep.add_argument("--variable", required=True,
                         choices=[v.value for v in SweepVariable])
    p_sweep.add_argument("--start", type=float, required=True)
    p_sweep.add_argument("--stop", type=float, required=True)
    p_sweep.add_argument("--count", type=int, required=True)
    p_sweep.add_argument("--solver", action="append",
                         choices=[s.value for s in Solver],
                         help="repeatable; default analytic")
    p_sweep.add_argument("--output", "-o", default="-")
    p_sweep.add_argument("--format", choices=("csv", "json-lines"),
                         default="csv")
    p_sweep.add_argument("--workers", type=int, default=1)
    _add_param_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_preset = sub.add_parser("preset", help="run a figure preset")
    p_preset.add_argument("name", choices=PRESET_NAMES)
    p_preset.add_argument("--n-emitters", type=int, default=DEFAULT_PRESET_N,
                          help="ensemble size (captions pin only the "
                               "sqrt(N)-scaled combinations)")
    p_preset.add_argument("--count", type=int, default=None,
                          help="override the grid point count")
    p_preset.add_argument("--solver", action="append",
                          choices=[s.value for s in Solver],
                          help="replace the preset's solver set")
    p_preset.add_argument("--output", "-o", default="-")
    p_preset.add_argument("--format", choices=("csv", "json-lines"),
                          default="csv")
    p_preset.add_argument("--workers", type=int, default=1)
    p_preset.set_defaults(func=cmd_preset)

    p_rates = sub.add_parser("rates", help="print derived model quantities")
    _add_param_flags(p_rates)
    p_rates.set_defaults(func=cmd_rates)

    p_val = sub.add_parser("validate",
                           help="full spin+cavity oracle checks")
    p_val.set_defaults(func=cmd_validate)

    args = parser.parse_args(argv)
    if args.command == "sweep" and not args.solver:
        args.solver = [Solver.ANALYTIC_AUTO.value]
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, ModelError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
