"""Command-line entry point.

Commands:
  simulate      integrate a state trajectory, write state.csv + monitors.json
  invariant     co-integrate state and invariant, write expectation.csv,
                spectrum.csv, invariant_report.json
  action-check  stationarity + gauge-shift diagnostics, write action_report.json
  verify        randomized property suites, write verify_report.json

Exit codes: 0 success, 1 usage/config error, 2 verification or monitor
failure. Runs are deterministic: the same config and seed produce
bit-identical output files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import invariant as invariant_mod
from . import linalg, verify
from .action import gauge_shift_check, stationarity_check, DiscretizedPath
from .dynamics import (
    TimeGrid,
    conservation_series,
    integrate_invariant,
    integrate_state,
    write_trajectory_csv,
)
from .errors import (
    BlowupError,
    ConfigError,
    IntegrationError,
    ModelValidationError,
    NotHermitianError,
    ScheduleDomainError,
)
from .model import model_from_config, tabulated
from .scenarios import LEAKAGE_THRESHOLD, SCENARIOS, build_scenario

TRACE_DRIFT_THRESHOLD = 1e-8
MIN_EIGENVALUE_THRESHOLD = -1e-8
DEFAULT_DRIFT_BOUND = 1e-6
DEFAULT_RESIDUAL_BOUND = 1e-4
GAUGE_DEFECT_BOUND = 1e-10


class _Parser(argparse.ArgumentParser):
    # usage errors must exit 1, not argparse's default 2
    def error(self, message):
        raise ConfigError(None, message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weakinv", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("scenario", nargs="?", default=None,
                       help=f"named scenario: {', '.join(sorted(SCENARIOS))}")
        p.add_argument("--config", type=Path, help="JSON run config")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--steps", type=int, help="override grid.n_steps")
        p.add_argument("--method", choices=("rk4", "midpoint"))
        p.add_argument("--seed", type=int)
        return p

    add_run_command("simulate", "integrate the state trajectory")
    add_run_command("invariant", "co-integrate state and invariant, analyze conservation")
    add_run_command("action-check", "stationarity and gauge-shift diagnostics")

    pv = sub.add_parser("verify", help="randomized property suites")
    pv.add_argument("--out", type=Path)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--trials", type=int, default=100)
    pv.add_argument("--break-adjoint", action="store_true", help=argparse.SUPPRESS)
    return parser


# ---------------------------------------------------------------------------
# run-config resolution
# ---------------------------------------------------------------------------


def _load_config(args) -> dict:
    if getattr(args, "config", None) is None:
        return {}
    try:
        with open(args.config) as f:
            cfg = json.load(f)
    except OSError as e:
        raise ConfigError("config", f"cannot read {args.config}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ConfigError("config", f"invalid JSON: {e}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config", "must be a JSON object")
    return cfg


def _parse_literal(value, field):
    try:
        return linalg.parse_matrix_literal(value)
    except ValueError as e:
        raise ConfigError(field, str(e)) from None


class RunSetup:
    """Resolved model, grid, method, defaults, and output directory."""

    def __init__(self, args):
        cfg = _load_config(args)
        self.cfg = cfg
        self.seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))

        scenario = args.scenario if args.scenario is not None else cfg.get("scenario")
        if scenario is None:
            raise ConfigError("scenario", "is required (positional argument or config)")
        if isinstance(scenario, str):
            scenario_args = cfg.get("scenario_args", {})
            if not isinstance(scenario_args, dict):
                raise ConfigError("scenario_args", "must be an object")
            self.spec = build_scenario(scenario, **scenario_args)
            self.model = self.spec.model
        elif isinstance(scenario, dict):
            self.spec = None
            self.model = model_from_config(scenario, field="scenario")
        else:
            raise ConfigError("scenario", "must be a name or an inline model object")

        grid_cfg = cfg.get("grid")
        if grid_cfg is None:
            if self.spec is None:
                raise ConfigError("grid", "is required for inline models")
            grid = self.spec.default_grid
            t_start, t_end, n_steps = grid.t_start, grid.t_end, grid.n_steps
        else:
            if not isinstance(grid_cfg, dict):
                raise ConfigError("grid", "must be an object")
            try:
                t_start = float(grid_cfg["t_start"])
                t_end = float(grid_cfg["t_end"])
                n_steps = int(grid_cfg["n_steps"])
            except (KeyError, TypeError, ValueError):
                raise ConfigError("grid", "needs numeric t_start, t_end, n_steps") from None
        if args.steps is not None:
            n_steps = args.steps
        if n_steps < 1:
            raise ConfigError("grid.n_steps", "must be ≥ 1")
        if not t_end > t_start:
            raise ConfigError("grid.t_end", "must exceed grid.t_start")
        self.grid = TimeGrid(t_start, t_end, n_steps)

        self.method = args.method or cfg.get("method", "rk4")
        if self.method not in ("rk4", "midpoint"):
            raise ConfigError("method", "must be rk4 or midpoint")

        if "rho0" in cfg:
            self.rho0 = _parse_literal(cfg["rho0"], "rho0")
        elif self.spec is not None:
            self.rho0 = self.spec.default_rho0
        else:
            self.rho0 = linalg.identity(self.model.dim) / self.model.dim

        self.out_dir = Path(args.out) if args.out is not None else Path(cfg.get("output_dir", "."))
        self.leakage_index = (
            self.spec.truncation_dim - 1
            if self.spec is not None and self.spec.truncation_dim is not None
            else None
        )

    def invariant_seed(self) -> np.ndarray:
        raw = self.cfg.get("invariant_seed")
        if raw is None:
            if self.spec is not None:
                return self.spec.default_invariant_seed
            raise ConfigError("invariant_seed", "is required for inline models")
        if isinstance(raw, str):
            if raw == "identity":
                return linalg.identity(self.model.dim)
            if raw == "hamiltonian":
                return self.model.snapshot(self.grid.t_start).h
            if raw == "sz":
                if self.model.dim != 2:
                    raise ConfigError("invariant_seed", '"sz" needs a dim-2 model')
                return np.diag([1.0, -1.0]).astype(complex)
            raise ConfigError("invariant_seed", f"unknown name {raw!r}; "
                              'expected "sz", "hamiltonian", "identity", or a matrix literal')
        return _parse_literal(raw, "invariant_seed")

    def lambda_final(self) -> np.ndarray:
        raw = self.cfg.get("lambda_final")
        if raw is None:
            raise ConfigError("lambda_final", "is required for action-check")
        return _parse_literal(raw, "lambda_final")

    def write_json(self, name: str, payload: dict) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        with open(self.out_dir / name, "w") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _monitor_violations(report) -> list[str]:
    violations = []
    if report.max_trace_drift > TRACE_DRIFT_THRESHOLD:
        violations.append("trace")
    if report.min_eigenvalue < MIN_EIGENVALUE_THRESHOLD:
        violations.append("positivity")
    if report.max_leakage > LEAKAGE_THRESHOLD:
        violations.append("leakage")
    return violations


def cmd_simulate(args) -> int:
    setup = RunSetup(args)
    traj, monitors = integrate_state(
        setup.model, setup.rho0, setup.grid, setup.method,
        leakage_index=setup.leakage_index,
    )
    setup.out_dir.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(traj, setup.out_dir / "state.csv")
    violations = _monitor_violations(monitors)
    payload = monitors.to_dict()
    payload["violations"] = violations
    payload["grid"] = setup.grid.to_dict()
    setup.write_json("monitors.json", payload)
    if violations:
        print(f"monitor violation(s): {', '.join(violations)}", file=sys.stderr)
        return 2
    return 0


def cmd_invariant(args) -> int:
    setup = RunSetup(args)
    drift_bound = float(setup.cfg.get("drift_bound", DEFAULT_DRIFT_BOUND))
    state, monitors = integrate_state(
        setup.model, setup.rho0, setup.grid, setup.method,
        leakage_index=setup.leakage_index,
    )
    inv = integrate_invariant(setup.model, setup.invariant_seed(), "start",
                              setup.grid, setup.method)
    series = conservation_series(inv, state)
    report = invariant_mod.analyze(inv, state)
    spectrum = invariant_mod.spectrum_series(inv)

    setup.out_dir.mkdir(parents=True, exist_ok=True)
    invariant_mod.write_expectation_csv(setup.grid, series, setup.out_dir / "expectation.csv")
    invariant_mod.write_spectrum_csv(spectrum, setup.out_dir / "spectrum.csv")
    payload = report.to_dict()
    payload["drift_bound"] = drift_bound
    payload["monitors"] = monitors.to_dict()
    payload["grid"] = setup.grid.to_dict()
    setup.write_json("invariant_report.json", payload)
    if report.max_expectation_drift > drift_bound:
        print(
            f"expectation drift {report.max_expectation_drift:.3e} exceeds "
            f"bound {drift_bound:.3e}",
            file=sys.stderr,
        )
        return 2
    return 0


def cmd_action_check(args) -> int:
    setup = RunSetup(args)
    residual_bound = float(setup.cfg.get("residual_bound", DEFAULT_RESIDUAL_BOUND))
    lam_final = setup.lambda_final()
    report = stationarity_check(setup.model, setup.rho0, lam_final,
                                setup.grid, setup.method)

    # gauge check on the same solution path, with a seeded random rate table
    state, _ = integrate_state(setup.model, setup.rho0, setup.grid, setup.method)
    lam = integrate_invariant(setup.model, lam_final, "end", setup.grid, setup.method)
    path = DiscretizedPath(grid=setup.grid, rho=state.samples, lam=lam.samples)
    rng = np.random.default_rng(setup.seed)
    knots = np.linspace(setup.grid.t_start, setup.grid.t_end, 9)
    values = rng.uniform(-1.0, 1.0, size=9)
    gauge_defect = gauge_shift_check(path, setup.model,
                                     tabulated(knots, list(values), name="lambda"))

    payload = report.to_dict()
    payload["gauge_defect"] = gauge_defect
    payload["residual_bound"] = residual_bound
    setup.write_json("action_report.json", payload)

    ok = (
        report.grad_rho_residual <= residual_bound
        and report.grad_lam_residual <= residual_bound
        and gauge_defect <= GAUGE_DEFECT_BOUND
    )
    if not ok:
        print(
            f"action check failed: residuals ({report.grad_rho_residual:.3e}, "
            f"{report.grad_lam_residual:.3e}) vs bound {residual_bound:.3e}, "
            f"gauge defect {gauge_defect:.3e} vs {GAUGE_DEFECT_BOUND:.1e}",
            file=sys.stderr,
        )
        return 2
    return 0


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise ConfigError("trials", "must be ≥ 1")
    results = verify.run_all(args.seed, args.trials, break_adjoint=args.break_adjoint)
    all_pass = all(r.passed for r in results)
    payload = {
        "seed": args.seed,
        "trials": args.trials,
        "all_pass": all_pass,
        "properties": [r.to_dict() for r in results],
    }
    out_dir = Path(args.out) if args.out is not None else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "verify_report.json", "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{status}  {r.name}: worst defect {r.worst_defect:.3e} "
              f"(tolerance {r.tolerance:.1e}, {r.trials} trials)")
    return 0 if all_pass else 2


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "invariant":
            return cmd_invariant(args)
        if args.command == "action-check":
            return cmd_action_check(args)
        return cmd_verify(args)
    except BlowupError as e:
        print(f"error: {e} (step {e.step})", file=sys.stderr)
        return 2
    except IntegrationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ConfigError, ModelValidationError, NotHermitianError,
            ScheduleDomainError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())
