"""
cli.py: Command-line front end for freefall
"""

import argparse
import json
import logging
import math
import sys
from typing import Dict, List, Optional, Sequence

from .constants import BODIES, PhysicalConstants, resolve_body, resolve_units
from .errors import (
    ConvergenceError,
    FreefallError,
    PreconditionError,
    PropertyFailure,
    ResidualError,
)
from .exprparse import evaluate_constant, format_metric_spec, parse_metric_spec
from .geometry import DEFAULT_STEP, connection_bundle, bundle_residual, frame_field
from .lingrav import Coupling, gauge_orbit_check
from .metrics import BUILTIN_METRICS, builtin_spec_text, load_metric
from .tables import Table, gauge_table, profile_table, spectrum_table, tensor_block
from .thermal import (
    ChirpParams,
    QuadratureControls,
    hawking_temperature,
    schwarzschild_radius,
    spectrum_sweep,
    spectrum_temperature,
    surface_temperature,
    temperature_profile,
    unruh_temperature,
)
from .validation import split_assignment, validate_units

DEFAULT_TOLERANCE = 1e-6
SPECTRUM_IDENTITY_TOLERANCE = 1e-10
SPECTRUM_QUAD_TOLERANCE = 1e-6

TENSOR_CONVENTIONS = {
    "vierbein": "e^alpha_mu; index1 = alpha (Lorentz), index2 = mu (coordinate), eta = diag(+1,-1,-1,-1)",
    "anholonomity": "Omega_{mu nu}^lambda = 1/2 (e_alpha^lambda d_mu e^alpha_nu - (mu <-> nu))",
    "spin_connection": "Gamma_mu^{alpha beta}; index1 = mu, index2 = alpha, index3 = beta",
    "christoffel": "Gamma^lambda_{mu nu}; index1 = lambda, index2 = mu, index3 = nu",
}


def _parse_point(text: str) -> List[float]:
    parts = [p for p in (text or "").split(",")]
    if len(parts) != 4 or not all(p.strip() for p in parts):
        raise PreconditionError(f"--point needs 4 comma-separated coordinates, got {text!r}")
    return [evaluate_constant(p) for p in parts]


def _parse_overrides(assignments: Optional[Sequence[str]]) -> Dict[str, float]:
    overrides: Dict[str, float] = {}
    for text in assignments or []:
        try:
            name, value = split_assignment(text)
        except ValueError as exc:
            raise PreconditionError(f"--set: {exc}") from None
        overrides[name] = evaluate_constant(value)
    return overrides


def _load_config(path: str) -> Dict[str, object]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise PreconditionError(f"cannot read config {path!r}: {exc}") from None
    if not isinstance(data, dict):
        raise PreconditionError(f"config {path!r} must hold a JSON object of option defaults")
    return data


def _diagnostic(exc: BaseException) -> str:
    return " ".join([str(exc), *getattr(exc, "__notes__", [])])


class FreefallCLI:
    def __init__(self):
        self.parser = argparse.ArgumentParser(
            prog="freefall",
            description="Freely falling frames, linearized gravity and the Unruh/Hawking spectrum.",
        )
        self.parser.add_argument("--config", help="JSON file of option defaults; explicit flags win")
        self.subparsers: Dict[str, argparse.ArgumentParser] = {}
        commands = self.parser.add_subparsers(dest="command", required=True)

        frames = self._add(commands, "frames", "vierbein and connections of a metric at a point")
        frames.add_argument("--metric", default="minkowski", help=f"built-in ({', '.join(BUILTIN_METRICS)}) or spec file")
        frames.add_argument("--set", action="append", default=[], metavar="NAME=VALUE", help="override a spec parameter")
        frames.add_argument("--point", help="four comma-separated coordinates, e.g. 0,2,pi/2,0")
        frames.add_argument("--step", type=float, default=DEFAULT_STEP, help="relative finite-difference step")
        frames.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE, help="tetrad-postulate residual bound")
        frames.set_defaults(handler=self.cmd_frames)

        spectrum = self._add(commands, "spectrum", "Fourier power of the accelerated-observer chirp", units="natural")
        spectrum.add_argument("--a", type=float, default=1.0, help="acceleration")
        spectrum.add_argument("--omega", type=float, default=1.0, help="frequency of the falling wave")
        spectrum.add_argument("--xmin", type=float, default=0.1)
        spectrum.add_argument("--xmax", type=float, default=5.0)
        spectrum.add_argument("--steps", type=int, default=50)
        spectrum.add_argument("--epsilon", type=float, default=QuadratureControls.epsilon, help="series/quadrature split")
        spectrum.add_argument("--terms", type=int, default=QuadratureControls.series_terms, help="series terms")
        spectrum.add_argument("--workers", type=int, default=None)
        spectrum.set_defaults(handler=self.cmd_spectrum)

        temps = self._add(commands, "temps", "Unruh temperature profile around a mass")
        source = temps.add_mutually_exclusive_group()
        source.add_argument("--mass", type=float, help="mass of the central body")
        source.add_argument("--body", choices=sorted(BODIES), help="named body instead of --mass")
        temps.add_argument("--rmin", type=float, help="default r_S")
        temps.add_argument("--rmax", type=float, help="default 10 r_S")
        temps.add_argument("--steps", type=int, default=10)
        temps.set_defaults(handler=self.cmd_temps)

        gauge = self._add(commands, "gauge-check", "randomized gauge-invariance check of the spin-2 action")
        gauge.add_argument("--trials", type=int, default=1000)
        gauge.add_argument("--seed", type=int, default=0)
        gauge.add_argument("--workers", type=int, default=None)
        gauge.set_defaults(handler=self.cmd_gauge_check)

        metric = commands.add_parser("metric", help="metric spec utilities")
        metric_commands = metric.add_subparsers(dest="metric_command", required=True)
        show = self._add(metric_commands, "print", "emit a built-in metric spec", key="metric print")
        show.add_argument("--metric", required=True, help=f"one of {', '.join(BUILTIN_METRICS)}")
        show.set_defaults(handler=self.cmd_metric_print)

    def _add(
        self, commands, name: str, help_text: str, key: Optional[str] = None, units: str = "si"
    ) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("--units", default=units, help=f"si | natural (default {units})")
        sub.add_argument("--out", help="output path (default: standard output)")
        sub.add_argument("-v", "--verbose", action="count", default=0)
        self.subparsers[key or name] = sub
        return sub

    # -- configuration -----------------------------------------------------

    def _apply_config(self, argv: Sequence[str]) -> None:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if not known.config:
            return
        defaults = {k.replace("-", "_"): v for k, v in _load_config(known.config).items()}
        for sub in self.subparsers.values():
            dests = {action.dest for action in sub._actions}
            sub.set_defaults(**{k: v for k, v in defaults.items() if k in dests})
        logging.debug("loaded %d option defaults from %s", len(defaults), known.config)

    @staticmethod
    def _constants(args) -> PhysicalConstants:
        if not validate_units(args.units):
            raise PreconditionError(f"--units must be si or natural, got {args.units!r}")
        return resolve_units(args.units)

    @staticmethod
    def _emit(args, text: str) -> None:
        if not args.out:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise PreconditionError(f"cannot write {args.out!r}: {exc}") from None
        logging.info("wrote %s", args.out)

    # -- subcommands -------------------------------------------------------

    def cmd_frames(self, args) -> int:
        self._constants(args)
        if args.point is None:
            raise PreconditionError("frames needs --point")
        spec = load_metric(args.metric).with_params(_parse_overrides(args.set))
        point = _parse_point(args.point)
        frame = frame_field(spec)
        bundle = connection_bundle(frame, point, args.step)
        residual = bundle_residual(frame, bundle)

        table = Table().comment(
            f"metric {args.metric}",
            "coords " + ",".join(spec.coords),
            "params " + ",".join(f"{k}={v!r}" for k, v in spec.params.items()),
            "point " + ",".join(repr(v) for v in point),
            "step " + ",".join(repr(float(h)) for h in bundle.step),
        )
        tensor_block(table, "vierbein", bundle.vierbein, TENSOR_CONVENTIONS["vierbein"])
        tensor_block(table, "anholonomity", bundle.omega, TENSOR_CONVENTIONS["anholonomity"])
        tensor_block(table, "spin_connection", bundle.spin, TENSOR_CONVENTIONS["spin_connection"])
        tensor_block(table, "christoffel", bundle.christoffel, TENSOR_CONVENTIONS["christoffel"])
        table.comment(f"tetrad_postulate_residual {residual!r}")
        self._emit(args, table.text())

        logging.info("tetrad-postulate residual %.3g (tolerance %.3g)", residual, args.tolerance)
        if not residual <= args.tolerance:
            raise ResidualError(f"tetrad-postulate residual {residual!r} exceeds tolerance {args.tolerance!r}")
        return 0

    def cmd_spectrum(self, args) -> int:
        k = self._constants(args)
        p = ChirpParams(omega=args.omega, a=args.a, c=k.c)
        ctrl = QuadratureControls(epsilon=args.epsilon, series_terms=args.terms)
        samples = spectrum_sweep(p, args.xmin, args.xmax, args.steps, ctrl, workers=args.workers)
        comments = [f"omega {p.omega!r}", f"a {p.a!r}", f"c {p.c!r}", f"epsilon {ctrl.epsilon!r}", f"terms {ctrl.series_terms}"]
        self._emit(args, spectrum_table(samples, comments))

        converged = [s for s in samples if s.converged]
        if converged:
            fitted = spectrum_temperature(converged, p, k)
            logging.info("spectrum temperature %r K (Unruh %r K)", fitted, unruh_temperature(p.a, k))

        def badness(s) -> float:
            if not s.converged or math.isnan(s.rel_err_quad):
                return math.inf
            return max(s.rel_err_quad / SPECTRUM_QUAD_TOLERANCE, s.identity_err / SPECTRUM_IDENTITY_TOLERANCE)

        worst = max(samples, key=badness)
        if badness(worst) > 1.0:
            detail = worst.error or f"rel_err_quad={worst.rel_err_quad!r} identity_err={worst.identity_err!r}"
            raise ConvergenceError(f"spectrum row x={worst.x!r} missed its tolerance: {detail}", estimate=worst.rel_err_quad)
        return 0

    def cmd_temps(self, args) -> int:
        k = self._constants(args)
        if args.body:
            M, radius = resolve_body(args.body)
        elif args.mass is not None:
            M, radius = args.mass, None
        else:
            raise PreconditionError("temps needs --mass or --body")
        r_s = schwarzschild_radius(M, k)
        t_h = hawking_temperature(M, k)
        rmin = args.rmin if args.rmin is not None else r_s
        rmax = args.rmax if args.rmax is not None else 10 * r_s
        rows = temperature_profile(M, rmin, rmax, args.steps, k)

        comments = [f"M {M!r}", f"T_H {t_h!r}", f"r_S {r_s!r}"]
        if args.body:
            comments.append(f"body {args.body} R {radius!r} surface_T {surface_temperature(args.body, k)!r}")
        self._emit(args, profile_table(rows, comments))
        logging.info("T_H = %r, r_S = %r, %d interior rows", t_h, r_s, sum(r.interior for r in rows))
        return 0

    def cmd_gauge_check(self, args) -> int:
        k = self._constants(args)
        report = gauge_orbit_check(args.trials, args.seed, Coupling.from_constants(k), workers=args.workers)
        self._emit(args, gauge_table(report, [f"seed {args.seed}", f"trials {args.trials}"]))
        logging.info("%d/%d trials passed", report.passed, len(report.rows))
        failures = report.failures()
        if failures:
            first = failures[0]
            A, k_vec, xi = first.mode
            raise PropertyFailure(
                f"{len(failures)} of {len(report.rows)} trials failed; first is trial {first.trial} "
                f"(residual_gauge={first.residual_gauge!r}, residual_bianchi={first.residual_bianchi!r}; "
                f"A={A.tolist()!r}, k={k_vec.tolist()!r}, xi={xi.tolist()!r})",
                seed=first.seed,
            )
        return 0

    def cmd_metric_print(self, args) -> int:
        text = builtin_spec_text(args.metric)
        header = [line[2:] for line in text.splitlines() if line.startswith("# ")]
        self._emit(args, format_metric_spec(parse_metric_spec(text), header))
        return 0

    # -- entry -------------------------------------------------------------

    def main(self, argv: Optional[Sequence[str]] = None) -> int:
        """
        Parse arguments, run one subcommand and return its exit status:
        0 ok, 2 usage/parse, 3 domain/signature, 4 residual, 5 convergence,
        6 property failure.
        """
        argv = list(sys.argv[1:] if argv is None else argv)
        try:
            self._apply_config(argv)
            args = self.parser.parse_args(argv)
        except SystemExit as exc:
            if exc.code is None:
                return 0
            return exc.code if isinstance(exc.code, int) else 2
        except FreefallError as exc:
            print(f"freefall: error: {_diagnostic(exc)}", file=sys.stderr)
            return exc.exit_code

        level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
        logging.getLogger().setLevel(level)
        try:
            return args.handler(args)
        except FreefallError as exc:
            if level <= logging.DEBUG:
                logging.exception("%s failed", args.command)
            print(f"freefall: error: {_diagnostic(exc)}", file=sys.stderr)
            return exc.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    return FreefallCLI().main(argv)
