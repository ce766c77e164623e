"""Command-line entry point: ``allmach {run,reference,sweep,probe-scaling}``.

Exit codes: 0 success, 2 configuration error, 3 solver failure.
"""
import argparse
import logging
import os
import sys
from dataclasses import fields

from . import diagnostics
from .errors import ConfigError, DegenerateFit, EulerError
from .experiments import (SWEEP_FLUXES, SWEEP_MACH, Experiment, RunConfig, load_config, run,
                          run_reference, sweep)
from .fluxes import FluxKind

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3

log = logging.getLogger("allmach")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage already; route it through ConfigError for one code path
    def error(self, message):
        raise ConfigError(message)


def _add_overrides(parser):
    for f in fields(RunConfig):
        parser.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, default=None, metavar="VALUE")


def _overrides(args):
    return {f.name: getattr(args, f.name) for f in fields(RunConfig) if getattr(args, f.name) is not None}


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def build_parser():
    parser = _Parser(prog="allmach", description="Entropy-stable all-Mach finite-volume Euler solver")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run one experiment from a config file")
    p.add_argument("--config", required=False, help="flat key = value file")
    _add_overrides(p)

    p = sub.add_parser("reference", help="LLF reference solution of the sound-wave problem")
    p.add_argument("--cells", type=int, default=100_000)
    p.add_argument("--output-dir", default="reference")

    p = sub.add_parser("sweep", help="Gresho runs over flux kinds and reference Mach numbers")
    p.add_argument("--config", required=False)
    p.add_argument("--fluxes", default=",".join(k.label for k in SWEEP_FLUXES))
    p.add_argument("--machs", default=",".join(f"{m:g}" for m in SWEEP_MACH))
    p.add_argument("--jobs", type=int, default=1)
    _add_overrides(p)

    p = sub.add_parser("probe-scaling", help="Mach scaling of the diffusion matrix")
    p.add_argument("--flux", default="ES-LM")
    p.add_argument("--mach-levels", default="1e-1,1e-2,1e-3,1e-4")
    p.add_argument("--m-cut", type=float, default=0.0)
    p.add_argument("--angle", type=float, default=0.0)
    p.add_argument("--output", default="-", help="CSV path, '-' for stdout")
    return parser


def _config(args):
    overrides = _overrides(args)
    if args.config:
        return load_config(args.config, overrides)
    return RunConfig.from_mapping(overrides)


def _cmd_run(args):
    cfg = _config(args)
    if cfg.output_dir is None:
        cfg = RunConfig.from_mapping({"output_dir": "output"}, base=cfg)
    result = run(cfg)
    last = result.records[-1]
    print(f"{result.config.experiment.value} {result.config.flux.label}: t={last.time:.6g} "
          f"total_entropy={last.total_entropy:.10g} total_kinetic_energy={last.total_kinetic_energy:.10g} "
          f"max_mach={last.max_mach:.6g} -> {result.config.output_dir}")


def _cmd_reference(args):
    if args.cells < 2:
        raise ConfigError("--cells must be >= 2")
    result = run_reference(args.cells, output_dir=args.output_dir)
    print(f"reference: {args.cells} cells, t={result.final_field.time:.6g} -> {args.output_dir}")


def _cmd_sweep(args):
    base = _config(args)
    overrides = _overrides(args)
    base = RunConfig.from_mapping({"experiment": Experiment.GRESHO.value}, base=base)
    if "nx" not in overrides and not args.config:
        base = RunConfig.from_mapping({"nx": "32", "ny": "32"}, base=base)
    if base.output_dir is None:
        base = RunConfig.from_mapping({"output_dir": "sweep"}, base=base)
    try:
        kinds = [FluxKind.parse(k) for k in args.fluxes.split(",") if k.strip()]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    machs = _float_list(args.machs)
    if not kinds or not machs or any(m <= 0 for m in machs):
        raise ConfigError("sweep needs at least one flux and positive Mach numbers")
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    for res in sweep(base, kinds, machs, jobs=args.jobs):
        first, last = res.records[0], res.records[-1]
        print(f"{res.config.flux.label:10s} M={res.config.mach_ref:<6g} "
              f"KE ratio={last.total_kinetic_energy / first.total_kinetic_energy:.6f} "
              f"max_mach={last.max_mach:.6g}")


def _cmd_probe(args):
    try:
        kind = FluxKind.parse(args.flux)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if kind not in diagnostics.EXPECTED_ORDERS:
        raise ConfigError(f"no diffusion matrix to probe for {kind.label}")
    if not 0.0 <= args.m_cut <= 1.0:
        raise ConfigError("--m-cut must lie in [0, 1]")
    try:
        report = diagnostics.diffusion_scaling_probe(kind, _float_list(args.mach_levels), m_cut=args.m_cut,
                                                     angle=args.angle)
    except DegenerateFit as exc:
        raise ConfigError(str(exc)) from exc
    comments = [f"flux = {kind.label}", f"m_cut = {args.m_cut}", f"angle = {args.angle}"]
    if args.output == "-":
        diagnostics.write_scaling_csv(report, sys.stdout, comments)
    else:
        parent = os.path.dirname(args.output)
        if parent:
            os.makedirs(parent, exist_ok=True)
        diagnostics.write_scaling_csv(report, args.output, comments)
    ok = report.compare()
    log.info("%d of 16 entries match the expected orders", int(ok.sum()))


COMMANDS = {"run": _cmd_run, "reference": _cmd_reference, "sweep": _cmd_sweep, "probe-scaling": _cmd_probe}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"allmach: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        code = COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"allmach: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EulerError as exc:
        print(f"allmach: solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
