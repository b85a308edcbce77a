"""Command-line entry point: ``xlirs snr | sweep | validate``.

Exit status: 0 success, 1 validation checks failed, 2 bad usage,
3 config parse error, 4 invalid value or inapplicable request,
5 quadrature did not converge, 6 file I/O error.
"""

import argparse
import logging
import os
import sys

from . import harness, plotting, validation
from .errors import ConfigError, ConvergenceError, ValidationError, XlirsError

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_CONVERGENCE = 5
EXIT_IO = 6

log = logging.getLogger("xlirs")


def _model_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser():
    p = argparse.ArgumentParser(prog="xlirs", description="Near-field SNR of links through a large reflecting surface.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    snr = sub.add_parser("snr", help="evaluate SNR models for one scenario file")
    snr.add_argument("config")
    snr.add_argument("--models", type=_model_list, default=list(harness.MODEL_TAGS),
                     help="comma-separated model tags (default: all)")
    snr.add_argument("--linear", action="store_true", help="print linear SNR instead of dB")
    snr.add_argument("--threads", type=int, default=None)

    sw = sub.add_parser("sweep", help="sweep one variable and write a CSV table")
    sw.add_argument("config")
    sw.add_argument("--var", choices=("L", "Lz", "rq"), help="sweep variable (default: from config)")
    sw.add_argument("--grid", help="start:stop:steps[:lin|log] or a comma list (default: from config)")
    sw.add_argument("--out", required=True, help="CSV output path")
    sw.add_argument("--models", type=_model_list, default=None)
    sw.add_argument("--linear", action="store_true")
    sw.add_argument("--emit-plotscript", action="store_true",
                    help="also write a gnuplot script next to the CSV")
    sw.add_argument("--plot", action="store_true", help="also render a PNG figure next to the CSV")
    sw.add_argument("--threads", type=int, default=None)

    va = sub.add_parser("validate", help="run the cross-model consistency checks")
    va.add_argument("--tags", type=_model_list, default=None,
                    help=f"comma-separated subset of: {', '.join(validation.ALL_TAGS)}")
    va.add_argument("--beta0-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return p


def cmd_snr(args):
    report = harness.run_scenario(args.config, args.models, args.threads)
    print(report.format(linear=args.linear))
    return EXIT_OK


def cmd_sweep(args):
    cfg = harness.load_config(args.config)
    var = args.var or cfg.sweep_var
    grid_text = args.grid or cfg.sweep_grid
    if not var or not grid_text:
        raise ValidationError("sweep needs --var and --grid (or sweep.var / sweep.grid in the config)")
    tags = args.models or _model_list(cfg.sweep_models or "exact-sum,upw")
    spec = harness.SweepSpec(
        cfg.scenario, var, harness.parse_grid(grid_text), tuple(tags), cfg.upw, args.linear
    )
    table = harness.run_sweep(spec, args.threads)
    harness.write_csv(table, args.out)
    print(f"wrote {args.out} ({len(table.rows)} rows)")
    stem = os.path.splitext(args.out)[0]
    if args.emit_plotscript:
        script = plotting.write_gnuplot_script(table, args.out, stem + ".gp", stem + "_gnuplot.png")
        print(f"wrote {script}")
    if args.plot:
        print(f"wrote {plotting.render_sweep(table, stem + '.png')}")
    return EXIT_OK


def cmd_validate(args):
    results = validation.validate(args.tags, beta0_scale=args.beta0_scale)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_CHECKS_FAILED if failed else EXIT_OK


COMMANDS = {"snr": cmd_snr, "sweep": cmd_sweep, "validate": cmd_validate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except XlirsError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
