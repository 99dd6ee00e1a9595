"""Command line entry point: ``sfor-wave {run,table,check-kernels}``.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""

import argparse
import logging
import sys
import warnings

from . import fracops, harness
from .errors import NumericalError, ValidationError
from .mesh import build_graded_mesh

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args):
    cfg = harness.load_config(args.config)
    table = harness.run_sweep(cfg)
    if args.format == "csv":
        text = harness.emit_csv(table)
    else:
        text = harness.emit_markdown(table)
    _write(text, args.out)
    return EXIT_OK


def cmd_table(args):
    spec = harness.table_spec(args.number)
    tables = harness.run_table(args.number)
    _write(harness.emit_markdown(tables, f"Table {spec.number}: {spec.title}"), args.out)
    return EXIT_OK


def kernel_report(beta, N, r):
    """Run A1/A2 and the complementary-kernel checks for both formulas.

    Returns (lines, all_passed).
    """
    mesh = build_graded_mesh(1.0, N, r)
    lines = [f"beta={beta} N={N} r={r} max step ratio={mesh.max_ratio:.4f}"]
    ok_all = True
    for formula, pi_a in (("L1", fracops.PI_L1), ("ALIKHANOV", fracops.PI_ALIKHANOV)):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            rows = fracops.kernel_rows(mesh, beta, formula)
        pos, mono, _ = fracops.check_a1(rows)
        a2_ok, a2_margin = fracops.check_a2(mesh, rows, pi_a)
        comp = fracops.complementary_kernels(rows)
        resid = fracops.complementary_identity_residual(rows, comp)
        bound = fracops.complementary_bound_ratio(mesh, rows, comp, beta, pi_a)
        # Positivity and monotonicity are only guaranteed for Alikhanov under the ratio limit.
        required = formula == "L1" or mesh.max_ratio <= fracops.ALIKHANOV_RATIO_LIMIT
        checks = [
            ("A1 positivity", pos, ""),
            ("A1 monotonicity", mono, ""),
            ("A2 lower bound", a2_ok, f"min margin {a2_margin:.3e}"),
            ("complementary identity", resid <= 1e-12, f"residual {resid:.2e}"),
            ("complementary bound", bound <= 1 + 1e-12, f"max ratio {bound:.6f}"),
        ]
        for name, ok, detail in checks:
            status = "PASS" if ok else ("FAIL" if required else "FAIL (not guaranteed)")
            lines.append(f"{formula:9s} {name:24s} {status} {detail}".rstrip())
            if required and not ok:
                ok_all = False
    return lines, ok_all


def cmd_check_kernels(args):
    lines, ok = kernel_report(args.beta, args.N, args.r)
    print("\n".join(lines))
    print("OVERALL PASS" if ok else "OVERALL FAIL")
    return EXIT_OK if ok else EXIT_NUMERICAL


def build_parser():
    p = argparse.ArgumentParser(prog="sfor-wave", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a refinement sweep from a key=value config file")
    r.add_argument("--config", required=True)
    r.add_argument("--format", choices=("csv", "markdown"), default="csv")
    r.add_argument("--out")
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("table", help="regenerate one of the built-in convergence tables")
    t.add_argument("number", type=int, choices=sorted(harness.TABLES))
    t.add_argument("--out")
    t.set_defaults(func=cmd_table)

    k = sub.add_parser("check-kernels", help="kernel assumption checks on one graded mesh")
    k.add_argument("--beta", type=float, required=True)
    k.add_argument("--N", type=int, required=True)
    k.add_argument("--r", type=float, required=True)
    k.set_defaults(func=cmd_check_kernels)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
