"""Command-line front end.

Every subcommand prints one JSON document (schema "v1") to stdout. Exit codes:
0 success, 1 domain or validation error (including bad flags), 2 budget error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import _backend
from .counting import DEFAULT_MEM_CAP, count_J, cross_check_S_prime, dump_rep_table, rep_table
from .errors import BudgetError, DomainError
from .exponents import exponent_report
from .forms import CubicForm, normalize_variant, taylor_decomposition
from .harness import DEFAULT_TOLERANCE, SCHEMA, ExperimentConfig, geometric_schedule, run_experiment
from .transversality import (
    bl_condition_sample,
    degenerate_witness_search,
    dyadic_squares,
    generic_dimension_check,
)

DEFAULTS = {
    "variant": "s",
    "threads": 1,
    "mem_cap": DEFAULT_MEM_CAP,
    "seed": 0,
    "tolerance": DEFAULT_TOLERANCE,
    "p": "9",
    "iota": 1,
    "trials": 1000,
    "mode": "generic",
    "K": 4,
    "max_coeff": 2,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> _Parser:
    parser = _Parser(prog="cubicdecoupling", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, *flags):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", type=Path, help="file of 'key = value' lines; flags override")
        sp.add_argument("--out", type=Path, help="also write the JSON report here")
        for flag in flags:
            FLAG_SPECS[flag](sp)
        return sp

    add("count", "exact J_r(N)", "form", "r", "N", "variant", "threads", "mem_cap").add_argument(
        "--table", type=Path, help="export the r-fold representation table (binary)"
    )
    add("fit", "growth exponent over an N schedule", "form", "r", "N_schedule", "N_geometric", "variant", "threads",
        "mem_cap", "tolerance", "seed").add_argument("--plot", type=Path, help="two-column N J data file")
    add("exponents", "exact decoupling exponent calculus", "p")
    add("transversality", "sampled transversality checks", "form", "iota", "trials", "seed", "dim",
        "mode", "K", "max_coeff")
    add("taylor", "symbolic Taylor grading identity", "form")
    add("crosscheck", "S versus S' solution counts", "form", "r", "N", "threads", "mem_cap")
    return parser


FLAG_SPECS = {
    "form": lambda p: p.add_argument("--form", help="cubic coefficients a,b,c,d"),
    "r": lambda p: p.add_argument("--r", type=int),
    "N": lambda p: p.add_argument("--N", type=int),
    "N_schedule": lambda p: p.add_argument("--N-schedule", dest="N_schedule", type=_int_list,
                                           help="comma-separated N values"),
    "variant": lambda p: p.add_argument("--variant", choices=["s", "sprime"]),
    "threads": lambda p: p.add_argument("--threads", type=int),
    "mem_cap": lambda p: p.add_argument("--mem-cap", dest="mem_cap", type=int, help="bytes"),
    "N_geometric": lambda p: p.add_argument("--N-geometric", dest="N_geometric",
                                            help="N_min,N_max,factor geometric schedule"),
    "tolerance": lambda p: p.add_argument("--tolerance", type=float),
    "seed": lambda p: p.add_argument("--seed", type=int),
    "p": lambda p: p.add_argument("--p", help="Lebesgue index as num/den"),
    "iota": lambda p: p.add_argument("--iota", type=int, choices=[1, 2]),
    "trials": lambda p: p.add_argument("--trials", type=int),
    "dim": lambda p: p.add_argument("--dim", type=int, choices=[1, 2, 3, 4], help="dim V (default: all/mixed)"),
    "mode": lambda p: p.add_argument("--mode", choices=["generic", "bl", "witness"]),
    "K": lambda p: p.add_argument("--K", type=int, help="K-square grid size for --mode bl"),
    "max_coeff": lambda p: p.add_argument("--max-coeff", dest="max_coeff", type=int),
}


def read_config(path: Path) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _merge(args: argparse.Namespace, parser: _Parser) -> argparse.Namespace:
    config = read_config(args.config) if args.config else {}
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in sub._actions}
    for key, value in config.items():
        if key not in actions:
            raise DomainError(f"unknown config key {key!r} for '{args.command}'")
        if getattr(args, key) is None:
            action = actions[key]
            setattr(args, key, action.type(value) if action.type else value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, "absent") is None:
            setattr(args, key, value)
    return args


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise DomainError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _form(args) -> CubicForm:
    _need(args, "form")
    return CubicForm.parse(args.form)


def cmd_count(args) -> dict:
    _need(args, "r", "N")
    phi = _form(args)
    variant = normalize_variant(args.variant)
    start = time.perf_counter()
    if args.table:
        table = rep_table(phi, args.r, args.N, variant, args.threads, args.mem_cap)
        J = table.sum_of_squares()
        with open(args.table, "wb") as fh:
            dump_rep_table(table, fh)
    else:
        J = count_J(phi, args.r, args.N, variant, args.threads, args.mem_cap)
    elapsed = (time.perf_counter() - start) * 1000
    return {
        "schema": SCHEMA,
        "form": str(phi),
        "r": args.r,
        "N": args.N,
        "variant": variant,
        "J": J,
        "nondegenerate": phi.is_nondegenerate,
        "backend": _backend.DEFAULT,
        "threads": args.threads,
        "elapsed_ms": round(elapsed, 3),
    }


def cmd_fit(args) -> dict:
    _need(args, "r")
    if args.N_schedule is None and args.N_geometric:
        try:
            lo, hi, factor = args.N_geometric.split(",")
            args.N_schedule = list(geometric_schedule(int(lo), int(hi), float(factor)))
        except ValueError:
            raise DomainError(f"--N-geometric expects N_min,N_max,factor, got {args.N_geometric!r}") from None
    _need(args, "N_schedule")
    plot = args.plot
    if plot is None and args.out is not None:
        plot = args.out.with_suffix(".dat")
    config = ExperimentConfig(
        form=_form(args),
        r=args.r,
        schedule=tuple(args.N_schedule),
        variant=args.variant,
        threads=args.threads,
        mem_cap=args.mem_cap,
        seed=args.seed,
        tolerance=args.tolerance,
        plot_out=plot,
    )
    return run_experiment(config).as_dict()


def cmd_exponents(args) -> dict:
    return {"schema": SCHEMA, **exponent_report(args.p)}


def cmd_transversality(args) -> dict:
    phi = _form(args)
    out = {"schema": SCHEMA, "mode": args.mode}
    if args.mode == "witness":
        witness = degenerate_witness_search(phi, args.iota, max_coeff=args.max_coeff, seed=args.seed)
        out.update(
            form=str(phi),
            iota=args.iota,
            max_coeff=args.max_coeff,
            seed=args.seed,
            status="witness" if witness else "none",
            witness=witness.as_lists() if witness else None,
        )
        return out
    if args.mode == "bl":
        report = bl_condition_sample(phi, args.K, dyadic_squares(args.K), args.iota, args.trials,
                                     args.seed, dim_v=args.dim)
        out.update(report.as_dict())
        return out
    dims = [args.dim] if args.dim else [1, 2, 3, 4]
    reports = [generic_dimension_check(phi, d, args.iota, args.trials, args.seed).as_dict() for d in dims]
    if len(reports) == 1:
        out.update(reports[0])
    else:
        out.update(form=str(phi), iota=args.iota, dimV="mixed", trials=args.trials, seed=args.seed,
                   violations=sum(r["violations"] for r in reports), reports=reports)
    return out


def cmd_taylor(args) -> dict:
    phi = _form(args)
    dec = taylor_decomposition(phi)
    return {"schema": SCHEMA, "form": str(phi), "identity": dec.identity, "checks": dec.checks()}


def cmd_crosscheck(args) -> dict:
    _need(args, "r", "N")
    report = cross_check_S_prime(_form(args), args.r, args.N, args.threads, args.mem_cap)
    return {"schema": SCHEMA, **report.as_dict()}


COMMANDS = {
    "count": cmd_count,
    "fit": cmd_fit,
    "exponents": cmd_exponents,
    "transversality": cmd_transversality,
    "taylor": cmd_taylor,
    "crosscheck": cmd_crosscheck,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError:
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        args = _merge(args, parser)
        result = COMMANDS[args.command](args)
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(result, indent=2)
    print(text)
    if args.out is not None:
        Path(args.out).write_text(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
