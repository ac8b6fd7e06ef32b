"""Command line front end: eliminate, check, mondec, wqo and bench."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .applications import MONDEC_MODES, MondecStatus, WqoStatus, mondec_check, wqo_check
from .bench import FAMILIES, BenchError, BenchSpec, render_table, reports_to_json, run_suite
from .elim import DOMAINS, eliminate
from .errors import RamseyError
from .formula import count_atoms, count_vars
from .smtlib import Script, parse_script, print_smtlib2
from .solver import SolverConfig, Status, check_sat

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_UNKNOWN = 2
EXIT_ERROR = 3

_STATUS_EXIT = {Status.SAT: EXIT_OK, Status.UNSAT: EXIT_NEGATIVE, Status.UNKNOWN: EXIT_UNKNOWN}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _read(path: str) -> Script:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_script(text)


def _solver_cfg(args) -> SolverConfig:
    kw = {}
    if getattr(args, "solver", None):
        kw["executable"] = args.solver
    if getattr(args, "timeout", None):
        kw["timeout_ms"] = args.timeout
    return SolverConfig.from_env(**kw)


def cmd_eliminate(args) -> int:
    script = _read(args.input)
    t0 = time.perf_counter()
    out = eliminate(script.goal, args.domain)
    dt = time.perf_counter() - t0
    text = print_smtlib2(Script(None, script.declarations, out))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.stats:
        g = script.goal
        print(f"input: {count_vars(g)} vars, {count_atoms(g)} atoms; "
              f"output: {count_vars(out)} vars, {count_atoms(out)} atoms; "
              f"eliminate: {dt:.3f}s", file=sys.stderr)
    return EXIT_OK


def cmd_check(args) -> int:
    script = _read(args.input)
    out = eliminate(script.goal, args.domain)
    v = check_sat(out, _solver_cfg(args))
    print(v)
    if v.model and args.model:
        for var, val in sorted(v.model.items(), key=lambda p: p[0].name):
            if var in set(script.declarations):
                print(f"  {var.name} = {val}")
    return _STATUS_EXIT[v.status]


def cmd_mondec(args) -> int:
    script = _read(args.input)
    mode = args.mode or script.meta.get("mondec-mode", "per-var")
    variables = script.declarations or None
    res = mondec_check(script.goal, args.domain, mode, variables=variables,
                       cfg=_solver_cfg(args))
    print(res)
    if res.status is MondecStatus.DECOMPOSABLE:
        return EXIT_OK
    if res.status is MondecStatus.NOT_DECOMPOSABLE:
        return EXIT_NEGATIVE
    return EXIT_UNKNOWN


def cmd_wqo(args) -> int:
    script = _read(args.input)
    decls = list(script.declarations)
    if not decls or len(decls) % 2:
        raise RamseyError("wqo input must declare the x tuple followed by the y tuple")
    half = len(decls) // 2
    res = wqo_check(script.goal, decls[:half], decls[half:], args.domain, _solver_cfg(args))
    print(res)
    if res.status is WqoStatus.WQO:
        return EXIT_OK
    if res.status is WqoStatus.NOT_WQO:
        return EXIT_NEGATIVE
    return EXIT_UNKNOWN


def cmd_bench(args) -> int:
    specs = [BenchSpec(fam, d, args.param, args.domain, args.mode)
             for fam in args.family for d in args.dim]
    reports = run_suite(specs, _solver_cfg(args), args.workers)
    print(render_table(reports))
    if args.json:
        data = reports_to_json(reports)
        if args.json == "-":
            print(data)
        else:
            Path(args.json).write_text(data)
    if any(r.verdict == "error" for r in reports):
        for r in reports:
            if r.error:
                print(f"{r.family} d={r.dim}: {r.error}", file=sys.stderr)
        return EXIT_ERROR
    if any(r.matches is False for r in reports):
        return EXIT_NEGATIVE
    if any(r.verdict == "unknown" for r in reports):
        return EXIT_UNKNOWN
    return EXIT_OK


def _add_solver(p) -> None:
    p.add_argument("--solver", help="SMT solver executable (default: $RAMSEY_SOLVER or z3)")
    p.add_argument("--timeout", type=int, metavar="MS", help="solver timeout in milliseconds")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ramseyqe", description="Ramsey quantifier elimination for LIA, LRA and LIRA")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eliminate", help="print an equivalent Ramsey-free SMT-LIB2 script")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--domain", choices=DOMAINS)
    p.add_argument("--stats", action="store_true", help="report sizes and time on stderr")
    p.set_defaults(run=cmd_eliminate)

    p = sub.add_parser("check", help="eliminate, then decide satisfiability")
    p.add_argument("input")
    p.add_argument("--domain", choices=DOMAINS)
    p.add_argument("--model", action="store_true", help="print the model of declared constants")
    _add_solver(p)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("mondec", help="decide monadic decomposability")
    p.add_argument("input")
    p.add_argument("--mode", choices=MONDEC_MODES)
    p.add_argument("--domain", choices=DOMAINS)
    _add_solver(p)
    p.set_defaults(run=cmd_mondec)

    p = sub.add_parser("wqo", help="decide whether a relation is a well-quasi-order")
    p.add_argument("input")
    p.add_argument("--domain", choices=DOMAINS, default="int")
    _add_solver(p)
    p.set_defaults(run=cmd_wqo)

    p = sub.add_parser("bench", help="run benchmark families")
    p.add_argument("--family", nargs="+", choices=FAMILIES, required=True)
    p.add_argument("--dim", nargs="+", type=int, default=[1])
    p.add_argument("--param", type=int)
    p.add_argument("--domain", required=True, help="Int, Real or Mixed")
    p.add_argument("--mode", choices=MONDEC_MODES, default="group")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", metavar="OUT", help="write the reports as JSON ('-' for stdout)")
    _add_solver(p)
    p.set_defaults(run=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.run(args)
    except (RamseyError, BenchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
