"""Command-line front end.

Exit codes: 0 success / all checks pass, 1 a check failed, 2 bad input,
3 solver failure. The default numerical tolerance comes from FAIRCAKE_TOL.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from .axioms import (
    check_envy_free,
    check_pareto_optimal,
    check_proportional,
    check_weak_pareto_optimal,
)
from .cake import Cake, CakeError
from .ceei import PriceError, standard_price_measure, verify_ceei, verify_sceei
from .io import (
    CakeFormatError,
    dumps,
    load_cake,
    load_fixture,
    parse_allocation,
    parse_slices,
    result_record,
)
from .monotonicity import fuzz, pm_experiment, rm_experiment
from .rules import RULE_NAMES, get_rule
from .solvers.base import SolverError

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3
AXIOMS = ("prop", "ef", "po", "wpo", "ceei", "sceei")

log = logging.getLogger("faircake")


class InputError(Exception):
    pass


def default_tol() -> float:
    raw = os.environ.get("FAIRCAKE_TOL")
    if not raw:
        return 1e-9
    try:
        tol = float(raw)
    except ValueError:
        raise InputError(f"FAIRCAKE_TOL={raw!r} is not a number") from None
    if tol <= 0:
        raise InputError("FAIRCAKE_TOL must be positive")
    return tol


def _read_cake(ref: str):
    if ref.startswith("fixture:"):
        try:
            return load_fixture(ref[len("fixture:"):])
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
    return load_cake(ref)


def _read_json(ref: str):
    try:
        text = sys.stdin.read() if ref == "-" else open(ref).read()
    except OSError as exc:
        raise InputError(f"cannot read {ref}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{ref}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _rule(args):
    try:
        return get_rule(args.rule, args.p, tol=args.tol)
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc.args[0])) from None


def _fmt(v) -> str:
    if isinstance(v, Fraction) and v.denominator != 1:
        return f"{v} (~{float(v):.6g})"
    return str(v) if not isinstance(v, float) else f"{v:.9g}"


def format_result(cake: Cake, res) -> str:
    lines = [f"rule: {res.rule}", "fractions:"]
    width = max(len(a) for a in cake.agents)
    for name, row in zip(cake.agents, res.allocation.fractions):
        lines.append(f"  {name:>{width}}  " + "  ".join(f"{str(x):>7}" for x in row))
    lines.append("utilities (absolute | relative):")
    for name, a, r in zip(cake.agents, res.utilities.absolute, res.utilities.relative):
        lines.append(f"  {name:>{width}}  {_fmt(a)} | {_fmt(r)}")
    if res.prices is not None:
        lines.append("price densities: " + ", ".join(_fmt(p) for p in res.prices.densities))
    return "\n".join(lines)


# -- commands ----------------------------------------------------------------------

def cmd_solve(args) -> int:
    cake, _ = _read_cake(args.cake)
    rule = _rule(args)
    res = rule(cake)
    if args.json:
        print(dumps(result_record(cake, res)))
    else:
        print(format_result(cake, res))
    return EXIT_OK


def cmd_verify(args) -> int:
    cake, _ = _read_cake(args.cake)
    alloc, prices = parse_allocation(_read_json(args.allocation), cake)
    wanted = [a.strip().lower() for a in args.axioms.split(",") if a.strip()]
    for a in wanted:
        if a not in AXIOMS:
            raise InputError(f"unknown axiom {a!r}; choose from {', '.join(AXIOMS)}")
    tol = args.tol if args.tol_given else 0
    reports = []
    for a in wanted:
        if a == "prop":
            reports.append(check_proportional(cake, alloc, tol))
        elif a == "ef":
            reports.append(check_envy_free(cake, alloc, tol))
        elif a == "po":
            reports.append(check_pareto_optimal(cake, alloc))
        elif a == "wpo":
            reports.append(check_weak_pareto_optimal(cake, alloc))
        else:
            p = prices
            if p is None:
                try:
                    p = standard_price_measure(cake, alloc)
                except PriceError as exc:
                    raise InputError(str(exc)) from None
            fn = verify_ceei if a == "ceei" else verify_sceei
            reports.append(fn(cake, alloc, p, tol))
    for rep in reports:
        print(rep.summary())
    return EXIT_OK if all(reports) else EXIT_FAIL


def cmd_monotonicity(args) -> int:
    cake, extra = _read_cake(args.cake)
    rule = _rule(args)
    if args.remove is not None:
        try:
            cake.agent_index(args.remove)
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
        rep = pm_experiment(cake, args.remove, rule)
    else:
        if args.enlarge is not None:
            obj = _read_json(args.enlarge)
            items = obj.get("enlargement") if isinstance(obj, dict) else obj
            extra = tuple(parse_slices(items, cake.n_agents, "enlargement"))
        if not extra:
            raise InputError("give --enlarge FILE or --remove AGENT, or put an enlargement block in the cake file")
        rep = rm_experiment(cake, extra, rule)
    if args.json:
        print(json.dumps({
            "rule": rep.rule, "property": rep.property, "direction": rep.direction,
            "level": rep.level, "agents": list(rep.agents), "passed": rep.passed,
            "before": [str(v) for v in rep.before], "after": [str(v) for v in rep.after],
            "losers": [[n, str(b), str(a)] for n, b, a in rep.losers],
        }, indent=2))
    else:
        print(rep.summary())
        print("before: " + ", ".join(f"{n}={_fmt(v)}" for n, v in zip(rep.agents, rep.before)))
        print("after:  " + ", ".join(f"{n}={_fmt(v)}" for n, v in zip(rep.agents, rep.after)))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_fuzz(args) -> int:
    rule = _rule(args)
    reports = fuzz(rule, args.agents, args.slices, args.trials, args.seed)
    failures = [r for r in reports if not r.passed]
    counts = {"RM": 0, "PM": 0}
    for r in failures:
        counts[r.property] += 1
    print(f"{rule.name} ({rule.level}): {args.trials} trials, seed {args.seed}, "
          f"RM failures {counts['RM']}, PM failures {counts['PM']}")
    for r in failures[:args.show]:
        print()
        print(r.summary() + (f"  ({r.note})" if r.note else ""))
        print(str(r.cake))
        if r.extra:
            print("enlargement: " + "; ".join(
                f"len {s.length}: " + " ".join(str(d) for d in s.densities) for s in r.extra))
        if r.leaving:
            print(f"leaving: {r.leaving}")
    return EXIT_OK if not failures else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="faircake", description="Fair division of piecewise-homogeneous cakes.")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def rule_args(p, required=True):
        p.add_argument("--rule", required=required, choices=RULE_NAMES)
        p.add_argument("--p", help="welfare exponent for wp-abs / wp-rel, e.g. 1/2")
        p.add_argument("--tol", type=float, help="numerical tolerance (default: FAIRCAKE_TOL or 1e-9)")

    s = sub.add_parser("solve", help="divide a cake with one rule")
    s.add_argument("cake", help="cake JSON file, or fixture:NAME")
    rule_args(s)
    s.add_argument("--json", action="store_true", help="print a machine-readable record")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check axioms of an allocation")
    v.add_argument("cake")
    v.add_argument("allocation", help="allocation/record JSON file, or - for stdin")
    v.add_argument("--axioms", default="prop,ef,po", help=f"comma list from {','.join(AXIOMS)}")
    v.add_argument("--tol", type=float, help="tolerance (default exact)")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("monotonicity", help="resource- or population-monotonicity experiment")
    m.add_argument("cake")
    rule_args(m)
    g = m.add_mutually_exclusive_group()
    g.add_argument("--enlarge", help="JSON file with extra slices appended on the right")
    g.add_argument("--remove", help="name of the agent who leaves")
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_monotonicity)

    f = sub.add_parser("fuzz", help="RM/PM experiments on seeded random cakes")
    rule_args(f)
    f.add_argument("--agents", type=int, default=3)
    f.add_argument("--slices", type=int, default=5)
    f.add_argument("--trials", type=int, default=100)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--show", type=int, default=3, help="failing witnesses to print")
    f.set_defaults(func=cmd_fuzz)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.tol_given = getattr(args, "tol", None) is not None
        if not args.tol_given:
            args.tol = default_tol()
        if getattr(args, "trials", 1) < 0 or getattr(args, "agents", 2) < 2 or getattr(args, "slices", 1) < 1:
            raise InputError("need trials >= 0, agents >= 2 and slices >= 1")
        return args.func(args)
    except (InputError, CakeFormatError, CakeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverError, PriceError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
