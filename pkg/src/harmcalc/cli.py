"""Command line interface: ``harmcalc <command> --model NAME_OR_FILE ...``.

Exit codes: 0 success, 1 input or diagnostic error, 2 failed precondition,
3 internal error.
"""
from __future__ import annotations

import argparse
import sys
from typing import Dict, List, Optional

from . import report
from .atoms import Value, parse_atom
from .cause import check_contrastive_cause, ContrastiveQuery
from .collective import PENALTY_MODES, aggregate_harm, compare_policies
from .errors import InputError, PreconditionError
from .harm import (
    UtilityModel,
    qualitative_harm,
    quantitative_benefit,
    quantitative_harm,
    rbt_harm,
)
from .modelfile import ModelFileError, _split
from .scenario import Scenario, load
from .scm import FOr, Primitive, intervene, solve, validate_model
from .uncertainty import expected_utility, wqh

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def parse_settings(text: str) -> Dict[str, Value]:
    """``"A=1, B=yes"`` -> ``{"A": 1, "B": "yes"}``."""
    out = {}
    for item, _ in _split(text, 1):
        if not item:
            continue
        name, eq, value = item.partition("=")
        if not eq:
            raise InputError(f"expected NAME=VALUE, found {item!r}")
        try:
            out[name.strip()] = parse_atom(value)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    return out


def _effect(text: str):
    parts = [p.strip() for p in text.split("|")]
    prims = []
    for p in parts:
        settings = parse_settings(p)
        if len(settings) != 1:
            raise InputError(f"effect must be VAR=VALUE or a '|' disjunction of them, found {text!r}")
        prims.append(Primitive(*next(iter(settings.items()))))
    return prims[0] if len(prims) == 1 else FOr(tuple(prims))


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--model", required=True, help="bundled scenario name (or unique prefix) or model file path")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--penalty-mode", choices=PENALTY_MODES, default=None)

    ctx = _Parser(add_help=False)
    ctx.add_argument("--context", default="", help='exogenous values, e.g. "g1=no,g2=yes"')

    action = _Parser(add_help=False)
    group = action.add_mutually_exclusive_group()
    group.add_argument("--policy", help="named policy from the model file")
    group.add_argument("--set", dest="set_", metavar="X=x,...", help="explicit intervention")

    agent = _Parser(add_help=False)
    agent.add_argument("--agent", help="agent id (needed when the model has several)")
    agent.add_argument("--default", help="override the agent's default: d or low,high")

    weighting = _Parser(add_help=False)
    weighting.add_argument("--weighting", help="identity | floor:TAU | table:NAME | prelec:ALPHA")

    parser = _Parser(prog="harmcalc", description="Causal harm quantification for structural causal models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {report.__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a model file")
    p = sub.add_parser("solve", parents=[common, ctx, action], help="solve the model in a context")
    p = sub.add_parser("cause", parents=[common, ctx, action],
                       help="decide a contrastive cause query (after the optional action)")
    p.add_argument("--cause", required=True, metavar="X=x,...")
    p.add_argument("--alt", required=True, metavar="X=x',...")
    p.add_argument("--effect", required=True, metavar="O=o")
    p.add_argument("--alt-effect", required=True, metavar="O=o'")
    p = sub.add_parser("harm", parents=[common, ctx, action, agent], help="harm in one context")
    p.add_argument("--qualitative", action="store_true", help="report qualitative harm instead")
    p.add_argument("--benefit", action="store_true", help="report quantitative benefit as well")
    p.add_argument("--rbt", action="store_true", help="also report the shortfall against a default action")
    p.add_argument("--default-action", help="policy used by --rbt (defaults to the file's [rbt] entry)")
    sub.add_parser("wqh", parents=[common, action, agent, weighting], help="weighted harm over the distribution")
    p = sub.add_parser("aggregate", parents=[common, action, weighting], help="collective harm of one policy")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p = sub.add_parser("compare", parents=[common, weighting], help="rank policies by collective harm")
    p.add_argument("--policies", help="comma-separated policy names (default: all)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    return parser


def _intervention(sc: Scenario, args) -> Dict[str, Value]:
    if getattr(args, "policy", None):
        return sc.policy(args.policy)
    if getattr(args, "set_", None):
        return parse_settings(args.set_)
    raise InputError("give an action with --policy NAME or --set X=x")


def _context(sc: Scenario, args) -> Dict[str, Value]:
    ctx = parse_settings(args.context)
    if sc.model.exogenous and not ctx:
        raise InputError("this model needs --context with values for " + ", ".join(sc.model.exogenous))
    return ctx


def _agent(sc: Scenario, args) -> UtilityModel:
    um = sc.agent(args.agent)
    if args.default:
        parts = [float(x) for x in args.default.split(",")]
        if len(parts) not in (1, 2):
            raise InputError("--default takes d or low,high")
        um = UtilityModel.make(um.model, um.outcome, zip(um.outcome_values, um.utilities), (parts[0], parts[-1]))
    return um


def _query_echo(args, **extra) -> Dict[str, object]:
    q = {k: v for k, v in vars(args).items() if k not in ("format", "model", "command") and v not in (None, False, "")}
    if "set_" in q:
        q["set"] = q.pop("set_")
    q.update(extra)
    return q


def _run(args) -> tuple:
    sc = load(args.model)
    cmd = args.command
    if cmd == "validate":
        violations = validate_model(sc.model)
        result = {"valid": not violations, "violations": [str(v) for v in violations],
                  "variables": len(sc.model.variables), "agents": sorted(sc.agents),
                  "policies": sorted(sc.policies)}
        return sc, result, EXIT_OK if not violations else EXIT_INPUT
    if cmd == "solve":
        ctx = _context(sc, args)
        iv = _intervention(sc, args) if (args.policy or args.set_) else {}
        return sc, {"assignment": solve(intervene(sc.model, iv), ctx)}, EXIT_OK
    if cmd == "cause":
        ctx = _context(sc, args)
        q = ContrastiveQuery(parse_settings(args.cause), parse_settings(args.alt),
                             _effect(args.effect), _effect(args.alt_effect))
        acted = intervene(sc.model, _intervention(sc, args)) if (args.policy or args.set_) else sc.model
        v = check_contrastive_cause(acted, ctx, q)
        return sc, report.verdict(v), EXIT_OK if v.ac1 else EXIT_PRECONDITION
    if cmd == "harm":
        ctx = _context(sc, args)
        iv = _intervention(sc, args)
        um = _agent(sc, args)
        if args.qualitative:
            result = {"qualitative": report.qualitative(qualitative_harm(um, ctx, iv))}
        else:
            result = report.assessment(quantitative_harm(um, ctx, iv))
        if args.benefit:
            result["benefit"] = report.assessment(quantitative_benefit(um, ctx, iv))
        if args.rbt:
            default = sc.policy(args.default_action) if args.default_action else sc.default_action
            if default is None:
                raise InputError("--rbt needs --default-action or an [rbt] section")
            result["rbt_harm"] = rbt_harm(um, ctx, iv, default)
        return sc, result, EXIT_OK
    if cmd == "wqh":
        iv = _intervention(sc, args)
        um = _agent(sc, args)
        w = sc.weighting(args.weighting)
        result = report.wqh_report(wqh(um, sc.distribution, iv, w))
        result["weighting"] = str(w)
        result["expected_utility"] = expected_utility(um, sc.distribution, iv)
        return sc, result, EXIT_OK
    overrides = {k: getattr(args, k) for k in ("alpha", "beta") if getattr(args, k) is not None}
    cm = sc.collective(sc.weighting(args.weighting), args.penalty_mode, **overrides)
    if cmd == "aggregate":
        result = report.aggregate(aggregate_harm(cm, _intervention(sc, args)))
        result["weighting"] = str(cm.weighting)
        result["penalty_mode"] = cm.penalty_mode
        return sc, result, EXIT_OK
    names = [n.strip() for n in args.policies.split(",")] if args.policies else list(sc.policies)
    ranking = compare_policies(cm, {n: sc.policy(n) for n in names})
    result = {"ranking": [name for name, _ in ranking],
              "reports": {name: report.aggregate(r) for name, r in ranking},
              "weighting": str(cm.weighting), "penalty_mode": cm.penalty_mode}
    return sc, result, EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        sc, result, code = _run(args)
    except ModelFileError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit 3
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    rep = report.envelope(args.command, sc.name, _query_echo(args), result)
    sys.stdout.write(report.to_json(rep) if args.format == "json" else report.to_text(rep))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
