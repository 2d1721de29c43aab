"""Command-line front end.

Every run ends with ``RESULT: <verdict>`` on stdout.  Exit codes: 0 sat or
accepted, 1 unsat within the bound, 2 rejected, 3 resource limit, 4 usage or
I/O error, 5 parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .dl4_model import KBError, KBParseError, parse_kb, print_kb, print_statement, print_term
from .dl4_normalize import normalize
from .dl4_translate import TranslationError, render_translation, translate_kb
from .dl_semantics_oracle import EnumerationRefused, OracleSat, brute_force_consistent
from .fourlqs_core import And, FormulaParseError, parse_formula, pretty, to_text
from .fourlqs_restrict import is_4lqsr
from .layout import DEFAULT_SLOT, Bound, BoundError, complete_bound, compute_default_bound
from .solver import NotGroundable, ResourceLimit, Sat, decide, full_formula, ground, to_dimacs
from . import swrl

EXIT = {"sat": 0, "accepted": 0, "unsat-within-bound": 1, "rejected": 2, "resource-limit": 3}
USAGE, PARSE = 4, 5
TRACE_LIMIT = 2000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None


class _ParseFailure(Exception):
    def __init__(self, path, err):
        line = getattr(err, "line", 0)
        col = getattr(err, "col", 0)
        msg = getattr(err, "message", str(err))
        super().__init__(f"{path}:{line}:{col}: {msg}" if line else f"{path}: {msg}")


def _load_kb(path):
    try:
        return parse_kb(_read(path))
    except KBParseError as e:
        raise _ParseFailure(path, e) from None
    except KBError as e:
        raise _ParseFailure(path, e) from None


def _load_rules(path, kb):
    if not path:
        return []
    try:
        return swrl.parse_rules(_read(path), kb)
    except swrl.RuleError as e:
        raise _ParseFailure(path, e) from None


def _bound(args, kb):
    if args.bound_ind is None and not args.bound_data:
        return complete_bound(compute_default_bound(kb), kb.datatype_map)
    default = compute_default_bound(kb)
    data = dict(default.n_data)
    for item in args.bound_data or ():
        name, sep, n = item.partition("=")
        if not sep or not n.strip().isdigit():
            raise UsageError(f"--bound-data expects d=N, got {item!r}")
        if name not in data and name != DEFAULT_SLOT:
            raise UsageError(f"--bound-data names unknown datatype {name}")
        data[name] = int(n)
    n_ind = default.n_ind if args.bound_ind is None else args.bound_ind
    try:
        return complete_bound(Bound(n_ind, data), kb.datatype_map)
    except BoundError as e:
        raise UsageError(str(e)) from None


def _emit(out, verdict, args, payload=None, lines=()):
    if getattr(args, "format", "text") == "json":
        body = dict(payload or {})
        body["result"] = verdict
        out.write(json.dumps(body, indent=2, sort_keys=True) + "\n")
    else:
        for line in lines:
            out.write(line + "\n")
    out.write(f"RESULT: {verdict}\n")
    return EXIT[verdict]


# -- commands -------------------------------------------------------------------


def cmd_check(args, out):
    kb = _load_kb(args.kb)
    rules = _load_rules(args.rules, kb)
    bound = _bound(args, kb)
    translation = translate_kb(kb)
    if args.dump_cnf:
        gr = ground(full_formula(translation, rules), bound, translation.table, kb.datatype_map)
        try:
            with open(args.dump_cnf, "w", encoding="utf-8") as fh:
                fh.write(to_dimacs(gr.cnf))
        except OSError as e:
            raise UsageError(f"{args.dump_cnf}: {e.strerror}") from None
    trace = [] if args.trace else None
    res = decide(kb, bound, rules, args.max_conflicts, translation=translation, trace=trace)
    stats = res.stats
    lines = [f"bound: {bound.render()}", f"cnf: {stats['vars']} variables, {stats['clauses']} clauses"]
    payload = {"bound": bound.to_json(), "stats": stats}
    if isinstance(res, Sat):
        verdict = "sat"
        lines.append("consistent: a model exists within the bound")
        if args.model:
            lines.append("model:")
            lines.extend("  " + x for x in res.model.render())
            payload["model"] = res.model.to_json()
    elif isinstance(res, ResourceLimit):
        verdict = "resource-limit"
        lines.append(f"gave up after {stats['conflicts']} conflicts")
    else:
        verdict = "unsat-within-bound"
        lines.append(f"no model within the bound {bound.render()}")
    if trace is not None:
        lines.append(
            "stats: " + ", ".join(f"{k}={stats[k]}" for k in ("decisions", "conflicts", "propagations", "learned"))
        )
        lines.extend("trace: " + t for t in trace[:TRACE_LIMIT])
        if len(trace) > TRACE_LIMIT:
            lines.append(f"trace: ... {len(trace) - TRACE_LIMIT} more events")
        payload["trace"] = trace[:TRACE_LIMIT]
    return _emit(out, verdict, args, payload, lines)


def cmd_translate(args, out):
    kb = _load_kb(args.kb)
    rules = _load_rules(args.rules, kb)
    t = translate_kb(kb)
    phi = full_formula(t, rules)
    report = is_4lqsr(phi)
    verdict = "accepted" if report.accepted else "rejected"
    text = render_translation(t)
    if rules:
        text += "\n; rules\n" + "\n".join(pretty(swrl.translate_rule(r, t.table)) for r in rules)
    lines = text.rstrip("\n").split("\n") + [v.render() for v in report.violations]
    payload = {
        "symbols": t.table.render(),
        "formula": to_text(phi),
        "flags": {print_statement(k): list(v) for k, v in t.flags.items()},
        "violations": [v.render() for v in report.violations],
    }
    return _emit(out, verdict, args, payload, lines)


def cmd_normalize(args, out):
    kb = _load_kb(args.kb)
    res = normalize(kb)
    lines = print_kb(res.kb).rstrip("\n").split("\n")
    if res.fresh_ledger:
        lines.append("")
        lines.append("# fresh names")
        lines.extend(f"#   {n} := {print_term(t)}" for n, t in res.fresh_ledger.items())
    payload = {"kb": print_kb(res.kb), "fresh": {n: print_term(t) for n, t in res.fresh_ledger.items()}}
    return _emit(out, "accepted", args, payload, lines)


def cmd_validate(args, out):
    try:
        phi = parse_formula(_read(args.formula))
    except FormulaParseError as e:
        raise _ParseFailure(args.formula, e) from None
    report = is_4lqsr(phi)
    verdict = "accepted" if report.accepted else "rejected"
    lines = [v.render() for v in report.violations]
    payload = {"violations": [v.render() for v in report.violations]}
    return _emit(out, verdict, args, payload, lines)


def cmd_rules(args, out):
    kb = _load_kb(args.kb)
    rules = _load_rules(args.rules, kb)
    from .dl4_translate import build_table

    table = build_table(kb)
    formulas = [swrl.translate_rule(r, table) for r in rules]
    report = is_4lqsr(And(tuple(formulas)))
    verdict = "accepted" if report.accepted else "rejected"
    lines = []
    for r, f in zip(rules, formulas):
        lines.append("; " + swrl.print_rule(r))
        lines.append(pretty(f))
    lines.extend(v.render() for v in report.violations)
    payload = {"rules": [{"rule": swrl.print_rule(r), "formula": to_text(f)} for r, f in zip(rules, formulas)]}
    return _emit(out, verdict, args, payload, lines)


def cmd_oracle(args, out):
    kb = _load_kb(args.kb)
    rules = _load_rules(args.rules, kb)
    default = compute_default_bound(kb)
    n = args.max_domain if args.max_domain is not None else default.n_ind
    try:
        bound = complete_bound(Bound(n, default.n_data), kb.datatype_map)
    except BoundError as e:
        raise UsageError(str(e)) from None
    lines = [f"bound: {bound.render()}"]
    payload = {"bound": bound.to_json()}
    try:
        res = brute_force_consistent(kb, bound, rules)
    except EnumerationRefused as e:
        lines.append(str(e))
        payload["estimate"] = e.estimate
        return _emit(out, "resource-limit", args, payload, lines)
    if isinstance(res, OracleSat):
        lines.append("interpretation:")
        lines.extend("  " + x for x in res.interpretation.render())
        payload["model"] = res.interpretation.to_json()
        return _emit(out, "sat", args, payload, lines)
    lines.append(f"no interpretation within the bound {bound.render()}")
    return _emit(out, "unsat-within-bound", args, payload, lines)


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dl4lqs", description="Consistency checking for DL4 knowledge bases.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fmt(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")

    c = sub.add_parser("check", help="decide consistency within a finite bound")
    c.add_argument("kb")
    c.add_argument("--rules", help="SWRL rules to conjoin")
    c.add_argument("--bound-ind", type=int, metavar="N")
    c.add_argument("--bound-data", action="append", metavar="d=N")
    c.add_argument("--max-conflicts", type=int, metavar="N")
    c.add_argument("--model", action="store_true", help="print the model when one is found")
    c.add_argument("--trace", action="store_true", help="print solver statistics and decisions")
    c.add_argument("--dump-cnf", metavar="PATH", help="write the grounded CNF in DIMACS format")
    fmt(c)

    t = sub.add_parser("translate", help="print the set-theoretic translation")
    t.add_argument("kb")
    t.add_argument("--rules")
    fmt(t)

    n = sub.add_parser("normalize", help="print the normalized knowledge base")
    n.add_argument("kb")
    fmt(n)

    v = sub.add_parser("validate", help="check a formula against the fragment restrictions")
    v.add_argument("formula")
    fmt(v)

    r = sub.add_parser("rules", help="translate SWRL rules")
    r.add_argument("rules")
    r.add_argument("--kb", required=True, help="knowledge base declaring the rule vocabulary")
    fmt(r)

    o = sub.add_parser("oracle-check", help="search for a model by direct enumeration")
    o.add_argument("kb")
    o.add_argument("--rules")
    o.add_argument("--max-domain", type=int, metavar="N")
    fmt(o)
    return p


COMMANDS = {
    "check": cmd_check,
    "translate": cmd_translate,
    "normalize": cmd_normalize,
    "validate": cmd_validate,
    "rules": cmd_rules,
    "oracle-check": cmd_oracle,
}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except _ParseFailure as e:
        err.write(f"{e}\n")
        return PARSE
    except (UsageError, BoundError, NotGroundable, TranslationError, KBError) as e:
        err.write(f"dl4lqs: {e}\n")
        return USAGE


def main(argv=None) -> int:
    code = run(argv)
    raise SystemExit(code)
