"""Command-line front end.

Every subcommand maps onto one library operation and prints either a short
human-readable report or, with ``--json``, a single JSON document.

Exit codes: 0 the analysis ran (whatever its verdict), 1 usage error,
2 model or parse error, 3 search cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

from . import corpus
from .actual import but_for, exclude_agent, find_actual_causes, is_actual_cause
from .dsl import ParseError, export_dot, parse, parse_formula, parse_pairs, serialize
from .dsl.serialize import format_expr
from .graph import (CausalGraph, GraphError, backdoor_sets, check_backdoor, check_frontdoor,
                    d_separated)
from .model import ModelError, format_value, validate
from .patterns import (PatternError, builtin_patterns, check_accountability, equivalent,
                       load_pattern, match_pattern, project)
from .semantics import SearchCapExceeded, evaluate, intervene

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- helpers -----------------------------------------------------------------

def _read_model(spec: str):
    """Load a model from a path, or from the bundled corpus by name."""
    path = Path(spec)
    if path.exists():
        text, name = path.read_text(encoding="utf-8"), str(path)
    elif spec in corpus.NAMES:
        text, name = corpus.source(spec), f"{spec}.scm"
    else:
        raise UsageError(f"model file not found: {spec}")
    result = parse(text, name)
    if not result.ok:
        raise ParseError(result.diagnostics)
    return result.model, [d.to_dict() for d in result.warnings]


def _names(text: Optional[str]) -> List[str]:
    if not text:
        return []
    return [t.strip() for t in text.split(",") if t.strip()]


def _pattern(spec: str):
    if spec.lower() in builtin_patterns():
        return builtin_patterns()[spec.lower()]
    if Path(spec).exists():
        return load_pattern(spec)
    raise UsageError(f"unknown pattern {spec!r}; use one of "
                     + ", ".join(sorted(builtin_patterns())) + " or a .pattern file")


def _need(args, *names):
    for n in names:
        if getattr(args, n, None) in (None, ""):
            flag = "--" + n.replace("_", "-")
            raise UsageError(f"{args.command} requires {flag}")


def _pairs_text(d) -> str:
    return ", ".join(f"{k}={v}" for k, v in d.items())


class _Out:
    def __init__(self, color: bool):
        self.color = color
        self.lines: List[str] = []

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def verdict(self, ok: bool, text: str) -> str:
        if not self.color:
            return text
        return ("\033[32m" if ok else "\033[31m") + text + "\033[0m"


# -- commands ------------------------------------------------------------------
# each returns (result payload, human lines writer)

def cmd_validate(args, model, out):
    diags = [d.to_dict() for d in validate(model, include_warnings=True)]
    errors = [d for d in diags if d["severity"] == "error"]
    out.say(out.verdict(not errors, "valid" if not errors else "invalid")
            + f": {model.name} ({len(model.exogenous)} exogenous, "
            f"{len(model.endogenous)} endogenous)")
    for d in diags:
        out.say(f"  {d['severity']}: {d['message']} [{d['code']}]")
    return {"valid": not errors, "diagnostics": diags}


def _context(args, model):
    _need(args, "context")
    return parse_pairs(args.context, model)


def cmd_eval(args, model, out):
    a = evaluate(model, _context(args, model))
    for k in model.exogenous + tuple(n for n in _topo(model)):
        out.say(f"{k} = {format_value(a[k])}")
    return {"assignment": a.to_dict()}


def _topo(model):
    from .model import topological_order
    return topological_order(model)


def cmd_intervene(args, model, out):
    _need(args, "do")
    iv = parse_pairs(args.do, model)
    m2 = intervene(model, iv)
    ctx = _context(args, model)
    a = evaluate(m2, ctx)
    out.say(f"[{_pairs_text({k: format_value(v) for k, v in iv.items()})}]")
    for k in model.exogenous + tuple(_topo(model)):
        out.say(f"{k} = {format_value(a[k])}")
    return {"intervention": {k: format_value(v) for k, v in iv.items()},
            "assignment": a.to_dict()}


def cmd_cause(args, model, out):
    _need(args, "candidate", "phi")
    v = is_actual_cause(model, _context(args, model), parse_pairs(args.candidate, model),
                        parse_formula(args.phi, model), all_witnesses=args.all_witnesses)
    head = f"{v.candidate} is {'an' if v.is_cause else 'not an'} actual cause of {args.phi}"
    out.say(out.verdict(v.is_cause, head))
    if v.is_cause:
        w = v.witness
        out.say(f"  witness: W = {{{_pairs_text(w.frozen.to_dict())}}}, "
                f"x' = {{{_pairs_text(w.setting.to_dict())}}}")
        for extra in v.witnesses[1:]:
            out.say(f"  also:    W = {{{_pairs_text(extra.frozen.to_dict())}}}, "
                    f"x' = {{{_pairs_text(extra.setting.to_dict())}}}")
    else:
        out.say(f"  fails {v.failed_condition}: {v.reason}")
    return v.to_dict()


def cmd_causes(args, model, out):
    _need(args, "phi")
    among = _names(args.among) or None
    found = find_actual_causes(model, _context(args, model), parse_formula(args.phi, model),
                               max_size=args.max_size or 1, candidates=among)
    out.say(f"{len(found)} minimal actual cause(s) of {args.phi}")
    for c in found:
        out.say(f"  {c.candidate}   (W = {{{_pairs_text(c.witness.frozen.to_dict())}}}, "
                f"x' = {{{_pairs_text(c.witness.setting.to_dict())}}})")
    return {"causes": [c.to_dict() for c in found]}


def cmd_butfor(args, model, out):
    _need(args, "candidate", "phi")
    cand = parse_pairs(args.candidate, model)
    ok = but_for(model, _context(args, model), cand, parse_formula(args.phi, model))
    text = _pairs_text({k: format_value(v) for k, v in cand.items()})
    out.say(out.verdict(ok, f"{text} is {'a' if ok else 'not a'} but-for cause of {args.phi}"))
    return {"candidate": {k: format_value(v) for k, v in cand.items()}, "but_for": ok}


def cmd_dsep(args, model, out):
    _need(args, "x", "y")
    v = d_separated(CausalGraph.from_model(model), _names(args.x), _names(args.y),
                    _names(args.z))
    z = "{" + ", ".join(_names(args.z)) + "}"
    out.say(out.verdict(v.separated, ("d-separated" if v.separated else "d-connected")
                        + f" given {z}"))
    if v.witness is not None:
        out.say(f"  open path: {v.witness}")
    for b in v.blocked:
        out.say(f"  {b.path}: blocked at {b.node} ({b.kind.value})")
    return v.to_dict()


def cmd_backdoor(args, model, out):
    _need(args, "x", "y")
    g = CausalGraph.from_model(model)
    if args.z is not None:
        v = check_backdoor(g, args.x, args.y, _names(args.z))
        out.say(out.verdict(v.satisfied, "satisfied" if v.satisfied else "violated")
                + f": {v.message}")
        return v.to_dict()
    sets = backdoor_sets(g, args.x, args.y, max_size=args.max_size)
    out.say(f"minimal back-door sets for ({args.x}, {args.y}):")
    for s in sets:
        out.say("  {" + ", ".join(sorted(s)) + "}")
    if not sets:
        out.say("  none")
    return {"sets": [sorted(s) for s in sets]}


def cmd_frontdoor(args, model, out):
    _need(args, "x", "y")
    v = check_frontdoor(CausalGraph.from_model(model), args.x, args.y, _names(args.z))
    text = "satisfied" if v.satisfied else f"violated (condition {v.violated})"
    out.say(out.verdict(v.satisfied, text) + f": {v.message}")
    return v.to_dict()


def cmd_match(args, model, out):
    _need(args, "pattern", "effect")
    r = match_pattern(model, _pattern(args.pattern), args.effect, args.agent)
    out.say(out.verdict(r.matched, r.verdict) + f": {r.pattern} for {r.agent or '-'}"
            f" -> {r.effect}")
    if r.chain:
        out.say(f"  chain: {r.chain_text()}")
    for b in r.bindings:
        out.say(f"  {b.node} ({b.role.value}) = {b.text()}")
    if r.ambiguity:
        out.say("  ambiguity: " + ", ".join(r.ambiguity) + f" also influence {r.effect}")
    for m in r.missing:
        out.say(f"  missing: {m}")
    for o in r.obligations:
        out.say(f"  obligation: {o}")
    for h in r.hints:
        out.say(f"  hint: {h}")
    return r.to_dict()


def cmd_check(args, model, out):
    _need(args, "pattern")
    agents = _names(args.agent) or None
    rep = check_accountability(model, _pattern(args.pattern), args.effect, agents)
    for s in rep.steps:
        out.say(f"Step {s.number}. {s.title}")
        for line in s.lines:
            out.say(f"  {line}")
    out.say(out.verdict(rep.status in ("unambiguous", "resolved"), f"status: {rep.status}"))
    return rep.to_dict()


def cmd_exclude(args, model, out):
    _need(args, "agent", "effect")
    ex = exclude_agent(model, args.agent, args.effect)
    if ex.excluded:
        out.say(out.verdict(True, f"{ex.agent} excluded") + f": no influence on {ex.effect} "
                f"({ex.contexts_examined} contexts x {ex.value_pairs} value pairs examined)")
    else:
        u, a1, a2 = ex.counterexample
        out.say(out.verdict(False, f"{ex.agent} not excluded")
                + f": in context {_pairs_text(u.to_dict())}, {ex.agent}: "
                f"{format_value(a1)} vs {format_value(a2)} changes {ex.effect}")
    return ex.to_dict()


def cmd_project(args, model, out):
    _need(args, "keep")
    p = project(model, _names(args.keep))
    text = serialize(p)
    for line in text.rstrip("\n").split("\n"):
        out.say(line)
    return {"model": text,
            "equations": {n: format_expr(p.equation(n)) for n in p.endogenous}}


def cmd_compare(args, models, out):
    _need(args, "shared")
    (a, _), (b, _) = models
    r = equivalent(a, b, _names(args.shared))
    shared = "{" + ", ".join(r.shared) + "}"
    out.say(out.verdict(r.equivalent, "equivalent" if r.equivalent else "not equivalent")
            + f" with regard to {shared} ({r.contexts_examined} contexts)")
    for d in r.differences:
        va, vb = (format_value(x) for x in (d.value_a, d.value_b))
        out.say(f"  context {_pairs_text(d.context.to_dict())}: {d.variable} = {va} vs {vb}")
    return r.to_dict()


def cmd_dot(args, model, out):
    text = export_dot(model)
    if args.dot:
        Path(args.dot).write_text(text, encoding="utf-8")
        out.say(f"wrote {args.dot}")
    else:
        for line in text.rstrip("\n").split("\n"):
            out.say(line)
    return {"dot": text, "file": args.dot}


COMMANDS = {
    "validate": (cmd_validate, "check that a model is well-formed"),
    "eval": (cmd_eval, "evaluate a model in a context"),
    "intervene": (cmd_intervene, "evaluate after fixing variables (--do)"),
    "cause": (cmd_cause, "Halpern-Pearl actual-cause check"),
    "causes": (cmd_causes, "search for all minimal actual causes"),
    "butfor": (cmd_butfor, "simple but-for counterfactual test"),
    "dsep": (cmd_dsep, "d-separation of variable sets"),
    "backdoor": (cmd_backdoor, "back-door criterion check or minimal adjustment sets"),
    "frontdoor": (cmd_frontdoor, "front-door criterion check"),
    "match": (cmd_match, "match an accountability pattern"),
    "check": (cmd_check, "four-step accountability check"),
    "exclude": (cmd_exclude, "prove an agent cannot influence an effect"),
    "project": (cmd_project, "eliminate variables by substitution"),
    "compare": (cmd_compare, "functional equivalence of two models"),
    "dot": (cmd_dot, "export the causal graph as Graphviz DOT"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="causalacc", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-m", "--model", action="append", required=True, metavar="FILE",
                       help=".scm file or bundled corpus name" +
                       (" (give twice)" if name == "compare" else ""))
        p.add_argument("--json", action="store_true", help="emit one JSON document")
        if name in ("eval", "intervene", "cause", "causes", "butfor"):
            p.add_argument("-c", "--context", metavar="PAIRS", help="U_X=v,... exogenous values")
        if name == "intervene":
            p.add_argument("--do", metavar="PAIRS", help="X=v,... endogenous fixings")
        if name in ("cause", "butfor"):
            p.add_argument("--candidate", metavar="PAIRS")
        if name in ("cause", "causes", "butfor"):
            p.add_argument("--phi", metavar="EXPR", help="causal formula, e.g. 'P=true'")
        if name == "cause":
            p.add_argument("--all-witnesses", action="store_true")
        if name == "causes":
            p.add_argument("--among", metavar="VARS", help="restrict candidate variables")
        if name in ("causes", "backdoor"):
            p.add_argument("--max-size", type=int, metavar="N")
        if name in ("dsep", "backdoor", "frontdoor"):
            p.add_argument("-x", metavar="VARS")
            p.add_argument("-y", metavar="VARS")
            p.add_argument("-z", metavar="VARS", default=None if name == "backdoor" else "")
        if name in ("match", "check"):
            p.add_argument("--pattern", metavar="NAME|FILE")
        if name in ("match", "check", "exclude"):
            p.add_argument("--effect", metavar="VAR")
            p.add_argument("--agent", metavar="VAR")
        if name == "project":
            p.add_argument("--keep", metavar="VARS")
        if name == "compare":
            p.add_argument("--shared", metavar="VARS")
        if name == "dot":
            p.add_argument("--dot", metavar="FILE", help="write DOT here instead of stdout")
    return parser


def _render_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def run(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    want_json = "--json" in argv
    color = (not want_json and "NO_COLOR" not in os.environ
             and hasattr(stdout, "isatty") and stdout.isatty())
    out = _Out(color)
    command = argv[0] if argv and not argv[0].startswith("-") else None
    inputs: Dict[str, object] = {}
    diagnostics: list = []
    result = None
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("missing command; try --help")
        command = args.command
        inputs = {k: v for k, v in sorted(vars(args).items())
                  if k not in ("command", "json") and v not in (None, False)}
        if command == "compare":
            if len(args.model) != 2:
                raise UsageError("compare needs exactly two -m/--model options")
        elif len(args.model) != 1:
            raise UsageError(f"{command} takes a single -m/--model")
        loaded = [_read_model(m) for m in args.model]
        for _, warnings in loaded:
            diagnostics += warnings
        handler = COMMANDS[command][0]
        arg = loaded if command == "compare" else loaded[0][0]
        result = handler(args, arg, out)
        code = EXIT_OK
        if command == "validate" and not result["valid"]:
            code = EXIT_MODEL
    except UsageError as e:
        code, message = EXIT_USAGE, str(e)
    except ParseError as e:
        code, message = EXIT_MODEL, str(e)
        diagnostics += [d.to_dict() for d in e.parse_diagnostics]
    except SearchCapExceeded as e:
        code, message = EXIT_CAP, f"search cap exceeded: {e}"
    except (ModelError, GraphError, PatternError) as e:
        code, message = EXIT_MODEL, str(e)
    except SystemExit as e:  # --help
        return EXIT_OK if not e.code else EXIT_USAGE
    if code not in (EXIT_OK,) and result is None:
        out.lines = [f"error: {message}"]
    if want_json:
        doc = {"command": command, "inputs": inputs, "result": result,
               "diagnostics": diagnostics, "exit_code": code}
        if result is None:
            doc["error"] = message
        stdout.write(_render_json(doc))
    elif result is None:
        stderr.write("\n".join(out.lines) + "\n")
    else:
        stdout.write("\n".join(out.lines) + "\n")
        for d in diagnostics:
            stderr.write(f"warning: {d['message']} [{d['code']}]\n")
    return code


def main(argv: Optional[List[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
