"""Command-line front end: ``psi check``, ``psi eval``, ``psi iso`` and friends."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from enum import IntEnum
from pathlib import Path

from src.psi.checker import derive, render_derivation, synthesize
from src.psi.corpus import RULE_BUDGET, SourceReport, check_source
from src.psi.errors import InvariantViolation, ParseError, PsiTypeError
from src.psi.iso import prime_factors, types_isomorphic
from src.psi.measures import longest_reduction, measures
from src.psi.oracles import iso_oracle, pair_shape_classify
from src.psi.parser import load_source, parse_bindings, parse_term, parse_type
from src.psi.printer import format_term, format_type
from src.psi.rewrite import ReductionGraph, Strategy, equiv_class, normalize, order_key
from src.psi.syntax import Pair, Term, Type
from src.psi.traces import reduction_graph_view, to_dot, trace_document, trace_graph
from src.settings import get_settings

logger = logging.getLogger("psi")


class ExitCode(IntEnum):
    OK = 0
    TYPE_ERROR = 1
    PARSE_ERROR = 2
    BUDGET = 3
    INVARIANT = 4


def _typed_term(text: str, ctx: dict[str, Type] | None = None) -> tuple[Term, Type]:
    term = parse_term(text, ctx)
    return term, synthesize(ctx or {}, term)


def _strategy(args: argparse.Namespace) -> Strategy:
    return Strategy.EXHAUSTIVE if args.all else Strategy.DETERMINISTIC


def _report_exit(report: SourceReport) -> ExitCode:
    if report.status == "fail":
        return ExitCode.TYPE_ERROR
    if report.has_rule(RULE_BUDGET):
        return ExitCode.BUDGET
    return ExitCode.OK


def _print_findings(report: SourceReport) -> None:
    for finding in report.findings:
        print(f"{finding.severity} [{finding.rule}] {finding.declaration}: {finding.message}")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_check(args: argparse.Namespace) -> ExitCode:
    source = load_source(args.file)
    report = check_source(
        source,
        evaluate=not args.no_eval,
        strategy=Strategy.EXHAUSTIVE,
        budget=args.budget,
        max_steps=args.max_steps,
    )
    if args.json:
        print(json.dumps(report.as_dict(), indent=2, ensure_ascii=False))
        return _report_exit(report)
    for entry in report.declarations:
        if entry.type is None:
            continue
        print(f"{entry.name} : {format_type(entry.type)}")
        if args.derivation:
            declaration = source.declaration(entry.name)
            if declaration is not None:
                print(render_derivation(derive(declaration.context, declaration.term), 1))
        for nf in entry.normal_forms:
            print(f"  => {format_term(nf)}")
    _print_findings(report)
    print(report.status)
    return _report_exit(report)


def cmd_eval(args: argparse.Namespace) -> ExitCode:
    source = load_source(args.file)
    report = check_source(
        source, strategy=_strategy(args), budget=args.budget, max_steps=args.max_steps
    )
    for entry in report.declarations:
        for nf in entry.normal_forms:
            print(f"{entry.name} => {format_term(nf)}")
    _print_findings(report)
    return _report_exit(report)


def cmd_iso(args: argparse.Namespace) -> ExitCode:
    print("true" if types_isomorphic(parse_type(args.left), parse_type(args.right)) else "false")
    return ExitCode.OK


def cmd_pf(args: argparse.Namespace) -> ExitCode:
    for prime in prime_factors(parse_type(args.type)):
        print(format_type(prime.denote()))
    return ExitCode.OK


def cmd_class(args: argparse.Namespace) -> ExitCode:
    term, _ = _typed_term(args.term)
    cls = equiv_class(term, args.budget)
    for member in sorted(cls.members.values(), key=order_key):
        print(format_term(member))
    print(f"-- {len(cls)} terms" + ("" if cls.frontier_exhausted else " (budget reached)"))
    return ExitCode.OK if cls.frontier_exhausted else ExitCode.BUDGET


def cmd_trace(args: argparse.Namespace) -> ExitCode:
    term, _ = _typed_term(args.term)
    strategy = _strategy(args)
    if args.format == "dot" and strategy is Strategy.EXHAUSTIVE:
        graph = ReductionGraph(term, args.budget, args.max_steps)
        sys.stdout.write(to_dot(reduction_graph_view(graph)))
        return ExitCode.OK if graph.exhaustive else ExitCode.BUDGET
    traces = normalize(term, strategy, args.budget, max_steps=args.max_steps)
    if args.format == "dot":
        sys.stdout.write(to_dot(trace_graph(traces)))
    else:
        document = trace_document(
            term, traces, strategy, class_budget=args.budget, max_steps=args.max_steps
        )
        print(json.dumps(document, indent=2, ensure_ascii=False))
    return ExitCode.OK if all(t.exhaustive for t in traces) else ExitCode.BUDGET


def cmd_oracle(args: argparse.Namespace) -> ExitCode:
    result = iso_oracle(parse_type(args.left), parse_type(args.right), args.budget)
    if result.related:
        print(f"related ({result.visited} types visited)")
        return ExitCode.OK
    if result.exhausted:
        print(f"unrelated ({result.visited} types visited)")
        return ExitCode.OK
    print(f"unknown (budget of {args.budget} types reached)")
    return ExitCode.BUDGET


def cmd_shapes(args: argparse.Namespace) -> ExitCode:
    left, _ = _typed_term(args.left)
    right, _ = _typed_term(args.right)
    cls = equiv_class(Pair(left, right), args.budget)
    unmatched: list[Term] = []
    for member in sorted(cls.members.values(), key=order_key):
        verdict = pair_shape_classify(member, left, right, args.budget)
        print(f"{verdict.shape.value} ({verdict.case}): {format_term(member)}")
        if not verdict.ok:
            unmatched.append(member)
    if unmatched:
        raise InvariantViolation(
            f"{len(unmatched)} terms equivalent to the pair match no pair shape, "
            f"first {format_term(unmatched[0])}"
        )
    return ExitCode.OK if cls.frontier_exhausted else ExitCode.BUDGET


def cmd_measures(args: argparse.Namespace) -> ExitCode:
    term, _ = _typed_term(args.term)
    pair = measures(term)
    cls = equiv_class(term, args.budget)
    print(f"M = {pair.m}")
    print(f"P = {pair.p}")
    print(f"class = {len(cls)}" + ("" if cls.frontier_exhausted else "+"))
    return ExitCode.OK if cls.frontier_exhausted else ExitCode.BUDGET


def cmd_longest(args: argparse.Namespace) -> ExitCode:
    term, _ = _typed_term(args.term)
    length = longest_reduction(term, args.budget, max_nodes=args.max_steps)
    if length is None:
        print("unknown")
        return ExitCode.BUDGET
    print(length)
    return ExitCode.OK


def cmd_repl(args: argparse.Namespace) -> ExitCode:
    Repl(args.budget, args.max_steps).loop()
    return ExitCode.OK


def cmd_serve(args: argparse.Namespace) -> ExitCode:
    import uvicorn

    uvicorn.run("src.main:app", host=args.host, port=args.port)
    return ExitCode.OK


# ---------------------------------------------------------------------------
# REPL


class Repl:
    """Read-check-eval loop.

    A bare line is a term: its type and deterministic normal form are printed.
    Meta-commands: ``:ctx x : T, ...``, ``:t TERM``, ``:eval TERM``, ``:class TERM``,
    ``:pf TYPE``, ``:quit``.
    """

    prompt = "psi> "

    def __init__(self, budget: int, max_steps: int) -> None:
        self.budget = budget
        self.max_steps = max_steps
        self.ctx: dict[str, Type] = {}
        self.commands: dict[str, Callable[[str], str]] = {
            ":ctx": self.add_context,
            ":t": self.show_type,
            ":eval": self.evaluate,
            ":class": self.show_class,
            ":pf": self.show_primes,
        }

    def add_context(self, text: str) -> str:
        self.ctx.update(parse_bindings(text))
        return ", ".join(f"{name} : {format_type(ty)}" for name, ty in sorted(self.ctx.items()))

    def show_type(self, text: str) -> str:
        _, ty = _typed_term(text, self.ctx)
        return format_type(ty)

    def evaluate(self, text: str) -> str:
        term, _ = _typed_term(text, self.ctx)
        traces = normalize(term, Strategy.EXHAUSTIVE, self.budget, max_steps=self.max_steps)
        lines = [
            format_term(trace.result) + ("" if trace.normal else " (not normal)")
            for trace in traces
        ]
        if not all(trace.exhaustive for trace in traces):
            lines.append("(budget reached)")
        return "\n".join(lines)

    def show_class(self, text: str) -> str:
        term, _ = _typed_term(text, self.ctx)
        cls = equiv_class(term, self.budget)
        return "\n".join(format_term(m) for m in sorted(cls.members.values(), key=order_key))

    def show_primes(self, text: str) -> str:
        return "\n".join(format_type(p.denote()) for p in prime_factors(parse_type(text)))

    def handle(self, line: str) -> str | None:
        """Output for one input line; ``None`` ends the session."""

        line = line.strip()
        if not line or line.startswith("--"):
            return ""
        command, _, rest = line.partition(" ")
        if command in (":quit", ":q"):
            return None
        try:
            if command.startswith(":"):
                if command not in self.commands:
                    return f"unknown command {command}"
                return self.commands[command](rest)
            term, ty = _typed_term(line, self.ctx)
            traces = normalize(term, Strategy.DETERMINISTIC, self.budget, max_steps=self.max_steps)
            return f"{format_term(traces[0].result)} : {format_type(ty)}"
        except ParseError as exc:
            return f"parse error: {exc}"
        except PsiTypeError as exc:
            return f"type error: {exc}"

    def loop(self) -> None:
        while True:
            try:
                line = input(self.prompt)
            except (EOFError, KeyboardInterrupt):
                print()
                return
            output = self.handle(line)
            if output is None:
                return
            if output:
                print(output)


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="psi", description="Type isomorphisms, typing and reduction for the PSI calculus."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def budgeted(
        name: str, help_text: str, handler: Callable[..., ExitCode]
    ) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument(
            "--budget",
            type=int,
            default=settings.default_budget,
            help="Terms explored per equivalence class. Defaults to PSI_DEFAULT_BUDGET.",
        )
        cmd.add_argument(
            "--max-steps",
            type=int,
            default=settings.max_steps,
            help="Reduction steps or graph classes explored. Defaults to PSI_MAX_STEPS.",
        )
        cmd.set_defaults(handler=handler)
        return cmd

    def strategy_flags(cmd: argparse.ArgumentParser) -> None:
        group = cmd.add_mutually_exclusive_group()
        group.add_argument("--det", action="store_true", help="Follow the least reduct (default).")
        group.add_argument("--all", action="store_true", help="Explore every reduction path.")

    check = budgeted("check", "Type-check a .psi file and verify its expectations.", cmd_check)
    check.add_argument("file", type=Path)
    check.add_argument("--derivation", action="store_true", help="Print typing derivations.")
    check.add_argument("--no-eval", action="store_true", help="Only type-check.")
    check.add_argument("--json", action="store_true", help="Print the report as JSON.")

    evaluate = budgeted("eval", "Normalize every declaration of a .psi file.", cmd_eval)
    evaluate.add_argument("file", type=Path)
    strategy_flags(evaluate)

    iso = sub.add_parser("iso", help="Decide whether two types are isomorphic.")
    iso.add_argument("left")
    iso.add_argument("right")
    iso.set_defaults(handler=cmd_iso)

    pf = sub.add_parser("pf", help="Print the prime factors of a type.")
    pf.add_argument("type")
    pf.set_defaults(handler=cmd_pf)

    budgeted("class", "List the equivalence class of a term.", cmd_class).add_argument("term")

    trace = budgeted("trace", "Emit reduction traces of a term.", cmd_trace)
    trace.add_argument("term")
    trace.add_argument("--format", choices=("json", "dot"), default="json")
    strategy_flags(trace)

    oracle = sub.add_parser("oracle", help="Search the isomorphism axioms for a connection.")
    oracle.add_argument("left")
    oracle.add_argument("right")
    oracle.add_argument("--budget", type=int, default=settings.oracle_budget)
    oracle.set_defaults(handler=cmd_oracle)

    shapes = budgeted("shapes", "Classify the terms equivalent to a pair of two terms.", cmd_shapes)
    shapes.add_argument("left")
    shapes.add_argument("right")

    budgeted("measures", "Print the measures M and P of a term.", cmd_measures).add_argument(
        "term"
    )
    budgeted("longest", "Length of the longest reduction of a term.", cmd_longest).add_argument(
        "term"
    )
    budgeted("repl", "Interactive read-check-eval loop.", cmd_repl)

    serve = sub.add_parser("serve", help="Run the HTTP service.")
    serve.add_argument("--host", default=settings.host)
    serve.add_argument("--port", type=int, default=settings.port)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level.upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return int(args.handler(args))
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return ExitCode.PARSE_ERROR
    except OSError as exc:
        print(f"cannot read {exc.filename}: {exc.strerror}", file=sys.stderr)
        return ExitCode.PARSE_ERROR
    except PsiTypeError as exc:
        print(f"type error: {exc}", file=sys.stderr)
        return ExitCode.TYPE_ERROR
    except InvariantViolation as exc:
        logger.error("invariant violated: %s", exc)
        return ExitCode.INVARIANT


if __name__ == "__main__":
    sys.exit(main())
