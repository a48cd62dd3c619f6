"""Checks a parsed ``.psi`` source file: types, evaluation, and its ``expect`` directives."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from . import KERNEL_VERSION
from .checker import synthesize
from .errors import PsiTypeError
from .iso import types_isomorphic
from .parser import Declaration, SourceFile
from .printer import format_term, format_type
from .rewrite import (
    DEFAULT_BUDGET,
    DEFAULT_MAX_STEPS,
    Equivalence,
    ReductionTrace,
    Strategy,
    normalize,
    term_equiv,
)
from .syntax import Term, Type

logger = logging.getLogger(__name__)

RULE_TYPE_ERROR = "type_error"
RULE_EXPECT_TYPE = "expect_type"
RULE_EXPECT_RESULT = "expect_result"
RULE_BUDGET = "budget"


@dataclass
class Finding:
    declaration: str
    message: str
    severity: str
    rule: str
    detail: dict[str, Any] | None = None

    def as_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "declaration": self.declaration,
            "message": self.message,
            "severity": self.severity,
            "rule": self.rule,
        }
        if self.detail is not None:
            payload["detail"] = self.detail
        return payload


@dataclass
class DeclarationReport:
    name: str
    type: Type | None = None
    traces: list[ReductionTrace] = field(default_factory=list)
    evaluated: bool = False

    @property
    def normal_forms(self) -> list[Term]:
        return [trace.result for trace in self.traces if trace.normal]

    @property
    def exhaustive(self) -> bool:
        return all(trace.exhaustive for trace in self.traces)

    def as_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "name": self.name,
            "type": None if self.type is None else format_type(self.type),
        }
        if self.evaluated:
            payload["normal_forms"] = [format_term(t) for t in self.normal_forms]
            payload["exhaustive"] = self.exhaustive
        return payload


@dataclass
class SourceReport:
    declarations: list[DeclarationReport] = field(default_factory=list)
    findings: list[Finding] = field(default_factory=list)

    @property
    def status(self) -> str:
        return "fail" if any(f.severity == "error" for f in self.findings) else "pass"

    def has_rule(self, rule: str) -> bool:
        return any(f.rule == rule for f in self.findings)

    def as_dict(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "declarations": [d.as_dict() for d in self.declarations],
            "findings": [f.as_dict() for f in self.findings],
            "kernel_version": KERNEL_VERSION,
        }


def _check_declaration(
    source: SourceFile,
    declaration: Declaration,
    report: SourceReport,
    *,
    evaluate: bool,
    strategy: Strategy,
    budget: int,
    max_steps: int,
) -> DeclarationReport:
    result = DeclarationReport(declaration.name)
    try:
        result.type = synthesize(declaration.context, declaration.term)
    except PsiTypeError as exc:
        report.findings.append(
            Finding(declaration.name, str(exc), "error", RULE_TYPE_ERROR, exc.as_dict())
        )
        return result

    expectations = source.expectations_for(declaration.name)
    for expectation in expectations:
        if expectation.type is None or types_isomorphic(result.type, expectation.type):
            continue
        report.findings.append(
            Finding(
                declaration.name,
                f"has type {format_type(result.type)}, "
                f"not isomorphic to {format_type(expectation.type)}",
                "error",
                RULE_EXPECT_TYPE,
                {"line": expectation.line},
            )
        )

    if not evaluate:
        return result
    result.traces = normalize(declaration.term, strategy, budget, max_steps=max_steps)
    result.evaluated = True
    if not result.exhaustive:
        report.findings.append(
            Finding(
                declaration.name,
                f"evaluation stopped at its budget ({budget} terms per class, {max_steps} steps)",
                "warning",
                RULE_BUDGET,
            )
        )
    for expectation in expectations:
        if expectation.term is None:
            continue
        missed = [
            nf
            for nf in result.normal_forms
            if term_equiv(nf, expectation.term, budget) is not Equivalence.TRUE
        ]
        if missed or (result.exhaustive and not result.normal_forms):
            shown = ", ".join(format_term(nf) for nf in missed) or "no normal form"
            report.findings.append(
                Finding(
                    declaration.name,
                    f"expected {format_term(expectation.term)}, reached {shown}",
                    "error",
                    RULE_EXPECT_RESULT,
                    {"line": expectation.line},
                )
            )
    return result


def check_source(
    source: SourceFile,
    *,
    evaluate: bool = True,
    strategy: Strategy = Strategy.EXHAUSTIVE,
    budget: int = DEFAULT_BUDGET,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> SourceReport:
    report = SourceReport()
    for declaration in source.declarations:
        report.declarations.append(
            _check_declaration(
                source,
                declaration,
                report,
                evaluate=evaluate,
                strategy=strategy,
                budget=budget,
                max_steps=max_steps,
            )
        )
    logger.debug(
        "checked %d declarations, %d findings", len(source.declarations), len(report.findings)
    )
    return report
