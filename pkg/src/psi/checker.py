"""Type synthesis for Church-style terms, modulo isomorphism.

The conversion rule never appears explicitly: application, projection and type
application consult the residual operations of :mod:`.iso` instead.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import PsiTypeError, TypeErrorKind
from .iso import arrow_residual, conj_residual, factor_types, forall_strip, types_isomorphic
from .printer import format_term, format_type
from .syntax import (
    App,
    Arrow,
    Conj,
    Context,
    Forall,
    Lam,
    Pair,
    Proj,
    Term,
    TLam,
    Type,
    Var,
    free_term_names,
    free_term_vars,
    free_type_vars,
    subst_type_in_type,
)

RULE_AX = "ax"
RULE_ARROW_I = "⇒i"
RULE_ARROW_E = "⇒e"
RULE_CONJ_I = "∧i"
RULE_CONJ_E = "∧e"
RULE_FORALL_I = "∀i"
RULE_FORALL_E = "∀e"
RULE_ISO = "≡"


def render_path(path: tuple[str, ...]) -> str:
    return "$" + "".join(f".{step}" for step in path)


@dataclass(frozen=True)
class Judgment:
    ctx: Mapping[str, Type]
    term: Term
    ty: Type


@dataclass(frozen=True)
class Derivation:
    rule: str
    term: Term
    ty: Type
    premises: tuple[Derivation, ...] = field(default=())

    def conversions(self) -> int:
        own = 1 if self.rule == RULE_ISO else 0
        return own + sum(p.conversions() for p in self.premises)


class _Checker:
    def __init__(self, closed: bool) -> None:
        self.closed = closed

    def fail(self, kind: TypeErrorKind, path: tuple[str, ...], detail: str) -> PsiTypeError:
        return PsiTypeError(kind, render_path(path), detail)

    def infer(self, ctx: dict[str, Type], r: Term, path: tuple[str, ...]) -> Derivation:
        if isinstance(r, Var):
            bound = ctx.get(r.name)
            if bound is None:
                raise self.fail(
                    TypeErrorKind.UNBOUND_VARIABLE, path, f"variable {r.name} is not in scope"
                )
            if not types_isomorphic(r.ann, bound):
                raise self.fail(
                    TypeErrorKind.ANNOTATION_MISMATCH,
                    path,
                    f"{r.name} is annotated {format_type(r.ann)} "
                    f"but bound at {format_type(bound)}",
                )
            return Derivation(RULE_AX, r, r.ann)

        if isinstance(r, Lam):
            body = self.infer({**ctx, r.name: r.ann}, r.body, path + ("body",))
            return Derivation(RULE_ARROW_I, r, Arrow(r.ann, body.ty), (body,))

        if isinstance(r, App):
            fun = self.infer(ctx, r.fun, path + ("fun",))
            arg = self.infer(ctx, r.arg, path + ("arg",))
            result = arrow_residual(fun.ty, arg.ty)
            if result is None:
                raise self.fail(
                    TypeErrorKind.NOT_AN_ARROW,
                    path,
                    f"{format_type(fun.ty)} does not accept an argument of type "
                    f"{format_type(arg.ty)}",
                )
            fun = _convert(fun, Arrow(arg.ty, result))
            return Derivation(RULE_ARROW_E, r, result, (fun, arg))

        if isinstance(r, Pair):
            left = self.infer(ctx, r.left, path + ("left",))
            right = self.infer(ctx, r.right, path + ("right",))
            return Derivation(RULE_CONJ_I, r, Conj(left.ty, right.ty), (left, right))

        if isinstance(r, Proj):
            inner = self.infer(ctx, r.of, path + ("of",))
            if len(factor_types(inner.ty)) < 2:
                raise self.fail(
                    TypeErrorKind.NOT_A_CONJUNCTION,
                    path,
                    f"cannot project from {format_type(inner.ty)}",
                )
            rest = conj_residual(inner.ty, r.at)
            if rest is None:
                raise self.fail(
                    TypeErrorKind.PROJECTION_TYPE_NOT_PRESENT,
                    path,
                    f"{format_type(r.at)} is not a component of {format_type(inner.ty)}",
                )
            inner = _convert(inner, Conj(r.at, rest))
            return Derivation(RULE_CONJ_E, r, r.at, (inner,))

        if isinstance(r, TLam):
            body = self.infer(ctx, r.body, path + ("body",))
            for name in sorted(free_term_names(r.body)):
                if r.binder in free_type_vars(ctx[name]):
                    raise self.fail(
                        TypeErrorKind.ESCAPING_TYPE_VARIABLE,
                        path,
                        f"{r.binder} occurs free in the type of {name}",
                    )
            return Derivation(RULE_FORALL_I, r, Forall(r.binder, body.ty), (body,))

        fun = self.infer(ctx, r.fun, path + ("fun",))
        stripped = forall_strip(fun.ty)
        if stripped is None:
            raise self.fail(
                TypeErrorKind.NOT_A_UNIVERSAL,
                path,
                f"{format_type(fun.ty)} cannot be applied to a type",
            )
        binder, body_ty = stripped
        fun = _convert(fun, Forall(binder, body_ty))
        return Derivation(RULE_FORALL_E, r, subst_type_in_type(body_ty, binder, r.at), (fun,))


def _convert(premise: Derivation, reshaped: Type) -> Derivation:
    if premise.ty == reshaped:
        return premise
    return Derivation(RULE_ISO, premise.term, reshaped, (premise,))


def _effective_context(ctx: Context, r: Term, closed: bool) -> dict[str, Type]:
    scope = dict(ctx)
    if not closed:
        for name, ann in free_term_vars(r).items():
            scope.setdefault(name, ann)
    return scope


def derive(ctx: Context, r: Term, *, closed: bool = False) -> Derivation:
    """Typing derivation of ``r``; free variables missing from ``ctx`` take their own
    annotation unless ``closed`` is set."""

    return _Checker(closed).infer(_effective_context(ctx, r, closed), r, ())


def synthesize(ctx: Context, r: Term, *, closed: bool = False) -> Type:
    return derive(ctx, r, closed=closed).ty


def judge(ctx: Context, r: Term, *, closed: bool = False) -> Judgment:
    return Judgment(dict(ctx), r, synthesize(ctx, r, closed=closed))


def check(ctx: Context, r: Term, a: Type, *, closed: bool = False) -> bool:
    return types_isomorphic(synthesize(ctx, r, closed=closed), a)


@lru_cache(maxsize=1 << 16)
def type_of(r: Term) -> Type | None:
    """Synthesized type under the annotations ``r`` carries, or ``None`` if ill-typed."""

    try:
        return synthesize({}, r)
    except PsiTypeError:
        return None


def render_derivation(d: Derivation, indent: int = 0) -> str:
    lines = [f"{'  ' * indent}({d.rule}) {format_term(d.term)} : {format_type(d.ty)}"]
    for premise in d.premises:
        lines.append(render_derivation(premise, indent + 1))
    return "\n".join(lines)
