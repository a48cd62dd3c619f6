"""Recursive-descent parser for types, terms and ``.psi`` source files.

Grammar::

    type  := "forall" IDENT "." type | conj ("->" type)?
    conj  := atom ("/\\" conj)?
    atom  := IDENT | "(" type ")"
    term  := "lam" IDENT ":" type "." term | "tlam" IDENT "." term | app
    app   := operand (operand | "[" type "]")*
    operand := IDENT | "(" term ")" | "<" term "," term ">" | "pi" "[" type "]" operand

Free term variables take their annotation from the context passed in, or from a
trailing ``where x : T, ...`` clause.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError
from .syntax import (
    App,
    Arrow,
    Conj,
    Forall,
    Lam,
    Pair,
    Proj,
    Term,
    TLam,
    TApp,
    TVar,
    Type,
    Var,
)

KEYWORDS = frozenset({"lam", "tlam", "pi", "forall", "where", "ctx", "def", "expect"})

_TOKEN = re.compile(
    r"""
    (?P<newline>\n)
    |(?P<space>[ \t\r]+)
    |(?P<comment>--[^\n]*)
    |(?P<arrow>->)
    |(?P<conj>/\\)
    |(?P<reduces>=>)
    |(?P<ident>[A-Za-z][A-Za-z0-9_']*)
    |(?P<punct>[()<>\[\],.:=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, *, line: int = 1, column: int = 1) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column)
        kind = match.lastgroup or ""
        lexeme = match.group()
        if kind == "newline":
            line, column = line + 1, 1
        else:
            if kind not in ("space", "comment"):
                if kind in ("arrow", "conj", "reduces", "punct"):
                    kind = lexeme
                elif lexeme in KEYWORDS:
                    kind = lexeme
                tokens.append(Token(kind, lexeme, line, column))
            column += len(lexeme)
        pos = match.end()
    tokens.append(Token("eof", "", line, column))
    return tokens


# Placeholder annotation for a free variable until the context or where clause is known.
_PENDING = TVar("?")


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "eof":
            self.pos += 1
        return token

    def error(self, message: str, token: Token | None = None) -> ParseError:
        token = token or self.peek
        found = "end of input" if token.kind == "eof" else repr(token.text)
        return ParseError(f"{message}, found {found}", token.line, token.column)

    def expect(self, kind: str, what: str | None = None) -> Token:
        if self.peek.kind != kind:
            raise self.error(f"expected {what or repr(kind)}")
        return self.advance()

    def at_end(self) -> None:
        if self.peek.kind != "eof":
            raise self.error("unexpected trailing input")

    def type_name(self) -> Token:
        if self.peek.kind != "ident" or not self.peek.text[0].isupper():
            raise self.error("expected a type variable (uppercase initial)")
        return self.advance()

    def term_name(self) -> Token:
        if self.peek.kind != "ident" or not self.peek.text[0].islower():
            raise self.error("expected a variable (lowercase initial)")
        return self.advance()

    # types

    def type_(self) -> Type:
        if self.peek.kind == "forall":
            self.advance()
            binder = self.type_name().text
            self.expect(".")
            return Forall(binder, self.type_())
        left = self.conj()
        if self.peek.kind == "->":
            self.advance()
            return Arrow(left, self.type_())
        return left

    def conj(self) -> Type:
        left = self.type_atom()
        if self.peek.kind == "/\\":
            self.advance()
            return Conj(left, self.conj())
        return left

    def type_atom(self) -> Type:
        token = self.peek
        if token.kind == "ident":
            return TVar(self.type_name().text)
        if token.kind == "(":
            self.advance()
            inner = self.type_()
            self.expect(")")
            return inner
        raise self.error("expected a type")

    # terms

    def term(self, scope: dict[str, Type], free: dict[str, Token]) -> Term:
        kind = self.peek.kind
        if kind == "lam":
            self.advance()
            name = self.term_name().text
            self.expect(":")
            ann = self.type_()
            self.expect(".")
            return Lam(name, ann, self.term({**scope, name: ann}, free))
        if kind == "tlam":
            self.advance()
            binder = self.type_name().text
            self.expect(".")
            return TLam(binder, self.term(scope, free))
        return self.application(scope, free)

    def starts_operand(self) -> bool:
        return self.peek.kind in ("ident", "(", "<", "pi")

    def application(self, scope: dict[str, Type], free: dict[str, Token]) -> Term:
        result = self.operand(scope, free)
        while True:
            if self.peek.kind == "[":
                self.advance()
                at = self.type_()
                self.expect("]")
                result = TApp(result, at)
            elif self.starts_operand():
                result = App(result, self.operand(scope, free))
            else:
                return result

    def operand(self, scope: dict[str, Type], free: dict[str, Token]) -> Term:
        token = self.peek
        if token.kind == "ident":
            self.term_name()
            if token.text in scope:
                return Var(token.text, scope[token.text])
            free.setdefault(token.text, token)
            return Var(token.text, _PENDING)
        if token.kind == "(":
            self.advance()
            inner = self.term(scope, free)
            self.expect(")")
            return inner
        if token.kind == "<":
            self.advance()
            left = self.term(scope, free)
            self.expect(",")
            right = self.term(scope, free)
            self.expect(">")
            return Pair(left, right)
        if token.kind == "pi":
            self.advance()
            self.expect("[")
            at = self.type_()
            self.expect("]")
            return Proj(at, self.operand(scope, free))
        raise self.error("expected a term")

    def bindings(self) -> dict[str, Type]:
        found: dict[str, Type] = {}
        while True:
            token = self.term_name()
            if token.text in found:
                raise ParseError(f"{token.text} is bound twice", token.line, token.column)
            self.expect(":")
            found[token.text] = self.type_()
            if self.peek.kind != ",":
                return found
            self.advance()

    def annotated_term(self, ctx: Mapping[str, Type]) -> tuple[Term, dict[str, Type]]:
        free: dict[str, Token] = {}
        body = self.term({}, free)
        local: dict[str, Type] = {}
        if self.peek.kind == "where":
            self.advance()
            local = self.bindings()
        env = {**ctx, **local}
        for name, token in free.items():
            if name not in env:
                raise ParseError(
                    f"no annotation for free variable {name}", token.line, token.column
                )
        return _resolve(body, env), local


def _resolve(r: Term, env: Mapping[str, Type]) -> Term:
    if isinstance(r, Var):
        return Var(r.name, env[r.name]) if r.ann is _PENDING else r
    if isinstance(r, Lam):
        return Lam(r.name, r.ann, _resolve(r.body, env))
    if isinstance(r, App):
        return App(_resolve(r.fun, env), _resolve(r.arg, env))
    if isinstance(r, Pair):
        return Pair(_resolve(r.left, env), _resolve(r.right, env))
    if isinstance(r, Proj):
        return Proj(r.at, _resolve(r.of, env))
    if isinstance(r, TLam):
        return TLam(r.binder, _resolve(r.body, env))
    return TApp(_resolve(r.fun, env), r.at)


def parse_type(text: str) -> Type:
    parser = _Parser(tokenize(text))
    result = parser.type_()
    parser.at_end()
    return result


def parse_term(text: str, ctx: Mapping[str, Type] | None = None) -> Term:
    parser = _Parser(tokenize(text))
    term, _ = parser.annotated_term(ctx or {})
    parser.at_end()
    return term


def parse_bindings(text: str) -> dict[str, Type]:
    """Parses ``x : T, y : U``; an empty text gives an empty context."""

    parser = _Parser(tokenize(text))
    if parser.peek.kind == "eof":
        return {}
    found = parser.bindings()
    parser.at_end()
    return found


# ---------------------------------------------------------------------------
# Source files


@dataclass(frozen=True)
class Declaration:
    name: str
    context: dict[str, Type]
    term: Term
    line: int


@dataclass(frozen=True)
class Expectation:
    name: str
    kind: str  # "type" or "result"
    line: int
    type: Type | None = None
    term: Term | None = None


@dataclass
class SourceFile:
    declarations: list[Declaration] = field(default_factory=list)
    expectations: list[Expectation] = field(default_factory=list)
    text: str = ""
    path: Path | None = None

    def declaration(self, name: str) -> Declaration | None:
        return next((d for d in self.declarations if d.name == name), None)

    def expectations_for(self, name: str) -> list[Expectation]:
        return [e for e in self.expectations if e.name == name]


def _statements(text: str) -> list[tuple[int, str]]:
    statements: list[tuple[int, list[str]]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("--", 1)[0]
        if not stripped.strip():
            continue
        if raw[:1] in (" ", "\t"):
            if not statements:
                raise ParseError("continuation line outside a statement", number, 1)
            statements[-1][1].append(stripped)
        else:
            statements.append((number, [stripped]))
    return [(number, "\n".join(lines)) for number, lines in statements]


def parse_source(text: str, path: Path | None = None) -> SourceFile:
    source = SourceFile(text=text, path=path)
    ctx: dict[str, Type] = {}
    seen: set[str] = set()
    for line, statement in _statements(text):
        parser = _Parser(tokenize(statement, line=line))
        head = parser.advance()
        if head.kind == "ctx":
            ctx.update(parser.bindings())
        elif head.kind == "def":
            name_token = parser.expect("ident", "a declaration name")
            if name_token.text in seen:
                raise ParseError(
                    f"{name_token.text} is declared twice", name_token.line, name_token.column
                )
            seen.add(name_token.text)
            parser.expect("=")
            term, local = parser.annotated_term(ctx)
            source.declarations.append(
                Declaration(name_token.text, {**ctx, **local}, term, line)
            )
        elif head.kind == "expect":
            name = parser.expect("ident", "a declaration name").text
            if parser.peek.kind == ":":
                parser.advance()
                source.expectations.append(Expectation(name, "type", line, type=parser.type_()))
            elif parser.peek.kind == "=>":
                parser.advance()
                term, _ = parser.annotated_term(ctx)
                source.expectations.append(Expectation(name, "result", line, term=term))
            else:
                raise parser.error("expected ':' or '=>'")
        else:
            raise parser.error("expected 'ctx', 'def' or 'expect'", head)
        parser.at_end()
    for expectation in source.expectations:
        if expectation.name not in seen:
            raise ParseError(
                f"expectation for unknown declaration {expectation.name}", expectation.line, 1
            )
    return source


def decode_source(data: bytes) -> str:
    """UTF-8 text of a source file; an undecodable byte is a parse error at its position."""

    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data.count(b"\n", 0, exc.start) + 1
        column = exc.start - data.rfind(b"\n", 0, exc.start)
        raise ParseError(f"invalid UTF-8 byte 0x{data[exc.start]:02x}", line, column) from exc


def load_source(path: str | Path) -> SourceFile:
    source_path = Path(path)
    return parse_source(decode_source(source_path.read_bytes()), source_path)
