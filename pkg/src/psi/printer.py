"""Concrete syntax rendering with minimal parentheses.

Binders whose names the kernel generated are shown under readable names derived
from their base name; the chosen names never clash with a name in the printed tree.
"""

from __future__ import annotations

from .syntax import (
    CANONICAL_MARK,
    FRESH_MARK,
    TYPE_NODES,
    App,
    Arrow,
    Conj,
    Forall,
    Lam,
    Pair,
    Proj,
    Term,
    TLam,
    TVar,
    Type,
    Var,
    free_term_vars,
    is_generated,
    names_in,
)

# Type precedences.
_FORALL, _ARROW, _CONJ, _TATOM = 0, 1, 2, 3
# Term precedences.
_BINDER, _APP, _ATOM = 0, 1, 2


class _Names:
    def __init__(self, root: Type | Term) -> None:
        self.taken = {n for n in names_in(root) if not is_generated(n)}
        self.types: dict[str, str] = {}
        self.terms: dict[str, str] = {}

    def _pick(self, name: str, table: dict[str, str], default: str) -> str:
        if not is_generated(name):
            return name
        if name in table:
            return table[name]
        stem = name.split(FRESH_MARK, 1)[0]
        base = default if not stem or stem.startswith(CANONICAL_MARK) else stem
        candidate, n = base, 0
        while candidate in self.taken:
            n += 1
            candidate = f"{base}{n}"
        self.taken.add(candidate)
        table[name] = candidate
        return candidate

    def type_var(self, name: str) -> str:
        return self._pick(name, self.types, "X")

    def term_var(self, name: str) -> str:
        return self._pick(name, self.terms, "x")


def _type(a: Type, prec: int, names: _Names) -> str:
    if isinstance(a, TVar):
        return names.type_var(a.name)
    if isinstance(a, Arrow):
        text = f"{_type(a.dom, _CONJ, names)} -> {_type(a.cod, _FORALL, names)}"
        own = _ARROW
    elif isinstance(a, Conj):
        text = f"{_type(a.left, _TATOM, names)} /\\ {_type(a.right, _CONJ, names)}"
        own = _CONJ
    else:
        text = f"forall {names.type_var(a.binder)}. {_type(a.body, _FORALL, names)}"
        own = _FORALL
    return f"({text})" if own < prec else text


def _term(r: Term, prec: int, names: _Names) -> str:
    if isinstance(r, Var):
        return names.term_var(r.name)
    if isinstance(r, Pair):
        return f"<{_term(r.left, _BINDER, names)}, {_term(r.right, _BINDER, names)}>"
    if isinstance(r, Lam):
        ann = _type(r.ann, _ARROW, names)
        text = f"lam {names.term_var(r.name)} : {ann}. {_term(r.body, _BINDER, names)}"
        own = _BINDER
    elif isinstance(r, TLam):
        text = f"tlam {names.type_var(r.binder)}. {_term(r.body, _BINDER, names)}"
        own = _BINDER
    elif isinstance(r, App):
        text = f"{_term(r.fun, _APP, names)} {_term(r.arg, _ATOM, names)}"
        own = _APP
    elif isinstance(r, Proj):
        text = f"pi [{_type(r.at, _FORALL, names)}] {_term(r.of, _ATOM, names)}"
        own = _APP
    else:
        text = f"{_term(r.fun, _APP, names)} [{_type(r.at, _FORALL, names)}]"
        own = _APP
    return f"({text})" if own < prec else text


def format_type(a: Type) -> str:
    return _type(a, _FORALL, _Names(a))


def format_term(r: Term, *, annotate_free: bool = False) -> str:
    names = _Names(r)
    text = _term(r, _BINDER, names)
    if annotate_free:
        free = free_term_vars(r)
        if free:
            clauses = ", ".join(
                f"{names.term_var(n)} : {_type(t, _FORALL, names)}" for n, t in free.items()
            )
            text = f"{text} where {clauses}"
    return text


def format_syntax(a: Type | Term) -> str:
    if isinstance(a, TYPE_NODES):
        return format_type(a)
    return format_term(a)
