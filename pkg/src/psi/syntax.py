"""Types and Church-style terms: binding, substitution and alpha-canonical forms."""

from __future__ import annotations

import hashlib
import itertools
from collections.abc import Mapping
from dataclasses import dataclass
from functools import lru_cache
from typing import TypeAlias, Union

# Kernel-generated names carry one of these marks; the parser never produces either.
FRESH_MARK = "#"
CANONICAL_MARK = "@"

_fresh_counter = itertools.count(1)


def fresh_name(base: str) -> str:
    stem = base.split(FRESH_MARK, 1)[0]
    return f"{stem}{FRESH_MARK}{next(_fresh_counter)}"


def is_generated(name: str) -> bool:
    return FRESH_MARK in name or name.startswith(CANONICAL_MARK)


@dataclass(frozen=True, slots=True)
class TVar:
    name: str


@dataclass(frozen=True, slots=True)
class Arrow:
    dom: Type
    cod: Type


@dataclass(frozen=True, slots=True)
class Conj:
    left: Type
    right: Type


@dataclass(frozen=True, slots=True)
class Forall:
    binder: str
    body: Type


Type: TypeAlias = Union[TVar, Arrow, Conj, Forall]
TYPE_NODES = (TVar, Arrow, Conj, Forall)


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    ann: Type


@dataclass(frozen=True, slots=True)
class Lam:
    name: str
    ann: Type
    body: Term


@dataclass(frozen=True, slots=True)
class App:
    fun: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class Pair:
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Proj:
    at: Type
    of: Term


@dataclass(frozen=True, slots=True)
class TLam:
    binder: str
    body: Term


@dataclass(frozen=True, slots=True)
class TApp:
    fun: Term
    at: Type


Term: TypeAlias = Union[Var, Lam, App, Pair, Proj, TLam, TApp]
TERM_NODES = (Var, Lam, App, Pair, Proj, TLam, TApp)

Context: TypeAlias = Mapping[str, Type]


# ---------------------------------------------------------------------------
# Free variables


def free_type_vars(a: Type | Term | Context) -> frozenset[str]:
    if isinstance(a, TYPE_NODES):
        return _ftv_type(a)
    if isinstance(a, TERM_NODES):
        return _ftv_term(a)
    found: frozenset[str] = frozenset()
    for bound in a.values():
        found |= _ftv_type(bound)
    return found


@lru_cache(maxsize=1 << 16)
def _ftv_type(a: Type) -> frozenset[str]:
    if isinstance(a, TVar):
        return frozenset((a.name,))
    if isinstance(a, Arrow):
        return _ftv_type(a.dom) | _ftv_type(a.cod)
    if isinstance(a, Conj):
        return _ftv_type(a.left) | _ftv_type(a.right)
    return _ftv_type(a.body) - {a.binder}


@lru_cache(maxsize=1 << 16)
def _ftv_term(r: Term) -> frozenset[str]:
    if isinstance(r, Var):
        return _ftv_type(r.ann)
    if isinstance(r, Lam):
        return _ftv_type(r.ann) | _ftv_term(r.body)
    if isinstance(r, App):
        return _ftv_term(r.fun) | _ftv_term(r.arg)
    if isinstance(r, Pair):
        return _ftv_term(r.left) | _ftv_term(r.right)
    if isinstance(r, Proj):
        return _ftv_type(r.at) | _ftv_term(r.of)
    if isinstance(r, TLam):
        return _ftv_term(r.body) - {r.binder}
    return _ftv_term(r.fun) | _ftv_type(r.at)


@lru_cache(maxsize=1 << 16)
def free_term_names(r: Term) -> frozenset[str]:
    if isinstance(r, Var):
        return frozenset((r.name,))
    if isinstance(r, Lam):
        return free_term_names(r.body) - {r.name}
    if isinstance(r, App):
        return free_term_names(r.fun) | free_term_names(r.arg)
    if isinstance(r, Pair):
        return free_term_names(r.left) | free_term_names(r.right)
    if isinstance(r, Proj):
        return free_term_names(r.of)
    if isinstance(r, TLam):
        return free_term_names(r.body)
    return free_term_names(r.fun)


def free_term_vars(r: Term) -> dict[str, Type]:
    """Free term variables with the annotation of their leftmost occurrence."""

    found: dict[str, Type] = {}

    def walk(node: Term, bound: frozenset[str]) -> None:
        if isinstance(node, Var):
            if node.name not in bound:
                found.setdefault(node.name, node.ann)
        elif isinstance(node, Lam):
            walk(node.body, bound | {node.name})
        elif isinstance(node, App):
            walk(node.fun, bound)
            walk(node.arg, bound)
        elif isinstance(node, Pair):
            walk(node.left, bound)
            walk(node.right, bound)
        elif isinstance(node, Proj):
            walk(node.of, bound)
        else:
            walk(node.body if isinstance(node, TLam) else node.fun, bound)

    walk(r, frozenset())
    return found


def names_in(a: Type | Term) -> set[str]:
    """Every variable name written anywhere in ``a``, bound or free, types and terms alike."""

    names: set[str] = set()
    stack: list[Type | Term] = [a]
    while stack:
        node = stack.pop()
        if isinstance(node, TVar):
            names.add(node.name)
        elif isinstance(node, Arrow):
            stack += [node.dom, node.cod]
        elif isinstance(node, Conj):
            stack += [node.left, node.right]
        elif isinstance(node, Forall):
            names.add(node.binder)
            stack.append(node.body)
        elif isinstance(node, Var):
            names.add(node.name)
            stack.append(node.ann)
        elif isinstance(node, Lam):
            names.add(node.name)
            stack += [node.ann, node.body]
        elif isinstance(node, App):
            stack += [node.fun, node.arg]
        elif isinstance(node, Pair):
            stack += [node.left, node.right]
        elif isinstance(node, Proj):
            stack += [node.at, node.of]
        elif isinstance(node, TLam):
            names.add(node.binder)
            stack.append(node.body)
        else:
            stack += [node.fun, node.at]
    return names


# ---------------------------------------------------------------------------
# Substitution


def subst_type_in_type(a: Type, x: str, b: Type) -> Type:
    """Capture-avoiding ``[x:=b]a``."""

    return _subst_type(a, x, b, _ftv_type(b))


def _subst_type(a: Type, x: str, b: Type, fv_b: frozenset[str]) -> Type:
    if x not in _ftv_type(a):
        return a
    if isinstance(a, TVar):
        return b
    if isinstance(a, Arrow):
        return Arrow(_subst_type(a.dom, x, b, fv_b), _subst_type(a.cod, x, b, fv_b))
    if isinstance(a, Conj):
        return Conj(_subst_type(a.left, x, b, fv_b), _subst_type(a.right, x, b, fv_b))
    binder, body = a.binder, a.body
    if binder in fv_b:
        renamed = fresh_name(binder)
        body = _subst_type(body, binder, TVar(renamed), frozenset((renamed,)))
        binder = renamed
    return Forall(binder, _subst_type(body, x, b, fv_b))


def subst_type_in_term(r: Term, x: str, b: Type) -> Term:
    """Capture-avoiding ``[x:=b]r`` over every annotation and type argument of ``r``."""

    return _subst_type_term(r, x, b, _ftv_type(b))


def _subst_type_term(r: Term, x: str, b: Type, fv_b: frozenset[str]) -> Term:
    if x not in _ftv_term(r):
        return r
    if isinstance(r, Var):
        return Var(r.name, _subst_type(r.ann, x, b, fv_b))
    if isinstance(r, Lam):
        return Lam(r.name, _subst_type(r.ann, x, b, fv_b), _subst_type_term(r.body, x, b, fv_b))
    if isinstance(r, App):
        return App(_subst_type_term(r.fun, x, b, fv_b), _subst_type_term(r.arg, x, b, fv_b))
    if isinstance(r, Pair):
        return Pair(_subst_type_term(r.left, x, b, fv_b), _subst_type_term(r.right, x, b, fv_b))
    if isinstance(r, Proj):
        return Proj(_subst_type(r.at, x, b, fv_b), _subst_type_term(r.of, x, b, fv_b))
    if isinstance(r, TApp):
        return TApp(_subst_type_term(r.fun, x, b, fv_b), _subst_type(r.at, x, b, fv_b))
    binder, body = r.binder, r.body
    if binder in fv_b:
        renamed = fresh_name(binder)
        body = _subst_type_term(body, binder, TVar(renamed), frozenset((renamed,)))
        binder = renamed
    return TLam(binder, _subst_type_term(body, x, b, fv_b))


def rename_term_var(r: Term, old: str, new: str) -> Term:
    """Renames free occurrences of ``old``; each occurrence keeps its own annotation.

    ``new`` must not occur in ``r``.
    """

    if old not in free_term_names(r):
        return r
    if isinstance(r, Var):
        return Var(new, r.ann)
    if isinstance(r, Lam):
        return Lam(r.name, r.ann, rename_term_var(r.body, old, new))
    if isinstance(r, App):
        return App(rename_term_var(r.fun, old, new), rename_term_var(r.arg, old, new))
    if isinstance(r, Pair):
        return Pair(rename_term_var(r.left, old, new), rename_term_var(r.right, old, new))
    if isinstance(r, Proj):
        return Proj(r.at, rename_term_var(r.of, old, new))
    if isinstance(r, TLam):
        return TLam(r.binder, rename_term_var(r.body, old, new))
    return TApp(rename_term_var(r.fun, old, new), r.at)


def subst_term(r: Term, x: str, s: Term) -> Term:
    """Capture-avoiding ``[x:=s]r``."""

    return _subst_term(r, x, s, free_term_names(s), _ftv_term(s))


def _subst_term(
    r: Term, x: str, s: Term, fv_s: frozenset[str], ftv_s: frozenset[str]
) -> Term:
    if x not in free_term_names(r):
        return r
    if isinstance(r, Var):
        return s
    if isinstance(r, Lam):
        name, body = r.name, r.body
        if name in fv_s:
            renamed = fresh_name(name)
            body = rename_term_var(body, name, renamed)
            name = renamed
        return Lam(name, r.ann, _subst_term(body, x, s, fv_s, ftv_s))
    if isinstance(r, App):
        return App(_subst_term(r.fun, x, s, fv_s, ftv_s), _subst_term(r.arg, x, s, fv_s, ftv_s))
    if isinstance(r, Pair):
        return Pair(
            _subst_term(r.left, x, s, fv_s, ftv_s), _subst_term(r.right, x, s, fv_s, ftv_s)
        )
    if isinstance(r, Proj):
        return Proj(r.at, _subst_term(r.of, x, s, fv_s, ftv_s))
    if isinstance(r, TApp):
        return TApp(_subst_term(r.fun, x, s, fv_s, ftv_s), r.at)
    binder, body = r.binder, r.body
    if binder in ftv_s:
        renamed = fresh_name(binder)
        body = subst_type_in_term(body, binder, TVar(renamed))
        binder = renamed
    return TLam(binder, _subst_term(body, x, s, fv_s, ftv_s))


# ---------------------------------------------------------------------------
# Alpha-canonical forms


@dataclass(frozen=True, slots=True)
class AlphaCanonical:
    tree: Type | Term
    digest: str


def _canonical_type(a: Type, env: dict[str, str], depth: int) -> Type:
    if isinstance(a, TVar):
        return TVar(env.get(a.name, a.name))
    if isinstance(a, Arrow):
        return Arrow(_canonical_type(a.dom, env, depth), _canonical_type(a.cod, env, depth))
    if isinstance(a, Conj):
        return Conj(_canonical_type(a.left, env, depth), _canonical_type(a.right, env, depth))
    name = f"{CANONICAL_MARK}{depth}"
    return Forall(name, _canonical_type(a.body, {**env, a.binder: name}, depth + 1))


def _canonical_term(
    r: Term, tenv: dict[str, str], tdepth: int, venv: dict[str, str], vdepth: int
) -> Term:
    if isinstance(r, Var):
        return Var(venv.get(r.name, r.name), _canonical_type(r.ann, tenv, tdepth))
    if isinstance(r, Lam):
        name = f"{CANONICAL_MARK}{vdepth}"
        return Lam(
            name,
            _canonical_type(r.ann, tenv, tdepth),
            _canonical_term(r.body, tenv, tdepth, {**venv, r.name: name}, vdepth + 1),
        )
    if isinstance(r, App):
        return App(
            _canonical_term(r.fun, tenv, tdepth, venv, vdepth),
            _canonical_term(r.arg, tenv, tdepth, venv, vdepth),
        )
    if isinstance(r, Pair):
        return Pair(
            _canonical_term(r.left, tenv, tdepth, venv, vdepth),
            _canonical_term(r.right, tenv, tdepth, venv, vdepth),
        )
    if isinstance(r, Proj):
        return Proj(
            _canonical_type(r.at, tenv, tdepth), _canonical_term(r.of, tenv, tdepth, venv, vdepth)
        )
    if isinstance(r, TLam):
        name = f"{CANONICAL_MARK}{tdepth}"
        return TLam(
            name, _canonical_term(r.body, {**tenv, r.binder: name}, tdepth + 1, venv, vdepth)
        )
    return TApp(
        _canonical_term(r.fun, tenv, tdepth, venv, vdepth), _canonical_type(r.at, tenv, tdepth)
    )


@lru_cache(maxsize=1 << 16)
def alpha_canonical(a: Type | Term) -> AlphaCanonical:
    """Renames bound variables by binder depth; binder order is kept."""

    if isinstance(a, TYPE_NODES):
        tree: Type | Term = _canonical_type(a, {}, 0)
    else:
        tree = _canonical_term(a, {}, 0, {}, 0)
    digest = hashlib.sha224(repr(tree).encode("utf-8")).hexdigest()
    return AlphaCanonical(tree, digest)


def alpha_key(a: Type | Term) -> str:
    return alpha_canonical(a).digest


def alpha_equivalent(a: Type | Term, b: Type | Term) -> bool:
    return a == b or alpha_canonical(a).tree == alpha_canonical(b).tree
