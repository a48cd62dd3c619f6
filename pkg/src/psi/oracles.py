"""Brute-force ground truth: isomorphism by axiom closure, and the shape of pair classes."""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from enum import Enum
from typing import cast

from .rewrite import DEFAULT_BUDGET, EquivClass, equiv_class
from .syntax import (
    App,
    Arrow,
    Conj,
    Forall,
    Lam,
    Pair,
    Term,
    TLam,
    TApp,
    Type,
    alpha_canonical,
    alpha_key,
    free_type_vars,
)

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_BUDGET = 50_000


class Axiom(str, Enum):
    COMM = "comm"
    ASSO = "asso"
    DIST = "dist"
    CURRY = "curry"
    P_COMM = "p-comm"
    P_DIST = "p-dist"


def _canonical(a: Type) -> Type:
    return cast(Type, alpha_canonical(a).tree)


def _at_root(a: Type) -> Iterator[tuple[Axiom, Type]]:
    """Single axiom instances at the root of an alpha-canonical type, both directions.

    Bound names in canonical trees are unique per nesting level, so moving a
    quantifier across a sibling never captures.
    """

    if isinstance(a, Conj):
        yield Axiom.COMM, Conj(a.right, a.left)
        if isinstance(a.right, Conj):
            yield Axiom.ASSO, Conj(Conj(a.left, a.right.left), a.right.right)
        if isinstance(a.left, Conj):
            yield Axiom.ASSO, Conj(a.left.left, Conj(a.left.right, a.right))
        if isinstance(a.left, Arrow) and isinstance(a.right, Arrow) and a.left.dom == a.right.dom:
            yield Axiom.DIST, Arrow(a.left.dom, Conj(a.left.cod, a.right.cod))
        if (
            isinstance(a.left, Forall)
            and isinstance(a.right, Forall)
            and a.left.binder == a.right.binder
        ):
            yield Axiom.P_DIST, Forall(a.left.binder, Conj(a.left.body, a.right.body))
    elif isinstance(a, Arrow):
        if isinstance(a.cod, Conj):
            yield Axiom.DIST, Conj(Arrow(a.dom, a.cod.left), Arrow(a.dom, a.cod.right))
        if isinstance(a.dom, Conj):
            yield Axiom.CURRY, Arrow(a.dom.left, Arrow(a.dom.right, a.cod))
        if isinstance(a.cod, Arrow):
            yield Axiom.CURRY, Arrow(Conj(a.dom, a.cod.dom), a.cod.cod)
        if isinstance(a.cod, Forall):
            yield Axiom.P_COMM, Forall(a.cod.binder, Arrow(a.dom, a.cod.body))
    elif isinstance(a, Forall):
        body = a.body
        if isinstance(body, Arrow) and a.binder not in free_type_vars(body.dom):
            yield Axiom.P_COMM, Arrow(body.dom, Forall(a.binder, body.cod))
        if isinstance(body, Conj):
            yield Axiom.P_DIST, Conj(Forall(a.binder, body.left), Forall(a.binder, body.right))


def _rewrites(a: Type) -> Iterator[tuple[Axiom, Type]]:
    yield from _at_root(a)
    if isinstance(a, Arrow):
        for axiom, dom in _rewrites(a.dom):
            yield axiom, Arrow(dom, a.cod)
        for axiom, cod in _rewrites(a.cod):
            yield axiom, Arrow(a.dom, cod)
    elif isinstance(a, Conj):
        for axiom, left in _rewrites(a.left):
            yield axiom, Conj(left, a.right)
        for axiom, right in _rewrites(a.right):
            yield axiom, Conj(a.left, right)
    elif isinstance(a, Forall):
        for axiom, body in _rewrites(a.body):
            yield axiom, Forall(a.binder, body)


def iso_neighbors(a: Type) -> list[Type]:
    """Types one axiom step away from ``a``, alpha-canonical and deduplicated."""

    root = _canonical(a)
    seen = {root}
    out = []
    for _, b in _rewrites(root):
        b = _canonical(b)
        if b not in seen:
            seen.add(b)
            out.append(b)
    return out


@dataclass
class OracleUniverse:
    axioms: tuple[Axiom, ...]
    budget: int
    visited: set[Type] = field(default_factory=set)
    exhausted: bool = True


def iso_closure(
    a: Type, budget: int = DEFAULT_ORACLE_BUDGET, *, target: Type | None = None
) -> OracleUniverse:
    """Every type reachable from ``a`` by axiom steps, up to ``budget`` types."""

    universe = OracleUniverse(tuple(Axiom), budget)
    start = _canonical(a)
    goal = None if target is None else _canonical(target)
    universe.visited.add(start)
    queue = deque([start])
    while queue:
        if goal is not None and goal in universe.visited:
            universe.exhausted = not queue
            return universe
        current = queue.popleft()
        for b in iso_neighbors(current):
            if b in universe.visited:
                continue
            if len(universe.visited) >= budget:
                universe.exhausted = False
                logger.warning("isomorphism closure stopped at budget %d", budget)
                return universe
            universe.visited.add(b)
            queue.append(b)
    return universe


@dataclass(frozen=True)
class OracleResult:
    related: bool
    exhausted: bool
    visited: int

    def __bool__(self) -> bool:
        return self.related


def iso_oracle(a: Type, b: Type, budget: int = DEFAULT_ORACLE_BUDGET) -> OracleResult:
    universe = iso_closure(a, budget, target=b)
    related = _canonical(b) in universe.visited
    return OracleResult(related, universe.exhausted, len(universe.visited))


# ---------------------------------------------------------------------------
# Pair classes


class PairShape(str, Enum):
    PAIR = "pair"
    LAMBDA = "lambda"
    APPLICATION = "application"
    TYPE_LAMBDA = "type-lambda"
    TYPE_APPLICATION = "type-application"
    VIOLATION = "violation"


@dataclass(frozen=True)
class ShapeVerdict:
    shape: PairShape
    case: str

    @property
    def ok(self) -> bool:
        return self.shape is not PairShape.VIOLATION


class _Classes:
    def __init__(self, budget: int) -> None:
        self.budget = budget
        self._cache: dict[str, EquivClass] = {}

    def of(self, r: Term) -> EquivClass:
        key = alpha_key(r)
        cls = self._cache.get(key)
        if cls is None:
            cls = equiv_class(r, self.budget)
            for member in cls.members:
                self._cache.setdefault(member, cls)
        return cls

    def related(self, r: Term, s: Term) -> bool:
        return alpha_key(s) in self.of(r).members

    def pairs_in(self, r: Term) -> list[Pair]:
        return [m for m in self.of(r).members.values() if isinstance(m, Pair)]


def _pair_case(t: Pair, r: Term, s: Term, classes: _Classes) -> str | None:
    u, v = t.left, t.right
    if alpha_key(t) == alpha_key(Pair(r, s)):
        return "identity"
    if classes.related(r, u) and classes.related(s, v):
        return "components"
    if classes.related(r, v) and classes.related(s, u):
        return "symmetric"
    # One component of t carries a piece of the other side.
    for outer, inner, whole, rest in ((u, v, r, s), (v, u, r, s), (u, v, s, r), (v, u, s, r)):
        for candidate in classes.pairs_in(inner):
            if classes.related(rest, candidate.right):
                if classes.related(whole, Pair(outer, candidate.left)):
                    return "regrouped"
    for left in classes.pairs_in(u):
        for right in classes.pairs_in(v):
            if classes.related(r, Pair(left.left, right.left)) and classes.related(
                s, Pair(left.right, right.right)
            ):
                return "split"
    return None


def _wrapped(
    classes: _Classes, inner: Term, r: Term, s: Term, wrap: Callable[[Term], Term]
) -> bool:
    return any(
        classes.related(r, wrap(pair.left)) and classes.related(s, wrap(pair.right))
        for pair in classes.pairs_in(inner)
    )


def pair_shape_classify(
    t: Term, r: Term, s: Term, budget: int = DEFAULT_BUDGET
) -> ShapeVerdict:
    """Which form ``t``, a member of the class of ``<r, s>``, takes."""

    classes = _Classes(budget)
    if isinstance(t, Pair):
        case = _pair_case(t, r, s, classes)
        if case is not None:
            return ShapeVerdict(PairShape.PAIR, case)
    elif isinstance(t, Lam):
        if _wrapped(classes, t.body, r, s, lambda a: Lam(t.name, t.ann, a)):
            return ShapeVerdict(PairShape.LAMBDA, "components")
    elif isinstance(t, App):
        if _wrapped(classes, t.fun, r, s, lambda a: App(a, t.arg)):
            return ShapeVerdict(PairShape.APPLICATION, "components")
    elif isinstance(t, TLam):
        if _wrapped(classes, t.body, r, s, lambda a: TLam(t.binder, a)):
            return ShapeVerdict(PairShape.TYPE_LAMBDA, "components")
    elif isinstance(t, TApp):
        if _wrapped(classes, t.fun, r, s, lambda a: TApp(a, t.at)):
            return ShapeVerdict(PairShape.TYPE_APPLICATION, "components")
    return ShapeVerdict(PairShape.VIOLATION, type(t).__name__.lower())
