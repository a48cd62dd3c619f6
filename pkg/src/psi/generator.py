"""Random and exhaustive generation of types, and random well-typed terms."""

from __future__ import annotations

import random
from collections.abc import Sequence
from functools import lru_cache

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
    alpha_key,
    free_type_vars,
    subst_type_in_type,
)

FREE_TYPE_NAMES = ("X", "Y")
# Share of applications whose argument is passed as a pair of curried arguments.
APP_GROUPING_RATE = 0.3


def type_size(a: Type) -> int:
    if isinstance(a, TVar):
        return 1
    if isinstance(a, (Arrow, Conj)):
        left, right = (a.dom, a.cod) if isinstance(a, Arrow) else (a.left, a.right)
        return 1 + type_size(left) + type_size(right)
    return 1 + type_size(a.body)


def random_type(rng: random.Random, size: int, names: Sequence[str] = FREE_TYPE_NAMES) -> Type:
    """A type with exactly ``size`` constructors; binders are drawn from ``names``."""

    if size <= 1:
        return TVar(rng.choice(names))
    if size == 2:
        return Forall(rng.choice(names), random_type(rng, 1, names))
    kind = rng.choice(("arrow", "conj", "forall"))
    if kind == "forall":
        return Forall(rng.choice(names), random_type(rng, size - 1, names))
    split = rng.randint(1, size - 2)
    left = random_type(rng, split, names)
    right = random_type(rng, size - 1 - split, names)
    return Arrow(left, right) if kind == "arrow" else Conj(left, right)


@lru_cache(maxsize=None)
def _types_of_size(size: int, names: tuple[str, ...]) -> tuple[Type, ...]:
    if size == 1:
        return tuple(TVar(n) for n in names)
    out: list[Type] = [Forall(n, body) for n in names for body in _types_of_size(size - 1, names)]
    for split in range(1, size - 1):
        for left in _types_of_size(split, names):
            for right in _types_of_size(size - 1 - split, names):
                out.append(Arrow(left, right))
                out.append(Conj(left, right))
    return tuple(out)


def enumerate_types(max_size: int, names: Sequence[str] = FREE_TYPE_NAMES) -> list[Type]:
    """Every type with at most ``max_size`` constructors, binders drawn from ``names``."""

    found: list[Type] = []
    for size in range(1, max_size + 1):
        found.extend(_types_of_size(size, tuple(names)))
    return found


class _TermGenerator:
    """Builds a term for a goal type by running the typing rules backwards."""

    def __init__(self, rng: random.Random) -> None:
        self.rng = rng
        self.free: dict[str, Type] = {}
        self._free_by_type: dict[str, str] = {}
        self._counter = 0

    def _name(self, prefix: str) -> str:
        self._counter += 1
        return f"{prefix}{self._counter}"

    def small_type(self) -> Type:
        return random_type(self.rng, self.rng.randint(1, 3))

    def leaf(self, goal: Type, scope: dict[str, Type], bound: list[str]) -> Term:
        matches = [n for n, t in scope.items() if alpha_key(t) == alpha_key(goal)]
        if matches and self.rng.random() < 0.8:
            name = self.rng.choice(sorted(matches))
            return Var(name, scope[name])
        captured = [t for t in bound if t in free_type_vars(goal)]
        ann = goal
        generalized = [self._name("S") for _ in captured]
        for tvar, fresh in zip(captured, generalized):
            ann = subst_type_in_type(ann, tvar, TVar(fresh))
        for fresh in reversed(generalized):
            ann = Forall(fresh, ann)
        key = alpha_key(ann)
        name = self._free_by_type.get(key)
        if name is None:
            name = self._name("a")
            self._free_by_type[key] = name
            self.free[name] = ann
        term: Term = Var(name, self.free[name])
        for tvar in captured:
            term = TApp(term, TVar(tvar))
        return term

    def _split(self, size: int) -> tuple[int, int]:
        left = self.rng.randint(1, size - 1)
        return left, size - left

    def build(self, goal: Type, size: int, scope: dict[str, Type], bound: list[str]) -> Term:
        if size <= 1:
            return self.leaf(goal, scope, bound)
        moves = ["proj", "tapp"]
        if isinstance(goal, Arrow):
            moves += ["lam", "lam"]
        if isinstance(goal, Conj) and size >= 3:
            moves += ["pair", "pair"]
        if isinstance(goal, Forall):
            moves += ["tlam", "tlam"]
        if size >= 3:
            moves.append("app")
        if size >= 4:
            moves.append("beta")
        move = self.rng.choice(moves)

        if move == "lam" and isinstance(goal, Arrow):
            name = self._name("x")
            body = self.build(goal.cod, size - 1, {**scope, name: goal.dom}, bound)
            return Lam(name, goal.dom, body)
        if move == "pair" and isinstance(goal, Conj):
            left, right = self._split(size - 1)
            return Pair(
                self.build(goal.left, left, scope, bound),
                self.build(goal.right, right, scope, bound),
            )
        if move == "tlam" and isinstance(goal, Forall):
            binder = self._name("T")
            body_goal = subst_type_in_type(goal.body, goal.binder, TVar(binder))
            return TLam(binder, self.build(body_goal, size - 1, scope, bound + [binder]))
        if move == "proj":
            other = self.small_type()
            inner = Conj(goal, other) if self.rng.random() < 0.5 else Conj(other, goal)
            return Proj(goal, self.build(inner, size - 1, scope, bound))
        if move == "tapp":
            candidates = sorted(free_type_vars(goal))
            binder = self._name("S")
            at: Type
            if candidates:
                abstracted = self.rng.choice(candidates)
                at, body = TVar(abstracted), subst_type_in_type(goal, abstracted, TVar(binder))
            else:
                at, body = self.small_type(), goal
            return TApp(self.build(Forall(binder, body), size - 1, scope, bound), at)
        if move == "beta":
            arg_ty = self.small_type()
            name = self._name("x")
            body_size, arg_size = self._split(size - 2)
            body = self.build(goal, body_size, {**scope, name: arg_ty}, bound)
            return App(Lam(name, arg_ty, body), self.build(arg_ty, arg_size, scope, bound))
        # application
        if size >= 5 and self.rng.random() < APP_GROUPING_RATE:
            first, second = self.small_type(), self.small_type()
            fun_size, rest = self._split(size - 2)
            if rest < 2:
                fun_size, rest = fun_size - 1, rest + 1
            a_size, b_size = self._split(rest)
            fun = self.build(Arrow(first, Arrow(second, goal)), fun_size, scope, bound)
            a = self.build(first, a_size, scope, bound)
            b = self.build(second, b_size, scope, bound)
            arg = Pair(a, b) if self.rng.random() < 0.5 else Pair(b, a)
            return App(fun, arg)
        arg_ty = self.small_type()
        fun_size, arg_size = self._split(size - 1)
        fun = self.build(Arrow(arg_ty, goal), fun_size, scope, bound)
        return App(fun, self.build(arg_ty, arg_size, scope, bound))


def gen_term_of_type(goal: Type, size: int, seed: int) -> tuple[dict[str, Type], Term]:
    """A term of roughly ``size`` nodes whose type is isomorphic to ``goal``, with its
    free-variable context."""

    if size < 1:
        raise ValueError("size must be at least 1")
    generator = _TermGenerator(random.Random(seed))
    term = generator.build(goal, size, {}, [])
    return dict(generator.free), term


def gen_typed_term(size: int, seed: int) -> tuple[dict[str, Type], Term]:
    """A well-typed term of roughly ``size`` nodes and its free-variable context.

    Deterministic in ``(size, seed)``.
    """

    if size < 1:
        raise ValueError("size must be at least 1")
    rng = random.Random(seed)
    generator = _TermGenerator(rng)
    goal = generator.small_type()
    term = generator.build(goal, size, {}, [])
    return dict(generator.free), term
