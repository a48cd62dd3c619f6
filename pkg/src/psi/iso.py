"""Type isomorphism by prime-factor canonicalization, and the residuals used for typing.

Isomorphisms handled (both directions, under any context):

    A ∧ B ≡ B ∧ A                      A ∧ (B ∧ C) ≡ (A ∧ B) ∧ C
    A ⇒ (B ∧ C) ≡ (A ⇒ B) ∧ (A ⇒ C)    (A ∧ B) ⇒ C ≡ A ⇒ B ⇒ C
    ∀X.(A ⇒ B) ≡ A ⇒ ∀X.B  (X ∉ FTV(A))
    ∀X.(A ∧ B) ≡ ∀X.A ∧ ∀X.B

Quantifier order is significant; ``∀X.∀Y.A`` and ``∀Y.∀X.A`` are distinct.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import lru_cache

from .errors import EmptyConjunctionError
from .syntax import (
    CANONICAL_MARK,
    Arrow,
    Conj,
    Forall,
    TVar,
    Type,
    free_type_vars,
    fresh_name,
    subst_type_in_type,
)

HeadKey = tuple[int, int, str]


@dataclass(frozen=True, slots=True)
class Prime:
    """``∀prefix.(arg ⇒ head)``, or ``∀prefix.head`` when ``arg`` is absent.

    Bound names are canonical: ``@k`` is the binder at nesting level ``k``.
    """

    prefix: tuple[str, ...]
    head: str
    arg: CanonType | None

    @property
    def head_key(self) -> HeadKey:
        if self.head.startswith(CANONICAL_MARK):
            return (0, int(self.head[1:]), "")
        return (1, 0, self.head)

    @property
    def sort_key(self) -> tuple:
        arg_key: tuple = (0,) if self.arg is None else (1, self.arg.sort_key)
        return (len(self.prefix), self.head_key, arg_key)

    def denote(self) -> Type:
        body: Type = TVar(self.head)
        if self.arg is not None:
            body = Arrow(self.arg.denote(), body)
        for binder in reversed(self.prefix):
            body = Forall(binder, body)
        return body


@dataclass(frozen=True, slots=True)
class CanonType:
    primes: tuple[Prime, ...]

    @property
    def sort_key(self) -> tuple:
        return tuple(p.sort_key for p in self.primes)

    def denote(self) -> Type:
        return _right_nested([p.denote() for p in self.primes])


@dataclass(frozen=True, slots=True)
class _Factor:
    prefix: tuple[str, ...]
    head: str
    arg: Type | None

    def denote(self) -> Type:
        body: Type = TVar(self.head)
        if self.arg is not None:
            body = Arrow(self.arg, body)
        for binder in reversed(self.prefix):
            body = Forall(binder, body)
        return body

    def rename_binder(self, index: int, new: str) -> _Factor:
        old = self.prefix[index]
        prefix = self.prefix[:index] + (new,) + self.prefix[index + 1 :]
        if old in self.prefix[index + 1 :]:
            return _Factor(prefix, self.head, self.arg)
        head = new if self.head == old else self.head
        arg = None if self.arg is None else subst_type_in_type(self.arg, old, TVar(new))
        return _Factor(prefix, head, arg)

    def freshen(self, avoid: frozenset[str]) -> _Factor:
        factor = self
        for index, binder in enumerate(self.prefix):
            if binder in avoid:
                factor = factor.rename_binder(index, fresh_name(binder))
        return factor

    def strip(self) -> _Factor:
        return _Factor(self.prefix[1:], self.head, self.arg)


@lru_cache(maxsize=1 << 16)
def _factors(a: Type) -> tuple[_Factor, ...]:
    if isinstance(a, TVar):
        return (_Factor((), a.name, None),)
    if isinstance(a, Conj):
        return _factors(a.left) + _factors(a.right)
    if isinstance(a, Arrow):
        avoid = free_type_vars(a.dom)
        out = []
        for factor in _factors(a.cod):
            factor = factor.freshen(avoid)
            arg = a.dom if factor.arg is None else Conj(a.dom, factor.arg)
            out.append(_Factor(factor.prefix, factor.head, arg))
        return tuple(out)
    return tuple(_Factor((a.binder,) + f.prefix, f.head, f.arg) for f in _factors(a.body))


def _canon_factor(factor: _Factor, depth: int, env: dict[str, str]) -> Prime:
    scope = dict(env)
    prefix = []
    for offset, binder in enumerate(factor.prefix):
        name = f"{CANONICAL_MARK}{depth + offset}"
        scope[binder] = name
        prefix.append(name)
    head = scope.get(factor.head, factor.head)
    arg = None
    if factor.arg is not None:
        arg = _canon(factor.arg, depth + len(prefix), scope)
    return Prime(tuple(prefix), head, arg)


def _canon(a: Type, depth: int, env: dict[str, str]) -> CanonType:
    primes = [_canon_factor(f, depth, env) for f in _factors(a)]
    primes.sort(key=lambda p: p.sort_key)
    return CanonType(tuple(primes))


@lru_cache(maxsize=1 << 16)
def canonicalize(a: Type) -> CanonType:
    return _canon(a, 0, {})


def prime_factors(a: Type) -> list[Prime]:
    return list(canonicalize(a).primes)


def factor_types(a: Type) -> list[Type]:
    """The prime factors of ``a`` as ordinary types, keeping the source names."""

    return [f.denote() for f in _factors(a)]


def types_isomorphic(a: Type, b: Type) -> bool:
    return a == b or canonicalize(a) == canonicalize(b)


def _right_nested(types: Sequence[Type]) -> Type:
    if not types:
        raise EmptyConjunctionError("conjunction of an empty multiset")
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Conj(t, result)
    return result


def conjunction_of(types: Iterable[Type]) -> Type:
    members = sorted(types, key=lambda t: canonicalize(t).sort_key)
    return _right_nested(members)


def _split(pool: Iterable[_Factor], wanted: Iterable[_Factor]) -> list[_Factor] | None:
    """Removes ``wanted`` from ``pool`` modulo ≡; ``None`` when it does not embed."""

    missing = Counter(canonicalize(f.denote()) for f in wanted)
    remainder = []
    for factor in pool:
        key = canonicalize(factor.denote())
        if missing[key] > 0:
            missing[key] -= 1
        else:
            remainder.append(factor)
    if any(count > 0 for count in missing.values()):
        return None
    return remainder


def conj_residual(t: Type, a: Type) -> Type | None:
    """``B`` with ``t ≡ a ∧ B``, or ``None``."""

    remainder = _split(_factors(t), _factors(a))
    if not remainder:
        return None
    return conjunction_of(f.denote() for f in remainder)


def arrow_residual(t: Type, s: Type) -> Type | None:
    """``B`` with ``t ≡ s ⇒ B``, or ``None``."""

    avoid = free_type_vars(s)
    contributions: list[Type] = []
    for factor in _factors(t):
        if factor.arg is None:
            return None
        factor = factor.freshen(avoid)
        assert factor.arg is not None
        remainder = _split(_factors(factor.arg), _factors(s))
        if remainder is None:
            return None
        rest = None if not remainder else conjunction_of(f.denote() for f in remainder)
        contributions.append(_Factor(factor.prefix, factor.head, rest).denote())
    return conjunction_of(contributions)


def forall_strip(t: Type) -> tuple[str, Type] | None:
    """``(X, C)`` with ``t ≡ ∀X.C`` for a fresh ``X``, or ``None``."""

    factors = _factors(t)
    if any(not f.prefix for f in factors):
        return None
    binder = fresh_name(factors[0].prefix[0])
    body = conjunction_of(f.rename_binder(0, binder).strip().denote() for f in factors)
    return binder, body
