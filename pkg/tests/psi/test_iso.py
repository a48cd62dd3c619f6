from __future__ import annotations

import random

import pytest

from src.psi.errors import EmptyConjunctionError
from src.psi.generator import random_type
from src.psi.iso import (
    arrow_residual,
    canonicalize,
    conj_residual,
    conjunction_of,
    factor_types,
    forall_strip,
    prime_factors,
    types_isomorphic,
)
from src.psi.syntax import Arrow, Conj, Forall, TVar, Type

from .builders import FULL_TERM_RUNS, ty


def _denotes(a: Type) -> list[Type]:
    return [p.denote() for p in prime_factors(a)]


def test_prime_factors_of_a_variable() -> None:
    primes = prime_factors(ty("X"))
    assert len(primes) == 1
    assert primes[0].prefix == () and primes[0].head == "X" and primes[0].arg is None


def test_prime_factors_uncurry_the_arguments() -> None:
    assert canonicalize(ty("X -> Y -> Z")) == canonicalize(ty("X /\\ Y -> Z"))
    (prime,) = prime_factors(ty("X -> Y -> Z"))
    assert types_isomorphic(prime.denote(), ty("X /\\ Y -> Z"))


def test_prime_factors_distribute_over_universal() -> None:
    primes = _denotes(ty("forall X. X -> Y /\\ Z"))
    assert len(primes) == 2
    expected = [ty("forall X. X -> Y"), ty("forall X. X -> Z")]
    for wanted in expected:
        assert sum(types_isomorphic(p, wanted) for p in primes) == 1


@pytest.mark.parametrize(
    ("left", "right"),
    [
        ("X /\\ Y", "Y /\\ X"),
        ("X /\\ (Y /\\ Z)", "(X /\\ Y) /\\ Z"),
        ("X -> Y /\\ Z", "(X -> Y) /\\ (X -> Z)"),
        ("X /\\ Y -> Z", "X -> Y -> Z"),
        ("forall X. Y -> X", "Y -> forall X. X"),
        ("forall X. Y /\\ Z", "(forall X. Y) /\\ (forall X. Z)"),
        ("forall X. X -> X", "forall Z. Z -> Z"),
        ("(X -> Y) /\\ X -> Y", "(X -> Y) -> X -> Y"),
        ("Y -> forall X. X -> Y", "forall X. X /\\ Y -> Y"),
    ],
)
def test_isomorphic_pairs(left: str, right: str) -> None:
    assert types_isomorphic(ty(left), ty(right))
    assert types_isomorphic(ty(right), ty(left))


@pytest.mark.parametrize(
    ("left", "right"),
    [
        ("X", "Y"),
        ("X -> Y", "Y -> X"),
        ("forall X. forall Y. X -> Y -> X", "forall Y. forall X. X -> Y -> X"),
        ("forall X. X -> Y", "X -> forall X. Y"),
        ("X /\\ X", "X"),
        ("forall X. Y", "Y"),
    ],
)
def test_non_isomorphic_pairs(left: str, right: str) -> None:
    assert not types_isomorphic(ty(left), ty(right))


def test_prime_factors_are_prime() -> None:
    for prime in prime_factors(ty("forall X. (X -> Y /\\ Z) /\\ (W -> forall V. V)")):
        assert len(prime_factors(prime.denote())) == 1


def test_factor_types_keep_source_names() -> None:
    assert factor_types(ty("X /\\ (Y -> Z)")) == [ty("X"), ty("Y -> Z")]


def test_conjunction_of_single_and_empty() -> None:
    assert conjunction_of([ty("X")]) == ty("X")
    assert types_isomorphic(conjunction_of([ty("X"), ty("Y")]), ty("X /\\ Y"))
    with pytest.raises(EmptyConjunctionError):
        conjunction_of([])


def test_empty_conjunction_is_a_value_error() -> None:
    with pytest.raises(ValueError):
        conjunction_of([])


def test_conjunction_of_prime_factors_round_trips() -> None:
    a = ty("forall X. X -> Y /\\ Z")
    assert types_isomorphic(conjunction_of(_denotes(a)), a)


def test_prime_factors_rebuild_random_types() -> None:
    rng = random.Random(7)
    for _ in range(200):
        a = random_type(rng, rng.randint(1, 10))
        assert types_isomorphic(conjunction_of(_denotes(a)), a)


@pytest.mark.slow
def test_prime_factors_rebuild_random_types_full() -> None:
    rng = random.Random(1)
    for _ in range(FULL_TERM_RUNS):
        a = random_type(rng, rng.randint(1, 10))
        assert types_isomorphic(conjunction_of(_denotes(a)), a)


def test_congruence_under_each_constructor() -> None:
    a, b, c = ty("X /\\ Y -> Z"), ty("X -> Y -> Z"), ty("W")
    contexts = [
        lambda t: Arrow(t, c),
        lambda t: Arrow(c, t),
        lambda t: Conj(t, c),
        lambda t: Conj(c, t),
        lambda t: Forall("X", t),
    ]
    for wrap in contexts:
        assert types_isomorphic(wrap(a), wrap(b))


# ---------------------------------------------------------------------------
# Residuals


def test_conj_residual_examples() -> None:
    assert types_isomorphic(conj_residual(ty("X /\\ Y"), ty("Y")), ty("X"))
    residual = conj_residual(ty("forall X. Y /\\ Z"), ty("forall X. Y"))
    assert residual is not None and types_isomorphic(residual, ty("forall X. Z"))
    assert conj_residual(ty("X"), ty("X")) is None
    assert conj_residual(ty("X /\\ Y"), ty("Z")) is None


def test_conj_residual_respects_multiplicity() -> None:
    assert types_isomorphic(conj_residual(ty("X /\\ X"), ty("X")), ty("X"))
    assert conj_residual(ty("X /\\ Y"), ty("X /\\ X")) is None


def test_arrow_residual_examples() -> None:
    assert types_isomorphic(arrow_residual(ty("X /\\ Y -> Z"), ty("X")), ty("Y -> Z"))
    residual = arrow_residual(ty("forall X. Y -> X"), ty("Y"))
    assert residual is not None and types_isomorphic(residual, ty("forall X. X"))
    assert arrow_residual(ty("X"), ty("Y")) is None
    assert arrow_residual(ty("X -> Y"), ty("Z")) is None


def test_arrow_residual_against_a_pair_of_arguments() -> None:
    t = ty("(X -> Y) -> X -> Y")
    residual = arrow_residual(t, ty("(X -> Y) /\\ X"))
    assert residual is not None and types_isomorphic(residual, ty("Y"))


def test_arrow_residual_avoids_capture_of_prefix() -> None:
    t = ty("forall X. X -> X")
    residual = arrow_residual(ty("forall Y. X -> Y"), TVar("X"))
    assert residual is not None and types_isomorphic(residual, ty("forall Y. Y"))
    assert arrow_residual(t, TVar("X")) is None


def test_forall_strip_examples() -> None:
    stripped = forall_strip(ty("forall X. X"))
    assert stripped is not None
    binder, body = stripped
    assert body == TVar(binder)

    stripped = forall_strip(ty("Y -> forall X. X"))
    assert stripped is not None
    binder, body = stripped
    assert types_isomorphic(body, Arrow(TVar("Y"), TVar(binder)))

    stripped = forall_strip(ty("(forall X. Y) /\\ (forall X. Z)"))
    assert stripped is not None
    assert types_isomorphic(stripped[1], ty("Y /\\ Z"))

    assert forall_strip(ty("X -> Y")) is None
    assert forall_strip(ty("(forall X. X) /\\ Y")) is None


@pytest.mark.parametrize("seed", range(20))
def test_residuals_are_sound_on_random_types(seed: int) -> None:
    rng = random.Random(seed)
    a, b = random_type(rng, rng.randint(1, 5)), random_type(rng, rng.randint(1, 5))
    residual = conj_residual(Conj(a, b), a)
    assert residual is not None and types_isomorphic(Conj(a, residual), Conj(a, b))
    residual = arrow_residual(Arrow(a, b), a)
    assert residual is not None and types_isomorphic(Arrow(a, residual), Arrow(a, b))
    stripped = forall_strip(Forall("X", b))
    assert stripped is not None
    assert types_isomorphic(Forall(stripped[0], stripped[1]), Forall("X", b))
