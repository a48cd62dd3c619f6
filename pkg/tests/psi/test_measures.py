from __future__ import annotations

import pytest

from src.psi.generator import gen_typed_term
from src.psi.measures import (
    MeasurePair,
    immediate_subterms,
    longest_reduction,
    measure_m,
    measure_p,
    measures,
)
from src.psi.rewrite import equiv_class
from src.psi.syntax import Term

from .builders import FULL_TERM_RUNS, SMALL_TERM_RUNS, TERM_SIZE, tm, uncurried_apply


@pytest.mark.parametrize(
    ("term", "bindings", "m", "p"),
    [
        ("x", "x : X", 1, 0),
        ("<x, y>", "x : X, y : Y", 2, 1),
        ("lam x : X. <y, z>", "y : Y, z : Z", 4, 1),
        ("<lam x : X. y, lam x : X. z>", "y : Y, z : Z", 4, 1),
        ("f <s, t>", "f : S -> T -> U, s : S, t : T", 3, 0),
        ("f s t", "f : S -> T -> U, s : S, t : T", 3, 0),
    ],
)
def test_measure_values(term: str, bindings: str, m: int, p: int) -> None:
    assert measures(tm(term, bindings)) == MeasurePair(m, p)


def test_projections_of_a_pair_pay_for_its_pairs() -> None:
    r = tm("pi [X] <x, y>", "x : X, y : Y")
    assert measure_p(r) == 1
    assert measure_m(r) == 1 + 2 + 1


def test_application_of_a_pair_weighs_the_argument() -> None:
    r = tm("<f, g> a", "f : A -> B, g : A -> C, a : A")
    assert measure_m(r) == 2 + 1 + 1 * 1
    assert measure_m(tm("<f a, g a>", "f : A -> B, g : A -> C, a : A")) == measure_m(r)


def _assert_subterms_decrease(r: Term) -> None:
    for sub in immediate_subterms(r):
        assert measure_m(r) > measure_m(sub), (r, sub)
        _assert_subterms_decrease(sub)


def _assert_invariant_on_class(r: Term) -> None:
    expected = measures(r)
    cls = equiv_class(r, budget=500)
    for member in cls.members.values():
        assert measures(member) == expected, (r, member)


def test_measures_are_invariant_on_a_class() -> None:
    _assert_invariant_on_class(tm("lam x : X. <y, <z, w>>", "y : Y, z : Z, w : W"))
    _assert_invariant_on_class(
        tm("<f, g> <a, b>", "f : A -> B -> C, g : A -> B -> D, a : A, b : B")
    )
    _assert_invariant_on_class(
        tm("(pi [forall X. X -> X] (tlam X. <lam x : X. x, r>)) [A]", "r : A")
    )


@pytest.mark.parametrize("seed", range(SMALL_TERM_RUNS))
def test_generated_terms_keep_measures(seed: int) -> None:
    _, r = gen_typed_term(6, seed)
    _assert_invariant_on_class(r)
    _assert_subterms_decrease(r)


def test_longest_reduction_examples() -> None:
    assert longest_reduction(tm("x", "x : X")) == 0
    assert longest_reduction(tm("(lam x : X. x) y", "y : X")) == 1
    assert longest_reduction(uncurried_apply()) == 3


def test_longest_reduction_is_unknown_at_budget() -> None:
    assert longest_reduction(uncurried_apply(), max_nodes=1) is None


@pytest.mark.slow
def test_generated_terms_keep_measures_full() -> None:
    for seed in range(FULL_TERM_RUNS):
        _, r = gen_typed_term(TERM_SIZE, seed)
        _assert_invariant_on_class(r)
        _assert_subterms_decrease(r)
