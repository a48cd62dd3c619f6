from __future__ import annotations

import pytest

from src.psi.generator import gen_typed_term
from src.psi.rewrite import ReductionGraph, equiv_class, reduce_step
from src.psi.syntax import Pair, Term, alpha_key, free_term_names, rename_term_var

from .builders import apply_to_pair, tm


def _apart(s: Term) -> Term:
    for name in sorted(free_term_names(s)):
        s = rename_term_var(s, name, f"{name}_r")
    return s


def _class_keys(terms: list[Term]) -> set[str] | None:
    """Every term equivalent to one of ``terms``; ``None`` if a class was cut off."""

    keys: set[str] = set()
    for t in terms:
        cls = equiv_class(t)
        if not cls.frontier_exhausted:
            return None
        keys.update(cls.members)
    return keys


def _components_explain_reducts(r1: Term, r2: Term) -> bool | None:
    """Whether each reduct of ``<r1, r2>`` is equivalent to a pair of component reducts or
    equivalents, one side at least reduced. ``None`` when a class was cut off."""

    same1, same2 = _class_keys([r1]), _class_keys([r2])
    reduced1 = _class_keys(reduce_step(r1).reducts)
    reduced2 = _class_keys(reduce_step(r2).reducts)
    if same1 is None or same2 is None or reduced1 is None or reduced2 is None:
        return None
    for t in reduce_step(Pair(r1, r2)).reducts:
        cls = equiv_class(t)
        if not cls.frontier_exhausted:
            return None
        explained = False
        for member in cls.members.values():
            if not isinstance(member, Pair):
                continue
            u1, u2 = alpha_key(member.left), alpha_key(member.right)
            left_reduced, right_reduced = u1 in reduced1, u2 in reduced2
            if (
                (left_reduced or u1 in same1)
                and (right_reduced or u2 in same2)
                and (left_reduced or right_reduced)
            ):
                explained = True
                break
        if not explained:
            return False
    return True


@pytest.mark.parametrize(
    ("left", "right", "bindings"),
    [
        ("(lam x : X. x) y", "pi [Y] <z, w>", "y : X, z : Y, w : Z"),
        ("lam x : A. (lam y : A. y) x", "lam x : A. c", "c : B"),
        ("pi [X] <x1, x2>", "pi [X] <x3, x4>", "x1 : X, x2 : X, x3 : X, x4 : X"),
    ],
)
def test_pair_reducts_come_from_components(left: str, right: str, bindings: str) -> None:
    assert _components_explain_reducts(tm(left, bindings), tm(right, bindings)) is True


def test_pair_reducts_with_curried_component() -> None:
    assert _components_explain_reducts(apply_to_pair(), tm("k", "k : X")) is True


@pytest.mark.parametrize("seed", range(10))
def test_generated_pair_reducts_come_from_components(seed: int) -> None:
    _, r1 = gen_typed_term(4, seed)
    _, r2 = gen_typed_term(4, seed + 1_000)
    assert _components_explain_reducts(r1, _apart(r2)) is not False


def test_pair_of_nondeterministic_components() -> None:
    bindings = "x1 : X, x2 : X, y1 : Y, y2 : Y"
    graph = ReductionGraph(tm("<pi [X] <x1, x2>, pi [Y] <y1, y2>>", bindings))
    assert graph.exhaustive
    assert len(graph.normal_forms()) == 4
    assert graph.longest_path_length() == 2


@pytest.mark.parametrize("seed", range(10))
def test_pairs_of_normalizing_terms_normalize(seed: int) -> None:
    _, r1 = gen_typed_term(4, seed)
    _, r2 = gen_typed_term(4, seed + 1_000)
    r2 = _apart(r2)
    left = ReductionGraph(r1, max_nodes=200)
    right = ReductionGraph(r2, max_nodes=200)
    assert left.exhaustive and right.exhaustive
    pair = ReductionGraph(Pair(r1, r2))
    assert pair.exhaustive
    assert pair.normal_forms()
    assert pair.longest_path_length() <= left.longest_path_length() + right.longest_path_length()