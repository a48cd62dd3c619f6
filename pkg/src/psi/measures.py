"""Termination measures on terms and reduction lengths."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .rewrite import DEFAULT_BUDGET, DEFAULT_MAX_STEPS, ReductionGraph
from .syntax import App, Lam, Pair, Proj, Term, TLam, Var


@dataclass(frozen=True, slots=True)
class MeasurePair:
    m: int
    p: int


@lru_cache(maxsize=1 << 16)
def measures(r: Term) -> MeasurePair:
    """Both measures in one pass.

    ``P`` counts pairs. ``M`` weighs every eliminator and binder by the pairs
    beneath it, and an application by the pairs its function may distribute.
    """

    if isinstance(r, Var):
        return MeasurePair(1, 0)
    if isinstance(r, App):
        fun, arg = measures(r.fun), measures(r.arg)
        return MeasurePair(fun.m + arg.m + fun.p * arg.m, fun.p)
    if isinstance(r, Pair):
        left, right = measures(r.left), measures(r.right)
        return MeasurePair(left.m + right.m, 1 + left.p + right.p)
    (sub,) = immediate_subterms(r)
    inner = measures(sub)
    return MeasurePair(1 + inner.m + inner.p, inner.p)


def measure_p(r: Term) -> int:
    return measures(r).p


def measure_m(r: Term) -> int:
    return measures(r).m


def immediate_subterms(r: Term) -> list[Term]:
    if isinstance(r, Var):
        return []
    if isinstance(r, (Lam, TLam)):
        return [r.body]
    if isinstance(r, App):
        return [r.fun, r.arg]
    if isinstance(r, Pair):
        return [r.left, r.right]
    if isinstance(r, Proj):
        return [r.of]
    return [r.fun]


def longest_reduction(
    r: Term, budget: int = DEFAULT_BUDGET, *, max_nodes: int = DEFAULT_MAX_STEPS
) -> int | None:
    """Length of the longest reduction from ``r``; ``None`` when exploration hit a budget."""

    graph = ReductionGraph(r, budget, max_nodes)
    if not graph.exhaustive:
        return None
    return graph.longest_path_length()
