from __future__ import annotations

from src.psi.rewrite import (
    EQUIVALENCE_RULES,
    REDUCTION_RULES,
    Equivalence,
    ReductionGraph,
    Rule,
    Strategy,
    equiv_class,
    equiv_neighbors,
    head_reduce,
    normalize,
    reduce_step,
    term_equiv,
    term_size,
)
from src.psi.syntax import alpha_equivalent, alpha_key

from .builders import APPLY, APPLY_CTX, apply_to_pair, project_tlam, tm, uncurried_apply


def _contains(terms, wanted) -> bool:
    return any(alpha_equivalent(t, wanted) for t in terms)


def test_rule_catalogue() -> None:
    assert len(EQUIVALENCE_RULES) == 11
    assert set(REDUCTION_RULES) == {Rule.BETA_LAM, Rule.BETA_TLAM, Rule.PI}
    assert Rule.PI.is_reduction and not Rule.COMM.is_reduction


def test_neighbors_of_a_pair() -> None:
    neighbors = equiv_neighbors(tm("<x, y>", "x : X, y : Y"))
    assert len(neighbors) == 1
    assert alpha_equivalent(neighbors[0], tm("<y, x>", "x : X, y : Y"))


def test_curry_neighbor() -> None:
    bindings = "f : S -> T -> U, s : S, t : T"
    assert _contains(equiv_neighbors(tm("f <s, t>", bindings)), tm("f s t", bindings))


def test_distribution_under_lambda() -> None:
    bindings = "u : Y, v : Z"
    neighbors = equiv_neighbors(tm("lam x : X. <u, v>", bindings))
    assert _contains(neighbors, tm("<lam x : X. u, lam x : X. v>", bindings))


def test_distribution_needs_alpha_equal_annotations() -> None:
    bindings = "u : Y, v : Z"
    neighbors = equiv_neighbors(tm("<lam x : X /\\ Y. u, lam x : Y /\\ X. v>", bindings))
    assert len(neighbors) == 1


def test_neighbors_apply_below_the_root() -> None:
    bindings = "f : X -> X, x : X, y : Y"
    neighbors = equiv_neighbors(tm("lam z : W. f (pi [X] <x, y>)", bindings))
    assert _contains(neighbors, tm("lam z : W. f (pi [X] <y, x>)", bindings))


def test_type_abstraction_does_not_commute_with_dependent_lambda() -> None:
    term = tm("tlam X. lam x : X. x")
    assert equiv_neighbors(term) == []


def test_class_sizes() -> None:
    assert len(equiv_class(tm("x", "x : X"))) == 1
    assert len(equiv_class(tm("<x, y>", "x : X, y : Y"))) == 2
    cls = equiv_class(tm("lam x : X. <y, z>", "y : Y, z : Z"))
    assert cls.frontier_exhausted
    assert len(cls) == 4


def test_class_of_a_triple() -> None:
    assert len(equiv_class(tm("<a, <b, c>>", "a : X, b : Y, c : Z"))) == 12


def test_class_budget_is_reported() -> None:
    cls = equiv_class(tm("<a, <b, c>>", "a : X, b : Y, c : Z"), budget=3)
    assert not cls.frontier_exhausted
    assert len(cls) == 3


def test_class_witness_chains_back_to_root() -> None:
    root = tm("<a, <b, c>>", "a : X, b : Y, c : Z")
    cls = equiv_class(root)
    for key in cls.members:
        chain = cls.witness(key)
        assert alpha_equivalent(chain[0], root)
        assert alpha_key(chain[-1]) == key
        assert len(cls.witness_rules(key)) == len(chain) - 1


def test_representative_is_smallest() -> None:
    cls = equiv_class(tm("lam x : X. <y, z>", "y : Y, z : Z"))
    assert term_size(cls.representative) == min(term_size(m) for m in cls.members.values())


def test_term_equiv_is_three_valued() -> None:
    bindings = "r : X, s : Y, f : X -> Y -> Z"
    assert term_equiv(tm("<r, s>", bindings), tm("<s, r>", bindings)) is Equivalence.TRUE
    assert term_equiv(tm("f <r, s>", bindings), tm("f r s", bindings)) is Equivalence.TRUE
    assert term_equiv(tm("x", "x : X"), tm("y", "y : X")) is Equivalence.FALSE
    triple = tm("<a, <b, c>>", "a : X, b : Y, c : Z")
    missing = tm("<c, <c, c>>", "c : Z")
    assert term_equiv(triple, missing, budget=2) is Equivalence.UNKNOWN


# ---------------------------------------------------------------------------
# Reduction


def test_beta_fires_when_argument_type_matches() -> None:
    bindings = "a : X, b : Y"
    steps = head_reduce(tm("(lam x : X /\\ Y. x) <a, b>", bindings))
    assert len(steps) == 1
    rule, reduct = steps[0]
    assert rule is Rule.BETA_LAM
    assert alpha_equivalent(reduct, tm("<a, b>", bindings))


def test_beta_fires_modulo_isomorphism() -> None:
    bindings = "a : X, b : Y"
    steps = head_reduce(tm("(lam x : Y /\\ X. x) <a, b>", bindings))
    assert [rule for rule, _ in steps] == [Rule.BETA_LAM]


def test_beta_does_not_fire_on_a_pair_of_arguments() -> None:
    bindings = "a : X, b : Y, u : Y -> Z"
    assert head_reduce(tm("(lam x : X. u) <a, b>", bindings)) == []


def test_projection_takes_the_left_component() -> None:
    bindings = "x1 : X, x2 : X"
    steps = head_reduce(tm("pi [X] <x1, x2>", bindings))
    assert len(steps) == 1
    assert steps[0][0] is Rule.PI
    assert alpha_equivalent(steps[0][1], tm("x1", bindings))


def test_reduce_step_is_nondeterministic_for_projection() -> None:
    bindings = "x1 : X, x2 : X"
    step_set = reduce_step(tm("pi [X] <x1, x2>", bindings))
    assert step_set.exhaustive
    reducts = step_set.reducts
    assert len(reducts) == 2
    assert _contains(reducts, tm("x1", bindings)) and _contains(reducts, tm("x2", bindings))


def test_reduce_step_witness_ends_at_the_redex() -> None:
    step_set = reduce_step(apply_to_pair())
    assert step_set.steps
    for step in step_set.steps:
        assert alpha_equivalent(step.witness[0], apply_to_pair())
        assert _contains([t for _, t in head_reduce(step.witness[-1])], step.target)


def test_normal_variable_has_no_reducts() -> None:
    term = tm("x", "x : X")
    assert reduce_step(term).steps == ()
    (trace,) = normalize(term)
    assert trace.steps == () and trace.result == term and trace.exhaustive


def test_apply_to_pair_reaches_application() -> None:
    (trace,) = normalize(apply_to_pair())
    assert alpha_equivalent(trace.result, tm("g r", APPLY_CTX))
    assert len(trace) <= 2
    assert all(step.rule is Rule.BETA_LAM for step in trace.steps)


def test_flipped_arguments_reach_application() -> None:
    traces = normalize(tm(f"({APPLY}) r g", APPLY_CTX), Strategy.EXHAUSTIVE)
    assert [alpha_key(t.result) for t in traces] == [alpha_key(tm("g r", APPLY_CTX))]


def test_uncurried_apply_normalizes() -> None:
    (trace,) = normalize(uncurried_apply())
    assert alpha_equivalent(trace.result, tm("g r", APPLY_CTX))
    assert [step.rule for step in trace.steps].count(Rule.PI) == 2


def test_type_application_of_projection_normalizes() -> None:
    term = tm("(pi [forall X. X -> X] (tlam X. <lam x : X. x, r>)) [A]", "r : A")
    traces = normalize(term, Strategy.EXHAUSTIVE)
    assert len(traces) == 1
    assert term_equiv(traces[0].result, tm("lam x : A. x")) is Equivalence.TRUE


def test_projection_through_type_abstraction_normalizes() -> None:
    traces = normalize(project_tlam(), Strategy.EXHAUSTIVE)
    assert len(traces) == 1
    assert term_equiv(traces[0].result, tm("tlam X. lam x : X. x")) is Equivalence.TRUE


def test_projection_over_equal_types_has_two_normal_forms() -> None:
    bindings = "x1 : X, x2 : X"
    traces = normalize(tm("pi [X] <x1, x2>", bindings), Strategy.EXHAUSTIVE)
    results = [t.result for t in traces]
    assert len(results) == 2
    assert _contains(results, tm("x1", bindings)) and _contains(results, tm("x2", bindings))


def test_determinized_projection_has_one_normal_form() -> None:
    bindings = "r : A, s : A, t : B"
    term = tm("pi [B -> A] <lam x : B. r, lam x : C. s> t", bindings)
    traces = normalize(term, Strategy.EXHAUSTIVE)
    assert [alpha_key(t.result) for t in traces] == [alpha_key(tm("r", bindings))]


def test_deterministic_strategy_is_reproducible() -> None:
    bindings = "x1 : X, x2 : X"
    first = normalize(tm("pi [X] <x1, x2>", bindings))
    second = normalize(tm("pi [X] <x1, x2>", bindings))
    assert alpha_key(first[0].result) == alpha_key(second[0].result)


def test_deterministic_step_bound() -> None:
    (trace,) = normalize(uncurried_apply(), max_steps=1)
    assert len(trace) == 1
    assert not trace.exhaustive
    assert not trace.normal


def test_exhaustive_budget_stop_keeps_a_partial_trace() -> None:
    (trace,) = normalize(uncurried_apply(), Strategy.EXHAUSTIVE, max_steps=1)
    assert not trace.exhaustive
    assert not trace.normal
    assert [step.rule for step in trace.steps] == [Rule.BETA_LAM]


def test_complete_runs_end_in_normal_forms() -> None:
    for strategy in Strategy:
        (trace,) = normalize(uncurried_apply(), strategy)
        assert trace.exhaustive and trace.normal


def test_reduction_graph_of_uncurried_apply() -> None:
    graph = ReductionGraph(uncurried_apply())
    assert graph.exhaustive
    assert graph.longest_path_length() == 3
    (normal,) = graph.normal_forms()
    assert alpha_equivalent(graph.term(normal), tm("g r", APPLY_CTX))
    assert len(graph.trace_to(normal)) >= 1
    assert graph.frontier() == []


def test_cut_off_graph_has_a_frontier() -> None:
    graph = ReductionGraph(uncurried_apply(), max_nodes=1)
    assert not graph.exhaustive
    assert graph.normal_forms() == []
    (leaf,) = graph.frontier()
    assert not graph.graph.nodes[leaf]["expanded"]
