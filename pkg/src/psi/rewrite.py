"""Structural equivalence, type-guarded reduction, and reduction modulo equivalence.

Equivalence schemas (applied in both directions, at any position)::

    COMM               <r, s>                  <=> <s, r>
    ASSO               <r, <s, t>>             <=> <<r, s>, t>
    DIST_lam           lam x:A. <r, s>         <=> <lam x:A. r, lam x:A. s>
    DIST_app           <r, s> t                <=> <r t, s t>
    CURRY              r <s, t>                <=> r s t
    P-COMM_tlam_lam    tlam X. lam x:A. r      <=> lam x:A. tlam X. r        X not in FTV(A)
    P-COMM_tapp_lam    (lam x:A. r) [B]        <=> lam x:A. r [B]
    P-DIST_tlam_pair   tlam X. <r, s>          <=> <tlam X. r, tlam X. s>
    P-DIST_tapp_pair   <r, s> [A]              <=> <r [A], s [A]>
    P-DIST_proj_tlam   pi [forall X. A] (tlam X. r) <=> tlam X. pi [A] r
    P-DIST_tapp_proj   (pi [forall X. B] r) [A] <=> pi [[X:=A]B] (r [A])  r : forall X. B /\\ C

Reductions::

    beta_lam   (lam x:A. r) s      ->  [x:=s]r     s : A (modulo isomorphism)
    beta_tlam  (tlam X. r) [A]     ->  [X:=A]r
    pi         pi [A] <r, s>       ->  r           r : A (modulo isomorphism)
"""

from __future__ import annotations

import logging
from collections import Counter, deque
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from enum import Enum

import networkx as nx

from .checker import type_of
from .errors import InvariantViolation
from .iso import (
    canonicalize,
    conj_residual,
    conjunction_of,
    factor_types,
    forall_strip,
    types_isomorphic,
)
from .syntax import (
    App,
    Forall,
    Lam,
    Pair,
    Proj,
    Term,
    TLam,
    TApp,
    TVar,
    Var,
    alpha_equivalent,
    alpha_key,
    free_type_vars,
    fresh_name,
    names_in,
    rename_term_var,
    subst_term,
    subst_type_in_term,
    subst_type_in_type,
)

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10_000
DEFAULT_MAX_STEPS = 1_000


class Rule(str, Enum):
    COMM = "COMM"
    ASSO = "ASSO"
    DIST_LAM = "DIST_lam"
    DIST_APP = "DIST_app"
    CURRY = "CURRY"
    P_COMM_TLAM = "P-COMM_tlam_lam"
    P_COMM_TAPP = "P-COMM_tapp_lam"
    P_DIST_TLAM_PAIR = "P-DIST_tlam_pair"
    P_DIST_TAPP_PAIR = "P-DIST_tapp_pair"
    P_DIST_PROJ_TLAM = "P-DIST_proj_tlam"
    P_DIST_TAPP_PROJ = "P-DIST_tapp_proj"
    BETA_LAM = "beta_lam"
    BETA_TLAM = "beta_tlam"
    PI = "pi"

    @property
    def is_reduction(self) -> bool:
        return self in (Rule.BETA_LAM, Rule.BETA_TLAM, Rule.PI)


EQUIVALENCE_RULES = tuple(rule for rule in Rule if not rule.is_reduction)
REDUCTION_RULES = tuple(rule for rule in Rule if rule.is_reduction)

Step = tuple[Rule, Term]


def term_size(r: Term) -> int:
    if isinstance(r, Var):
        return 1
    if isinstance(r, (Lam, TLam)):
        return 1 + term_size(r.body)
    if isinstance(r, App):
        return 1 + term_size(r.fun) + term_size(r.arg)
    if isinstance(r, Pair):
        return 1 + term_size(r.left) + term_size(r.right)
    if isinstance(r, Proj):
        return 1 + term_size(r.of)
    return 1 + term_size(r.fun)


def order_key(r: Term) -> tuple[int, str]:
    """Total order on terms modulo alpha: smaller terms first, then by digest."""

    return (term_size(r), alpha_key(r))


# ---------------------------------------------------------------------------
# Binder alignment helpers


def _merge_lams(left: Lam, right: Lam) -> tuple[str, Term, Term]:
    """Common binder for two abstractions with alpha-equal annotations."""

    if left.name == right.name:
        return left.name, left.body, right.body
    if left.name not in names_in(right.body):
        return left.name, left.body, rename_term_var(right.body, right.name, left.name)
    name = fresh_name(left.name)
    return (
        name,
        rename_term_var(left.body, left.name, name),
        rename_term_var(right.body, right.name, name),
    )


def _merge_tlams(left: TLam, right: TLam) -> tuple[str, Term, Term]:
    if left.binder == right.binder:
        return left.binder, left.body, right.body
    if left.binder not in free_type_vars(right):
        return (
            left.binder,
            left.body,
            subst_type_in_term(right.body, right.binder, TVar(left.binder)),
        )
    binder = fresh_name(left.binder)
    return (
        binder,
        subst_type_in_term(left.body, left.binder, TVar(binder)),
        subst_type_in_term(right.body, right.binder, TVar(binder)),
    )


# ---------------------------------------------------------------------------
# Root equivalences


def _p_dist_tapp_proj_forward(r: Term) -> Term | None:
    if not (isinstance(r, TApp) and isinstance(r.fun, Proj) and isinstance(r.fun.at, Forall)):
        return None
    index, inner = r.fun.at, r.fun.of
    inner_ty = type_of(inner)
    if inner_ty is None:
        return None
    stripped = forall_strip(inner_ty)
    if stripped is None:
        return None
    binder, body = stripped
    component = subst_type_in_type(index.body, index.binder, TVar(binder))
    if conj_residual(body, component) is None:
        return None
    return Proj(subst_type_in_type(index.body, index.binder, r.at), TApp(inner, r.at))


def _covers(
    pieces: list[Counter], wanted: Counter, start: int, chosen: tuple[int, ...]
) -> Iterator[tuple[int, ...]]:
    if not wanted:
        yield chosen
        return
    for i in range(start, len(pieces)):
        piece = pieces[i]
        if all(wanted[k] >= n for k, n in piece.items()):
            yield from _covers(pieces, wanted - piece, i + 1, chosen + (i,))


def _p_dist_tapp_proj_backward(r: Term) -> list[Term]:
    if not (isinstance(r, Proj) and isinstance(r.of, TApp)):
        return []
    inner, at = r.of.fun, r.of.at
    inner_ty = type_of(inner)
    if inner_ty is None:
        return []
    stripped = forall_strip(inner_ty)
    if stripped is None:
        return []
    binder, body = stripped
    factors = factor_types(body)
    if len(factors) < 2:
        return []
    pieces = [
        Counter(p for p in canonicalize(subst_type_in_type(f, binder, at)).primes)
        for f in factors
    ]
    wanted = Counter(canonicalize(r.at).primes)
    results: list[Term] = []
    seen: set[str] = set()
    for chosen in _covers(pieces, wanted, 0, ()):
        if not chosen or len(chosen) == len(factors):
            continue
        index = Forall(binder, conjunction_of(factors[i] for i in chosen))
        result = TApp(Proj(index, inner), at)
        key = alpha_key(result)
        if key not in seen:
            seen.add(key)
            results.append(result)
    return results


_same = alpha_equivalent


def equiv_steps_at_root(r: Term) -> list[Step]:
    out: list[Step] = []
    if isinstance(r, Pair):
        left, right = r.left, r.right
        out.append((Rule.COMM, Pair(right, left)))
        if isinstance(right, Pair):
            out.append((Rule.ASSO, Pair(Pair(left, right.left), right.right)))
        if isinstance(left, Pair):
            out.append((Rule.ASSO, Pair(left.left, Pair(left.right, right))))
        if isinstance(left, Lam) and isinstance(right, Lam) and _same(left.ann, right.ann):
            name, lbody, rbody = _merge_lams(left, right)
            out.append((Rule.DIST_LAM, Lam(name, left.ann, Pair(lbody, rbody))))
        if isinstance(left, App) and isinstance(right, App) and _same(left.arg, right.arg):
            out.append((Rule.DIST_APP, App(Pair(left.fun, right.fun), left.arg)))
        if isinstance(left, TLam) and isinstance(right, TLam):
            binder, lbody, rbody = _merge_tlams(left, right)
            out.append((Rule.P_DIST_TLAM_PAIR, TLam(binder, Pair(lbody, rbody))))
        if isinstance(left, TApp) and isinstance(right, TApp) and _same(left.at, right.at):
            out.append((Rule.P_DIST_TAPP_PAIR, TApp(Pair(left.fun, right.fun), left.at)))

    elif isinstance(r, Lam):
        body = r.body
        if isinstance(body, Pair):
            out.append(
                (Rule.DIST_LAM, Pair(Lam(r.name, r.ann, body.left), Lam(r.name, r.ann, body.right)))
            )
        if isinstance(body, TLam) and body.binder not in free_type_vars(r.ann):
            out.append((Rule.P_COMM_TLAM, TLam(body.binder, Lam(r.name, r.ann, body.body))))
        if isinstance(body, TApp):
            out.append((Rule.P_COMM_TAPP, TApp(Lam(r.name, r.ann, body.fun), body.at)))

    elif isinstance(r, App):
        fun, arg = r.fun, r.arg
        if isinstance(fun, Pair):
            out.append((Rule.DIST_APP, Pair(App(fun.left, arg), App(fun.right, arg))))
        if isinstance(arg, Pair):
            out.append((Rule.CURRY, App(App(fun, arg.left), arg.right)))
        if isinstance(fun, App):
            out.append((Rule.CURRY, App(fun.fun, Pair(fun.arg, arg))))

    elif isinstance(r, TLam):
        body = r.body
        if isinstance(body, Lam) and r.binder not in free_type_vars(body.ann):
            out.append((Rule.P_COMM_TLAM, Lam(body.name, body.ann, TLam(r.binder, body.body))))
        if isinstance(body, Pair):
            out.append(
                (Rule.P_DIST_TLAM_PAIR, Pair(TLam(r.binder, body.left), TLam(r.binder, body.right)))
            )
        if isinstance(body, Proj):
            out.append(
                (
                    Rule.P_DIST_PROJ_TLAM,
                    Proj(Forall(r.binder, body.at), TLam(r.binder, body.of)),
                )
            )

    elif isinstance(r, TApp):
        fun = r.fun
        if isinstance(fun, Lam):
            out.append((Rule.P_COMM_TAPP, Lam(fun.name, fun.ann, TApp(fun.body, r.at))))
        if isinstance(fun, Pair):
            out.append((Rule.P_DIST_TAPP_PAIR, Pair(TApp(fun.left, r.at), TApp(fun.right, r.at))))
        forward = _p_dist_tapp_proj_forward(r)
        if forward is not None:
            out.append((Rule.P_DIST_TAPP_PROJ, forward))

    elif isinstance(r, Proj):
        if isinstance(r.at, Forall) and isinstance(r.of, TLam):
            out.append((Rule.P_DIST_PROJ_TLAM, _push_proj_under_tlam(r.at, r.of)))
        for result in _p_dist_tapp_proj_backward(r):
            out.append((Rule.P_DIST_TAPP_PROJ, result))
    return out


def _push_proj_under_tlam(index: Forall, r: TLam) -> Term:
    if index.binder == r.binder:
        return TLam(r.binder, Proj(index.body, r.body))
    if r.binder not in free_type_vars(index):
        renamed = subst_type_in_type(index.body, index.binder, TVar(r.binder))
        return TLam(r.binder, Proj(renamed, r.body))
    binder = index.binder if index.binder not in free_type_vars(r) else fresh_name(r.binder)
    return TLam(
        binder,
        Proj(
            subst_type_in_type(index.body, index.binder, TVar(binder)),
            subst_type_in_term(r.body, r.binder, TVar(binder)),
        ),
    )


# ---------------------------------------------------------------------------
# Congruence


def _everywhere(r: Term, local: Callable[[Term], list[Step]]) -> Iterator[Step]:
    yield from local(r)
    if isinstance(r, Lam):
        for rule, body in _everywhere(r.body, local):
            yield rule, Lam(r.name, r.ann, body)
    elif isinstance(r, App):
        for rule, fun in _everywhere(r.fun, local):
            yield rule, App(fun, r.arg)
        for rule, arg in _everywhere(r.arg, local):
            yield rule, App(r.fun, arg)
    elif isinstance(r, Pair):
        for rule, left in _everywhere(r.left, local):
            yield rule, Pair(left, r.right)
        for rule, right in _everywhere(r.right, local):
            yield rule, Pair(r.left, right)
    elif isinstance(r, Proj):
        for rule, of in _everywhere(r.of, local):
            yield rule, Proj(r.at, of)
    elif isinstance(r, TLam):
        for rule, body in _everywhere(r.body, local):
            yield rule, TLam(r.binder, body)
    elif isinstance(r, TApp):
        for rule, fun in _everywhere(r.fun, local):
            yield rule, TApp(fun, r.at)


def _dedup(steps: Iterator[Step], exclude: str | None = None) -> list[Step]:
    seen: set[str] = set() if exclude is None else {exclude}
    out = []
    for rule, result in steps:
        key = alpha_key(result)
        if key not in seen:
            seen.add(key)
            out.append((rule, result))
    return out


def equiv_steps(r: Term) -> list[Step]:
    """One-step equivalences of ``r`` with the rule used, deduplicated modulo alpha."""

    return _dedup(_everywhere(r, equiv_steps_at_root), exclude=alpha_key(r))


def equiv_neighbors(r: Term) -> list[Term]:
    return [result for _, result in equiv_steps(r)]


# ---------------------------------------------------------------------------
# Equivalence classes


@dataclass
class EquivClass:
    root: Term
    members: dict[str, Term]
    frontier_exhausted: bool
    budget_used: int
    links: dict[str, tuple[str, Rule]] = field(default_factory=dict)

    def __contains__(self, r: Term) -> bool:
        return alpha_key(r) in self.members

    def __len__(self) -> int:
        return len(self.members)

    @property
    def representative(self) -> Term:
        return min(self.members.values(), key=order_key)

    def witness(self, key: str) -> list[Term]:
        """Terms chaining the root to the member ``key``, both ends included."""

        chain = [self.members[key]]
        while key in self.links:
            key = self.links[key][0]
            chain.append(self.members[key])
        chain.reverse()
        return chain

    def witness_rules(self, key: str) -> list[Rule]:
        rules = []
        while key in self.links:
            key, rule = self.links[key]
            rules.append(rule)
        rules.reverse()
        return rules


def equiv_class(r: Term, budget: int = DEFAULT_BUDGET, *, target: str | None = None) -> EquivClass:
    """Breadth-first closure of ``r`` under one-step equivalence.

    Exploration stops once ``budget`` members are known, or as soon as the
    member with key ``target`` is found.
    """

    root_key = alpha_key(r)
    members = {root_key: r}
    links: dict[str, tuple[str, Rule]] = {}
    queue = deque([root_key])
    exhausted = True
    while queue:
        if target is not None and target in members:
            exhausted = not queue
            break
        key = queue.popleft()
        for rule, neighbor in equiv_steps(members[key]):
            n_key = alpha_key(neighbor)
            if n_key in members:
                continue
            if len(members) >= budget:
                exhausted = False
                queue.clear()
                break
            members[n_key] = neighbor
            links[n_key] = (key, rule)
            queue.append(n_key)
    if not exhausted and (target is None or target not in members):
        logger.warning("equivalence class stopped at budget %d", budget)
    logger.debug("equivalence class of size %d (closed=%s)", len(members), exhausted)
    return EquivClass(r, members, exhausted, len(members), links)


class Equivalence(str, Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


def term_equiv(r: Term, s: Term, budget: int = DEFAULT_BUDGET) -> Equivalence:
    target = alpha_key(s)
    cls = equiv_class(r, budget, target=target)
    if target in cls.members:
        return Equivalence.TRUE
    return Equivalence.FALSE if cls.frontier_exhausted else Equivalence.UNKNOWN


# ---------------------------------------------------------------------------
# Reduction


def head_steps_at_root(r: Term) -> list[Step]:
    if isinstance(r, App) and isinstance(r.fun, Lam):
        arg_ty = type_of(r.arg)
        if arg_ty is not None and types_isomorphic(arg_ty, r.fun.ann):
            return [(Rule.BETA_LAM, subst_term(r.fun.body, r.fun.name, r.arg))]
    elif isinstance(r, TApp) and isinstance(r.fun, TLam):
        return [(Rule.BETA_TLAM, subst_type_in_term(r.fun.body, r.fun.binder, r.at))]
    elif isinstance(r, Proj) and isinstance(r.of, Pair):
        left_ty = type_of(r.of.left)
        if left_ty is not None and types_isomorphic(left_ty, r.at):
            return [(Rule.PI, r.of.left)]
    return []


def head_reduce(r: Term) -> list[Step]:
    """Every one-step type-guarded reduct of ``r``, at any position."""

    return _dedup(_everywhere(r, head_steps_at_root))


@dataclass(frozen=True)
class ReductionStep:
    source: Term
    witness: tuple[Term, ...]
    rule: Rule
    target: Term


@dataclass(frozen=True)
class StepSet:
    source: Term
    steps: tuple[ReductionStep, ...]
    exhaustive: bool
    class_size: int

    @property
    def reducts(self) -> list[Term]:
        return [step.target for step in self.steps]


def _steps_of_class(cls: EquivClass) -> StepSet:
    found: dict[str, ReductionStep] = {}
    for key, member in cls.members.items():
        for rule, target in head_reduce(member):
            t_key = alpha_key(target)
            if t_key not in found:
                found[t_key] = ReductionStep(cls.root, tuple(cls.witness(key)), rule, target)
    steps = sorted(found.values(), key=lambda step: order_key(step.target))
    return StepSet(cls.root, tuple(steps), cls.frontier_exhausted, len(cls.members))


def reduce_step(r: Term, budget: int = DEFAULT_BUDGET) -> StepSet:
    """Reducts of ``r`` modulo equivalence: some member of its class head-reduces to them."""

    return _steps_of_class(equiv_class(r, budget))


class Strategy(str, Enum):
    DETERMINISTIC = "deterministic"
    EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class ReductionTrace:
    source: Term
    steps: tuple[ReductionStep, ...]
    result: Term
    exhaustive: bool
    normal: bool = True

    def __len__(self) -> int:
        return len(self.steps)


class ReductionGraph:
    """Reduction modulo equivalence between classes, keyed by representative.

    Each node carries ``term`` (the representative), ``class_size``, ``closed``
    (class exploration finished) and ``expanded``.
    """

    def __init__(
        self, root: Term, budget: int = DEFAULT_BUDGET, max_nodes: int = DEFAULT_MAX_STEPS
    ) -> None:
        self.graph: nx.DiGraph = nx.DiGraph()
        self.budget = budget
        self.exhaustive = True
        self._class_of: dict[str, str] = {}
        self._steps: dict[str, StepSet] = {}
        self.root = self._add_class(root)
        self._explore(max_nodes)

    def _add_class(self, r: Term) -> str:
        key = alpha_key(r)
        if key in self._class_of:
            return self._class_of[key]
        cls = equiv_class(r, self.budget)
        rep = cls.representative
        node = alpha_key(rep)
        for member in cls.members:
            self._class_of[member] = node
        if node not in self.graph:
            self.graph.add_node(
                node, term=rep, class_size=len(cls), closed=cls.frontier_exhausted, expanded=False
            )
            self._steps[node] = _steps_of_class(cls)
        if not cls.frontier_exhausted:
            self.exhaustive = False
        return node

    def _explore(self, max_nodes: int) -> None:
        queue = deque([self.root])
        expanded = 0
        while queue:
            node = queue.popleft()
            if self.graph.nodes[node]["expanded"]:
                continue
            if expanded >= max_nodes:
                self.exhaustive = False
                logger.warning("reduction graph stopped after %d classes", expanded)
                break
            expanded += 1
            self.graph.nodes[node]["expanded"] = True
            for step in self._steps[node].steps:
                target = self._add_class(step.target)
                if not self.graph.has_edge(node, target):
                    self.graph.add_edge(node, target, rule=step.rule, step=step)
                queue.append(target)
        if not nx.is_directed_acyclic_graph(self.graph):
            raise InvariantViolation("reduction graph contains a cycle")
        logger.debug("reduction graph with %d classes", self.graph.number_of_nodes())

    def term(self, node: str) -> Term:
        return self.graph.nodes[node]["term"]

    def is_normal(self, node: str) -> bool:
        data = self.graph.nodes[node]
        return data["expanded"] and data["closed"] and self.graph.out_degree(node) == 0

    def normal_forms(self) -> list[str]:
        nodes = [n for n in self.graph.nodes if self.is_normal(n)]
        return sorted(nodes, key=lambda n: order_key(self.term(n)))

    def frontier(self) -> list[str]:
        """Leaves the exploration stopped at before knowing whether they reduce."""

        nodes = [
            n for n in self.graph.nodes if self.graph.out_degree(n) == 0 and not self.is_normal(n)
        ]
        return sorted(nodes, key=lambda n: order_key(self.term(n)))

    def trace_to(self, node: str) -> ReductionTrace:
        path = nx.shortest_path(self.graph, self.root, node)
        steps = tuple(self.graph.edges[a, b]["step"] for a, b in zip(path, path[1:]))
        result = steps[-1].target if steps else self.term(self.root)
        return ReductionTrace(
            self.term(self.root), steps, result, self.exhaustive, self.is_normal(node)
        )

    def longest_path_length(self) -> int:
        return int(nx.dag_longest_path_length(self.graph))


def normalize(
    r: Term,
    strategy: Strategy = Strategy.DETERMINISTIC,
    budget: int = DEFAULT_BUDGET,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> list[ReductionTrace]:
    """Deterministic: one trace following the least reduct. Exhaustive: one trace per
    normal form of the reduction graph.

    A run that stops at its budget marks its traces non-exhaustive. When it stopped
    before reaching any normal form, the single trace ends at the least frontier class
    and has ``normal`` unset.
    """

    if strategy is Strategy.EXHAUSTIVE:
        graph = ReductionGraph(r, budget, max_steps)
        nodes = graph.normal_forms() or graph.frontier()[:1]
        return [graph.trace_to(node) for node in nodes]

    current = r
    steps: list[ReductionStep] = []
    exhaustive = True
    while True:
        step_set = reduce_step(current, budget)
        if not step_set.exhaustive:
            exhaustive = False
        if not step_set.steps:
            break
        if len(steps) >= max_steps:
            exhaustive = False
            logger.warning("deterministic reduction stopped after %d steps", max_steps)
            break
        step = step_set.steps[0]
        steps.append(step)
        current = step.target
    normal = not step_set.steps
    return [ReductionTrace(r, tuple(steps), current, exhaustive, normal)]
