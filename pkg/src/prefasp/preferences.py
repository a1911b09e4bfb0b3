"""Preferred answer sets of prioritized programs.

B-preferredness is decided with the graph-based FULL-ORDER procedure; the
enumeration over full prioritizations is kept as an independent check.  W-
and D-preferredness follow their fixpoint constructions directly, and the
weakly preferred answer sets minimise the preference violation degree.
"""

from __future__ import annotations

import logging
from typing import Iterable

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from prefasp.config import DEFAULT_ENUMERATION_LIMIT, DEFAULT_PVD_LIMIT, DEFAULT_TIMEOUT
from prefasp.errors import NotAnAnswerSetError, ResourceLimitError
from prefasp.models import (
    ClassicalLiteral,
    Interpretation,
    PrioritizedProgram,
    Rule,
    RuleLabel,
    RuleOrder,
    sort_literals,
)
from prefasp.orders import (
    close_pairs,
    distance_to_extensions,
    full_prioritizations,
    linear_extensions,
)
from prefasp.solver import answer_sets, is_answer_set

logger = logging.getLogger(__name__)


class DualReduct(BaseModel):
    """Prerequisite-free rules in priority order, each with the rule it came from."""

    model_config = ConfigDict(frozen=True)

    rules: tuple[Rule, ...] = ()
    origins: tuple[str, ...] = ()
    literals: frozenset[ClassicalLiteral] = frozenset()

    def order(self) -> RuleOrder:
        return RuleOrder.linear(r.id for r in self.rules)


class FixpointTrace(BaseModel):
    model_config = ConfigDict(frozen=True)

    stages: tuple[Interpretation, ...] = ()
    origins: tuple[frozenset[tuple[str, str]], ...] = ()
    consistent: bool = True
    value: Interpretation = Interpretation()
    sentinel: bool = False

    def to_dict(self) -> dict:
        data = {
            "stages": [s.to_list() for s in self.stages],
            "consistent": self.consistent,
            "value": self.value.to_list(),
        }
        if self.origins:
            data["origins"] = [sorted(f"{lit}@{rule}" for lit, rule in o) for o in self.origins]
        return data


class FullOrderRound(BaseModel):
    removed: list[str] = Field(default_factory=list)
    labels: dict[str, RuleLabel] = Field(default_factory=dict)
    added: list[str] = Field(default_factory=list)
    working_set: list[str] = Field(default_factory=list)


class FullOrderTrace(BaseModel):
    accepted: bool
    rounds: list[FullOrderRound] = Field(default_factory=list)
    witness: RuleOrder | None = None
    blocked: list[str] = Field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rounds": [
                {
                    "removed": r.removed,
                    "labels": {k: v.value for k, v in r.labels.items()},
                    "added": r.added,
                    "working_set": r.working_set,
                }
                for r in self.rounds
            ],
            "witness": self.witness.sequence() if self.witness is not None else None,
            "blocked": self.blocked,
        }


class PvdResult(BaseModel):
    answer_set: Interpretation
    value: int = Field(ge=0)
    prioritization: RuleOrder
    preferred_order: RuleOrder
    disagreements: list[tuple[str, str]] = Field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "answer_set": self.answer_set.to_list(),
            "pvd": self.value,
            "full_prioritization": self.prioritization.sequence(),
            "preferred_order": self.preferred_order.sequence(),
            "disagreements": [list(p) for p in self.disagreements],
        }


def _require_answer_set(program: PrioritizedProgram, answer_set: Interpretation) -> None:
    if not is_answer_set(program.program, answer_set):
        raise NotAnAnswerSetError(f"{answer_set.render()} is not an answer set of the program")


def _defeats(literals: Iterable[ClassicalLiteral], rule: Rule) -> bool:
    return rule.defeated_by(literals)


# B-preferred answer sets


def dual_reduct(
    program: PrioritizedProgram,
    x: Interpretation,
    sequence: list[str] | tuple[str, ...] | None = None,
) -> DualReduct:
    """Keep rules whose positive body holds in ``x``, then drop positive bodies.

    Rules that become identical keep the position of the earliest one.  The
    priority order is the program's own unless ``sequence`` lists the rules
    from highest to lowest priority.
    """
    if sequence is None:
        sequence = program.order().sequence()
    kept: list[Rule] = []
    origins: list[str] = []
    seen: set[tuple] = set()
    for rule_id in sequence:
        rule = program.program.rule(rule_id)
        if not rule.pos_body <= x.literals:
            continue
        stripped = Rule(id=rule.id, head=rule.head, neg_body=rule.neg_body)
        shape = (stripped.head, stripped.neg_body)
        if shape in seen:
            continue
        seen.add(shape)
        kept.append(stripped)
        origins.append(rule.id)
    return DualReduct(
        rules=tuple(kept), origins=tuple(origins), literals=program.program.literals()
    )


def cb_value(program: DualReduct | PrioritizedProgram, s: Interpretation) -> FixpointTrace:
    if isinstance(program, PrioritizedProgram):
        rules = [program.program.rule(r) for r in program.order().sequence()]
        universe = program.program.literals()
    else:
        rules = list(program.rules)
        universe = program.literals
    current: set[ClassicalLiteral] = set()
    stages = [Interpretation()]
    for rule in rules:
        head = rule.head_literal
        if not (_defeats(current, rule) or (head in s.literals and _defeats(s.literals, rule))):
            current.add(head)
        stages.append(Interpretation(literals=frozenset(current)))
    return _close_trace(stages, universe)


def _close_trace(
    stages: list[Interpretation],
    universe: frozenset[ClassicalLiteral],
    origins: list[frozenset[tuple[str, str]]] | None = None,
) -> FixpointTrace:
    last = stages[-1]
    consistent = last.is_consistent()
    value = last if consistent else Interpretation(literals=universe)
    return FixpointTrace(
        stages=tuple(stages),
        origins=tuple(origins or ()),
        consistent=consistent,
        value=value,
        sentinel=not consistent,
    )


def is_b_preferred_total(
    program: PrioritizedProgram,
    answer_set: Interpretation,
    sequence: list[str] | tuple[str, ...] | None = None,
) -> bool:
    """B-preferredness for a fully prioritized program, or under ``sequence``."""
    reduct = dual_reduct(program, answer_set, sequence)
    return cb_value(reduct, answer_set).value == answer_set


def b_preferred_by_enumeration(
    program: PrioritizedProgram,
    answer_set: Interpretation,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> RuleOrder | None:
    """First full prioritization under which ``answer_set`` is B-preferred, if any."""
    for order in full_prioritizations(program, limit=limit):
        if is_b_preferred_total(program.with_order(order), answer_set):
            return order
    return None


def label_rules(program: PrioritizedProgram, answer_set: Interpretation) -> dict[str, RuleLabel]:
    labels = {}
    for rule in program.rules:
        applicable = rule.pos_body <= answer_set.literals
        if applicable and not rule.defeated_by(answer_set.literals):
            labels[rule.id] = RuleLabel.GENERATING
        elif applicable and rule.head_literal not in answer_set.literals:
            labels[rule.id] = RuleLabel.ZOMBIE
        else:
            labels[rule.id] = RuleLabel.IRRELEVANT
    return labels


class PreferenceGraph:
    """Rules labelled against an answer set, with an edge r -> r' whenever r < r'."""

    def __init__(self, program: PrioritizedProgram, answer_set: Interpretation) -> None:
        self.program = program
        self.answer_set = answer_set
        self.graph = nx.DiGraph()
        for rule_id, label in label_rules(program, answer_set).items():
            self.graph.add_node(rule_id, label=label)
        self.graph.add_edges_from(sorted(program.prefers))
        self.working_set: set[ClassicalLiteral] = set()

    def label(self, rule_id: str) -> RuleLabel:
        return self.graph.nodes[rule_id]["label"]

    def sources(self) -> list[str]:
        return sorted(n for n in self.graph.nodes if self.graph.in_degree(n) == 0)

    def removable(self, rule_id: str, working_set: set[ClassicalLiteral] | None = None) -> bool:
        s = self.working_set if working_set is None else working_set
        if self.label(rule_id) is not RuleLabel.ZOMBIE:
            return True
        return self.program.program.rule(rule_id).defeated_by(s)

    def remove(self, batch: list[str]) -> list[ClassicalLiteral]:
        added = []
        for rule_id in batch:
            if self.label(rule_id) is RuleLabel.GENERATING:
                head = self.program.program.rule(rule_id).head_literal
                if head not in self.working_set:
                    added.append(head)
        self.working_set.update(added)
        self.graph.remove_nodes_from(batch)
        return sort_literals(added)

    def __len__(self) -> int:
        return self.graph.number_of_nodes()


def preference_graph(program: PrioritizedProgram, answer_set: Interpretation) -> PreferenceGraph:
    return PreferenceGraph(program, answer_set)


def full_order(program: PrioritizedProgram, answer_set: Interpretation) -> FullOrderTrace:
    """Remove all removable sources round by round; accept iff the graph empties.

    The removal order, ties broken by rule id, is a full prioritization
    witnessing B-preferredness.
    """
    _require_answer_set(program, answer_set)
    graph = preference_graph(program, answer_set)
    rounds: list[FullOrderRound] = []
    removal: list[str] = []
    while len(graph):
        batch = [r for r in graph.sources() if graph.removable(r)]
        if not batch:
            break
        labels = {r: graph.label(r) for r in batch}
        added = graph.remove(batch)
        removal.extend(batch)
        rounds.append(
            FullOrderRound(
                removed=batch,
                labels=labels,
                added=[str(l) for l in added],
                working_set=[str(l) for l in sort_literals(graph.working_set)],
            )
        )
    if len(graph):
        blocked = sorted(graph.graph.nodes)
        logger.debug("FULL-ORDER rejected %s; blocked rules %s", answer_set.render(), blocked)
        return FullOrderTrace(accepted=False, rounds=rounds, blocked=blocked)
    witness = RuleOrder.linear(removal)
    if not (witness.refines(program.order()) and is_b_preferred_total(program, answer_set, removal)):
        logger.warning("FULL-ORDER witness %s does not confirm %s", removal, answer_set.render())
    return FullOrderTrace(accepted=True, rounds=rounds, witness=witness)


def is_b_preferred(program: PrioritizedProgram, answer_set: Interpretation) -> bool:
    return full_order(program, answer_set).accepted


# W- and D-preferred answer sets


def _active(rule: Rule, x: set[ClassicalLiteral] | frozenset, y: set[ClassicalLiteral] | frozenset) -> bool:
    return rule.pos_body <= x and rule.neg_body.isdisjoint(y)


def cw_value(program: PrioritizedProgram, s: Interpretation) -> FixpointTrace:
    rules = list(program.rules)
    closure = close_pairs(program.prefers)
    higher = {r.id: [program.program.rule(a) for a, b in closure if b == r.id] for r in rules}
    current: set[ClassicalLiteral] = set()
    stages = [Interpretation()]
    for _ in rules:
        step = set(current)
        for rule in rules:
            if not _active(rule, current, s.literals):
                continue
            blocked = any(
                _active(other, s.literals, current) and other.head_literal not in current
                for other in higher[rule.id]
            )
            if not blocked:
                step.add(rule.head_literal)
        current = step
        stages.append(Interpretation(literals=frozenset(current)))
    return _close_trace(stages, program.program.literals())


def cd_value(program: PrioritizedProgram, s: Interpretation) -> FixpointTrace:
    """Like ``cw_value`` but a blocking rule must not have been used yet."""
    rules = list(program.rules)
    closure = close_pairs(program.prefers)
    higher = {r.id: [program.program.rule(a) for a, b in closure if b == r.id] for r in rules}
    derived: set[tuple[ClassicalLiteral, str]] = set()
    stages = [Interpretation()]
    origins: list[frozenset[tuple[str, str]]] = [frozenset()]
    for _ in rules:
        current = {lit for lit, _ in derived}
        used = {rule_id for _, rule_id in derived}
        step = set(derived)
        for rule in rules:
            if not _active(rule, current, s.literals):
                continue
            blocked = any(
                _active(other, s.literals, current) and other.id not in used
                for other in higher[rule.id]
            )
            if not blocked:
                step.add((rule.head_literal, rule.id))
        derived = step
        stages.append(Interpretation(literals=frozenset(lit for lit, _ in derived)))
        origins.append(frozenset((str(lit), rule_id) for lit, rule_id in derived))
    return _close_trace(stages, program.program.literals(), origins)


def is_w_preferred(program: PrioritizedProgram, answer_set: Interpretation) -> bool:
    _require_answer_set(program, answer_set)
    return cw_value(program, answer_set).value == answer_set


def is_d_preferred(program: PrioritizedProgram, answer_set: Interpretation) -> bool:
    _require_answer_set(program, answer_set)
    return cd_value(program, answer_set).value == answer_set


# Weakly preferred answer sets


def pvd(
    program: PrioritizedProgram,
    answer_set: Interpretation,
    limit: int = DEFAULT_PVD_LIMIT,
) -> PvdResult:
    """Preference violation degree of ``answer_set`` with a witness pair of orders.

    Breadth-first search over adjacent transpositions starting from every full
    prioritization; the first level holding an order under which the answer set
    is B-preferred gives the minimum distance.
    """
    n = len(program.rules)
    if n > limit:
        raise ResourceLimitError(f"Program has {n} rules; pvd is computed up to {limit}")
    _require_answer_set(program, answer_set)

    extensions = sorted(linear_extensions(program.prefers, program.rule_ids))
    frontier = list(extensions)
    visited = set(frontier)
    level = 0
    found: tuple[str, ...] | None = None
    checked = 0
    while frontier:
        hits = []
        for sequence in frontier:
            checked += 1
            if is_b_preferred_total(program, answer_set, sequence):
                hits.append(sequence)
        if hits:
            found = min(hits)
            break
        following = []
        for sequence in frontier:
            for i in range(n - 1):
                swapped = sequence[:i] + (sequence[i + 1], sequence[i]) + sequence[i + 2 :]
                if swapped not in visited:
                    visited.add(swapped)
                    following.append(swapped)
        frontier = sorted(following)
        level += 1
    if found is None:
        raise NotAnAnswerSetError(f"No total order makes {answer_set.render()} B-preferred")

    distance, closest = distance_to_extensions(found, extensions)
    logger.debug("pvd of %s is %d after checking %d orders", answer_set.render(), level, checked)
    position = {r: i for i, r in enumerate(found)}
    disagreements = [
        (closest[i], closest[j])
        for i in range(n)
        for j in range(i + 1, n)
        if position[closest[i]] > position[closest[j]]
    ]
    return PvdResult(
        answer_set=answer_set,
        value=distance,
        prioritization=RuleOrder.linear(closest),
        preferred_order=RuleOrder.linear(found),
        disagreements=disagreements,
    )


def weakly_preferred(
    program: PrioritizedProgram,
    limit: int = DEFAULT_PVD_LIMIT,
    timeout: float = DEFAULT_TIMEOUT,
) -> list[PvdResult]:
    """Answer sets whose pvd equals the least pvd of the program."""
    n = len(program.rules)
    if n > limit:
        raise ResourceLimitError(f"Program has {n} rules; pvd is computed up to {limit}")
    results = [pvd(program, a, limit=limit) for a in answer_sets(program.program, timeout=timeout)]
    if not results:
        return []
    best = min(r.value for r in results)
    return [r for r in results if r.value == best]


# Set-level conveniences


def answer_sets_of(program: PrioritizedProgram, timeout: float = DEFAULT_TIMEOUT) -> list[Interpretation]:
    return answer_sets(program.program, timeout=timeout)


def bpas(program: PrioritizedProgram, timeout: float = DEFAULT_TIMEOUT) -> list[Interpretation]:
    return [a for a in answer_sets_of(program, timeout) if is_b_preferred(program, a)]


def wpas(program: PrioritizedProgram, timeout: float = DEFAULT_TIMEOUT) -> list[Interpretation]:
    return [a for a in answer_sets_of(program, timeout) if is_w_preferred(program, a)]


def dpas(program: PrioritizedProgram, timeout: float = DEFAULT_TIMEOUT) -> list[Interpretation]:
    return [a for a in answer_sets_of(program, timeout) if is_d_preferred(program, a)]
