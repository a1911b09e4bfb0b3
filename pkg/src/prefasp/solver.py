"""Answer sets of ground programs, with optimization over weak constraints."""

from __future__ import annotations

import logging
import time
from typing import Callable, Literal

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pysat.formula import IDPool
from pysat.solvers import Solver as SatSolver

from prefasp.config import DEFAULT_TIMEOUT
from prefasp.errors import SolverTimeout
from prefasp.models import ClassicalLiteral, Interpretation, Program, Rule, sort_interpretations

logger = logging.getLogger(__name__)

UNKNOWN, TRUE, FALSE = 0, 1, -1


class GroundReduct(BaseModel):
    model_config = ConfigDict(frozen=True)

    rules: tuple[Rule, ...] = ()

    @model_validator(mode="after")
    def check_positive(self) -> GroundReduct:
        for r in self.rules:
            if r.neg_body:
                raise ValueError(f"Reduct rule {r.id} still has a negative body")
        return self


class ObjectiveValue(BaseModel):
    """Violated weight per level and the scalar objective H."""

    model_config = ConfigDict(frozen=True)

    levels: dict[int, int] = Field(default_factory=dict)
    value: int = Field(default=0, ge=0)

    def key(self) -> tuple[int, ...]:
        """Lexicographic comparison key, highest level first."""
        return tuple(self.levels.get(l, 0) for l in sorted(self.levels, reverse=True))

    def to_dict(self) -> dict:
        return {"levels": {str(k): v for k, v in sorted(self.levels.items())}, "value": self.value}


class SolverStats(BaseModel):
    atoms: int = 0
    rules: int = 0
    choices: int = 0
    conflicts: int = 0
    candidates_checked: int = 0
    minimality_sat_calls: int = 0
    answer_sets: int = 0
    stratified: bool = False

    def to_dict(self) -> dict:
        return self.model_dump()


def gl_reduct(program: Program, interpretation: Interpretation) -> GroundReduct:
    """Drop rules defeated by the interpretation and strip negative bodies."""
    rules = tuple(
        Rule(id=r.id, head=r.head, pos_body=r.pos_body)
        for r in program.rules
        if r.neg_body.isdisjoint(interpretation.literals)
    )
    return GroundReduct(rules=rules)


def is_closed(interpretation: Interpretation, reduct: GroundReduct | Program) -> bool:
    lits = interpretation.literals
    for r in reduct.rules:
        if r.pos_body <= lits and r.neg_body.isdisjoint(lits) and r.head.isdisjoint(lits):
            return False
    return True


def weight_factors(program: Program) -> dict[int, int]:
    """f_P(i) for every level up to the highest one used."""
    wcs = program.weak_constraints
    if not wcs:
        return {}
    max_level = max(w.level for w in wcs)
    max_weight = max(w.weight for w in wcs)
    factors = {1: 1}
    for level in range(2, max_level + 1):
        factors[level] = factors[level - 1] * len(wcs) * max_weight + 1
    return factors


def objective(program: Program, answer_set: Interpretation) -> ObjectiveValue:
    levels = {w.level: 0 for w in program.weak_constraints}
    for w in program.weak_constraints:
        if w.violated_by(answer_set.literals):
            levels[w.level] += w.weight
    factors = weight_factors(program)
    value = sum(factors[l] * n for l, n in levels.items())
    return ObjectiveValue(levels=levels, value=value)


class _Search:
    """Three-valued propagation and chronological backtracking over literals."""

    def __init__(self, program: Program, timeout: float) -> None:
        self.program = program
        self.stats = SolverStats()
        self.deadline = time.monotonic() + timeout if timeout > 0 else None

        literals = set(program.occurring_literals())
        self.literals: list[ClassicalLiteral] = sorted(literals, key=str)
        self.index = {lit: i for i, lit in enumerate(self.literals)}
        n = len(self.literals)
        self.complement = [self.index.get(lit.complement(), -1) for lit in self.literals]

        self.heads: list[list[int]] = []
        self.pos: list[list[int]] = []
        self.neg: list[list[int]] = []
        self.occurs: list[list[int]] = [[] for _ in range(n)]
        self.head_rules: list[list[int]] = [[] for _ in range(n)]
        for r_index, rule in enumerate(program.rules):
            heads = [self.index[l] for l in sorted(rule.head, key=str)]
            pos = [self.index[l] for l in sorted(rule.pos_body, key=str)]
            neg = [self.index[l] for l in sorted(rule.neg_body, key=str)]
            self.heads.append(heads)
            self.pos.append(pos)
            self.neg.append(neg)
            for a in set(heads + pos + neg):
                self.occurs[a].append(r_index)
            for h in heads:
                self.head_rules[h].append(r_index)

        self.weak = [
            (
                [self.index[l] for l in w.pos_body],
                [self.index[l] for l in w.neg_body],
                w.weight,
                w.level,
            )
            for w in program.weak_constraints
        ]
        self.levels = sorted({w.level for w in program.weak_constraints}, reverse=True)

        self.value = [UNKNOWN] * n
        self.trail: list[int] = []
        self.queue: list[int] = []
        self.stats.atoms = n
        self.stats.rules = len(program.rules)

    # assignment

    def assign(self, atom: int, value: int) -> bool:
        current = self.value[atom]
        if current == value:
            return True
        if current != UNKNOWN:
            return False
        self.value[atom] = value
        self.trail.append(atom)
        self.queue.append(atom)
        if value == TRUE and self.complement[atom] >= 0:
            return self.assign(self.complement[atom], FALSE)
        return True

    def undo(self, mark: int) -> None:
        for atom in self.trail[mark:]:
            self.value[atom] = UNKNOWN
        del self.trail[mark:]
        self.queue.clear()

    # propagation

    def body_false(self, r: int) -> bool:
        v = self.value
        return any(v[p] == FALSE for p in self.pos[r]) or any(v[q] == TRUE for q in self.neg[r])

    def check_rule(self, r: int) -> bool:
        v = self.value
        if self.body_false(r):
            return True
        if any(v[h] == TRUE for h in self.heads[r]):
            return True
        open_body = [(p, True) for p in self.pos[r] if v[p] == UNKNOWN]
        open_body += [(q, False) for q in self.neg[r] if v[q] == UNKNOWN]
        open_heads = [h for h in self.heads[r] if v[h] == UNKNOWN]
        if not open_body:
            if not open_heads:
                return False
            if len(open_heads) == 1:
                return self.assign(open_heads[0], TRUE)
            return True
        if not open_heads and len(open_body) == 1:
            atom, positive = open_body[0]
            return self.assign(atom, FALSE if positive else TRUE)
        return True

    def supports(self, atom: int) -> list[int]:
        v = self.value
        found = []
        for r in self.head_rules[atom]:
            if self.body_false(r):
                continue
            if any(v[h] == TRUE for h in self.heads[r] if h != atom):
                continue
            found.append(r)
        return found

    def check_support(self, atom: int) -> bool:
        if self.value[atom] == FALSE:
            return True
        support = self.supports(atom)
        if not support:
            return self.assign(atom, FALSE)
        if self.value[atom] == TRUE and len(support) == 1:
            r = support[0]
            for p in self.pos[r]:
                if not self.assign(p, TRUE):
                    return False
            for q in self.neg[r]:
                if not self.assign(q, FALSE):
                    return False
            for h in self.heads[r]:
                if h != atom and not self.assign(h, FALSE):
                    return False
        return True

    def propagate(self) -> bool:
        while self.queue:
            atom = self.queue.pop()
            for r in self.occurs[atom]:
                if not self.check_rule(r):
                    return False
                for h in self.heads[r]:
                    if not self.check_support(h):
                        return False
            if not self.check_support(atom):
                return False
        return True

    def initial(self) -> bool:
        possible = self.possible()
        for atom in range(len(self.literals)):
            if atom not in possible and not self.assign(atom, FALSE):
                return False
        for r in range(len(self.heads)):
            if not self.check_rule(r):
                return False
        for atom in range(len(self.literals)):
            if not self.check_support(atom):
                return False
        return self.propagate()

    def possible(self) -> set[int]:
        """Least model of the positivized program."""
        derived: set[int] = set()
        waiting = [len(p) for p in self.pos]
        watchers: list[list[int]] = [[] for _ in self.literals]
        for r, pos in enumerate(self.pos):
            for p in pos:
                watchers[p].append(r)
        agenda = [r for r, count in enumerate(waiting) if count == 0]
        while agenda:
            r = agenda.pop()
            for h in self.heads[r]:
                if h in derived:
                    continue
                derived.add(h)
                for other in watchers[h]:
                    waiting[other] -= 1
                    if waiting[other] == 0:
                        agenda.append(other)
        return derived

    # candidates

    def true_atoms(self) -> set[int]:
        return {a for a, v in enumerate(self.value) if v == TRUE}

    def is_model(self, model: set[int]) -> bool:
        for r in range(len(self.heads)):
            body = all(p in model for p in self.pos[r]) and not any(q in model for q in self.neg[r])
            if body and not any(h in model for h in self.heads[r]):
                return False
        return all(self.complement[a] not in model for a in model)

    def is_minimal(self, model: set[int]) -> bool:
        """No proper subset of ``model`` is closed under the reduct."""
        reduct = [
            r for r in range(len(self.heads)) if not any(q in model for q in self.neg[r])
        ]
        forced: set[int] = set()
        changed = True
        while changed:
            changed = False
            for r in reduct:
                if not all(p in forced for p in self.pos[r]):
                    continue
                in_model = [h for h in self.heads[r] if h in model]
                if len(in_model) == 1 and in_model[0] not in forced:
                    forced.add(in_model[0])
                    changed = True
        if forced == model:
            return True
        if all(
            any(h in forced for h in self.heads[r])
            for r in reduct
            if all(p in forced for p in self.pos[r])
        ):
            return False
        return not self.smaller_closed_set(model, forced, reduct)

    def smaller_closed_set(self, model: set[int], forced: set[int], reduct: list[int]) -> bool:
        self.stats.minimality_sat_calls += 1
        pool = IDPool()
        open_atoms = sorted(model - forced)
        clauses = []
        for r in reduct:
            if not all(p in model for p in self.pos[r]):
                continue
            if any(h in forced for h in self.heads[r]):
                continue
            clause = [-pool.id(p) for p in self.pos[r] if p not in forced]
            clause += [pool.id(h) for h in self.heads[r] if h in model]
            if not clause:
                return False
            clauses.append(clause)
        clauses.append([-pool.id(a) for a in open_atoms])
        with SatSolver(name="g3", bootstrap_with=clauses) as sat:
            return sat.solve()

    # weak constraints

    def violation_key(self, definite: bool) -> tuple[int, ...]:
        """Violated weight per level; with ``definite`` only bodies already true count."""
        v = self.value
        totals = dict.fromkeys(self.levels, 0)
        for pos, neg, weight, level in self.weak:
            if definite:
                hit = all(v[p] == TRUE for p in pos) and all(v[q] == FALSE for q in neg)
            else:
                hit = all(v[p] == TRUE for p in pos) and not any(v[q] == TRUE for q in neg)
            if hit:
                totals[level] += weight
        return tuple(totals[l] for l in self.levels)

    # driver

    def check_deadline(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SolverTimeout("Solver time limit exceeded")

    def next_unassigned(self) -> int | None:
        for atom, value in enumerate(self.value):
            if value == UNKNOWN:
                return atom
        return None

    def run(
        self,
        on_model: Callable[[set[int]], None],
        bound: Callable[[], bool] | None = None,
    ) -> None:
        if not self.initial():
            return
        stack: list[tuple[int, int, bool]] = []
        ok = True
        while True:
            if ok:
                ok = self.propagate()
            if ok and bound is not None and not bound():
                ok = False
            if ok:
                atom = self.next_unassigned()
                if atom is None:
                    model = self.true_atoms()
                    self.stats.candidates_checked += 1
                    if self.is_model(model) and self.is_minimal(model):
                        on_model(model)
                    ok = False
                else:
                    self.check_deadline()
                    self.stats.choices += 1
                    stack.append((len(self.trail), atom, False))
                    self.assign(atom, TRUE)
                    continue
            else:
                self.stats.conflicts += 1
            while stack:
                mark, atom, flipped = stack.pop()
                self.undo(mark)
                if not flipped:
                    stack.append((mark, atom, True))
                    ok = self.assign(atom, FALSE)
                    break
            else:
                return

    def interpretation(self, model: set[int]) -> Interpretation:
        return Interpretation(literals=frozenset(self.literals[a] for a in model))


def _stratified_model(program: Program) -> tuple[bool, Interpretation | None]:
    """Perfect model of a normal program without recursion through negation.

    Returns ``(False, None)`` if the program does not qualify, and
    ``(True, None)`` if it qualifies but has no answer set.
    """
    if not program.is_normal:
        return False, None
    graph = nx.DiGraph()
    negative: list[tuple[ClassicalLiteral, ClassicalLiteral]] = []
    for r in program.rules:
        for h in r.head:
            graph.add_node(h)
            for p in r.pos_body:
                graph.add_edge(h, p)
            for q in r.neg_body:
                graph.add_edge(h, q)
                negative.append((h, q))
    condensed = nx.condensation(graph)
    mapping = condensed.graph["mapping"]
    if any(mapping[h] == mapping[q] for h, q in negative):
        return False, None

    rules_by_component: dict[int, list[Rule]] = {}
    for r in program.rules:
        if r.head:
            rules_by_component.setdefault(mapping[next(iter(r.head))], []).append(r)
    model: set[ClassicalLiteral] = set()
    for component in reversed(list(nx.topological_sort(condensed))):
        rules = rules_by_component.get(component, [])
        changed = True
        while changed:
            changed = False
            for r in rules:
                head = next(iter(r.head))
                if head in model:
                    continue
                if r.pos_body <= model and r.neg_body.isdisjoint(model):
                    model.add(head)
                    changed = True
    for r in program.rules:
        if not r.head and r.pos_body <= model and r.neg_body.isdisjoint(model):
            return True, None
    result = Interpretation(literals=frozenset(model))
    if not result.is_consistent():
        return True, None
    return True, result


def solve_with_stats(
    program: Program, timeout: float = DEFAULT_TIMEOUT
) -> tuple[list[Interpretation], SolverStats]:
    """All consistent answer sets of ``program`` ignoring its weak constraints."""
    base = program.without_weak_constraints()
    qualifies, model = _stratified_model(base)
    if qualifies:
        stats = SolverStats(
            atoms=len(base.occurring_literals()), rules=len(base.rules), stratified=True
        )
        found = [model] if model is not None else []
        stats.answer_sets = len(found)
        logger.debug("Stratified evaluation: %d answer set(s)", len(found))
        return found, stats

    search = _Search(base, timeout)
    found: list[Interpretation] = []
    search.run(lambda m: found.append(search.interpretation(m)))
    search.stats.answer_sets = len(found)
    logger.debug("Search statistics: %s", search.stats.to_dict())
    return sort_interpretations(found), search.stats


def answer_sets(program: Program, timeout: float = DEFAULT_TIMEOUT) -> list[Interpretation]:
    return solve_with_stats(program, timeout=timeout)[0]


def is_answer_set(program: Program, interpretation: Interpretation) -> bool:
    """Consistent, a model, and minimal among the closed sets of its reduct."""
    if not interpretation.is_consistent():
        return False
    search = _Search(program.without_weak_constraints(), timeout=0)
    if any(lit not in search.index for lit in interpretation.literals):
        return False
    model = {search.index[lit] for lit in interpretation.literals}
    return search.is_model(model) and search.is_minimal(model)


def optimal_answer_sets_with_stats(
    program: Program,
    strategy: Literal["branch", "filter"] = "branch",
    timeout: float = DEFAULT_TIMEOUT,
) -> tuple[list[tuple[Interpretation, ObjectiveValue]], SolverStats]:
    """Answer sets of minimal objective, each with its objective value."""
    if strategy == "filter" or not program.weak_constraints:
        candidates, stats = solve_with_stats(program, timeout=timeout)
        scored = [(a, objective(program, a)) for a in candidates]
        if not scored:
            return [], stats
        best = min(value.key() for _, value in scored)
        return [(a, v) for a, v in scored if v.key() == best], stats

    search = _Search(program.without_weak_constraints(), timeout)
    search.weak = [
        ([search.index[l] for l in w.pos_body if l in search.index],
         [search.index[l] for l in w.neg_body if l in search.index],
         w.weight, w.level)
        for w in program.weak_constraints
        if w.pos_body <= set(search.index)
    ]
    search.levels = sorted({w.level for w in program.weak_constraints}, reverse=True)
    best: list[tuple[int, ...] | None] = [None]
    optima: list[set[int]] = []

    def on_model(model: set[int]) -> None:
        key = search.violation_key(definite=True)
        if best[0] is None or key < best[0]:
            best[0] = key
            optima.clear()
        if key == best[0]:
            optima.append(set(model))

    def bound() -> bool:
        return best[0] is None or search.violation_key(definite=True) <= best[0]

    search.run(on_model, bound)
    results = []
    for model in optima:
        interpretation = search.interpretation(model)
        results.append((interpretation, objective(program, interpretation)))
    results.sort(key=lambda item: item[0].key())
    search.stats.answer_sets = len(results)
    logger.debug("Optimization statistics: %s", search.stats.to_dict())
    return results, search.stats


def optimal_answer_sets(
    program: Program,
    strategy: Literal["branch", "filter"] = "branch",
    timeout: float = DEFAULT_TIMEOUT,
) -> list[tuple[Interpretation, ObjectiveValue]]:
    return optimal_answer_sets_with_stats(program, strategy=strategy, timeout=timeout)[0]
