"""Bottom-up instantiation of meta-language programs and dependency analysis."""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from typing import Iterable, Iterator, Union

import networkx as nx
from pydantic import BaseModel, Field

from prefasp.config import EMPTY_UNIVERSE_CONSTANT
from prefasp.models import Atom, ClassicalLiteral, Program, Rule, WeakConstraint
from prefasp.parser import (
    Comparison,
    MetaAtom,
    MetaRule,
    MetaWeakConstraint,
    NonGroundProgram,
    is_variable,
)

logger = logging.getLogger(__name__)

GroundAtomKey = tuple[str, tuple[str, ...], bool]
Substitution = dict[str, str]


class GroundingStats(BaseModel):
    source_rules: int = Field(default=0, ge=0)
    universe_size: int = Field(default=0, ge=0)
    possible_atoms: int = Field(default=0, ge=0)
    ground_rules: int = Field(default=0, ge=0)
    ground_weak_constraints: int = Field(default=0, ge=0)
    builtin_pruned: int = Field(default=0, ge=0)
    duplicates_removed: int = Field(default=0, ge=0)

    def to_dict(self) -> dict[str, int]:
        return self.model_dump()


def herbrand_universe(program: NonGroundProgram) -> list[str]:
    """Constants of ``program`` in lexicographic order; ``u0`` if there are none."""
    constants = sorted(program.constants())
    return constants or [EMPTY_UNIVERSE_CONSTANT]


def compare(op: str, left: str, right: str) -> bool:
    if op == "<":
        return left < right
    if op == ">":
        return left > right
    return left != right


def from_program(program: Program) -> NonGroundProgram:
    """View a ground program as a (variable-free) meta-language program."""

    def meta(lit: ClassicalLiteral) -> MetaAtom:
        return MetaAtom(predicate=lit.atom.name, terms=lit.atom.args, positive=lit.positive)

    def ordered(lits: frozenset[ClassicalLiteral]) -> tuple[MetaAtom, ...]:
        return tuple(meta(l) for l in sorted(lits, key=str))

    rules = tuple(
        MetaRule(id=r.id, head=ordered(r.head), pos_body=ordered(r.pos_body), neg_body=ordered(r.neg_body))
        for r in program.rules
    )
    weak = tuple(
        MetaWeakConstraint(
            pos_body=ordered(w.pos_body), neg_body=ordered(w.neg_body), weight=w.weight, level=w.level
        )
        for w in program.weak_constraints
    )
    return NonGroundProgram(rules=rules, weak_constraints=weak)


def _key(atom: MetaAtom, subst: Substitution) -> GroundAtomKey:
    return (atom.predicate, tuple(subst.get(t, t) for t in atom.terms), atom.positive)


def _builtins_hold(builtins: Iterable[Comparison], subst: Substitution) -> bool | None:
    """False if some fully bound comparison fails, None if one is still open."""
    open_ = False
    for cmp in builtins:
        left = subst.get(cmp.left, cmp.left)
        right = subst.get(cmp.right, cmp.right)
        if is_variable(left) or is_variable(right):
            open_ = True
            continue
        if not compare(cmp.op, left, right):
            return False
    return None if open_ else True


class _Index:
    """Ground atoms indexed by predicate, sign and arity."""

    def __init__(self) -> None:
        self.atoms: set[GroundAtomKey] = set()
        self.by_signature: dict[tuple[str, int, bool], list[tuple[str, ...]]] = defaultdict(list)

    def add(self, key: GroundAtomKey) -> bool:
        if key in self.atoms:
            return False
        self.atoms.add(key)
        self.by_signature[(key[0], len(key[1]), key[2])].append(key[1])
        return True

    def candidates(self, atom: MetaAtom) -> list[tuple[str, ...]]:
        return self.by_signature.get((atom.predicate, len(atom.terms), atom.positive), [])

    def __len__(self) -> int:
        return len(self.atoms)


def _join(
    body: tuple[MetaAtom, ...],
    builtins: tuple[Comparison, ...],
    index: _Index,
    subst: Substitution | None = None,
) -> Iterator[Substitution]:
    """Substitutions making every body atom an element of ``index``."""
    subst = subst or {}
    check = _builtins_hold(builtins, subst)
    if check is False:
        return
    if not body:
        if check is True or not builtins:
            yield subst
        return
    atom, rest = body[0], body[1:]
    for args in index.candidates(atom):
        extended = dict(subst)
        for term, value in zip(atom.terms, args):
            if is_variable(term):
                bound = extended.get(term)
                if bound is None:
                    extended[term] = value
                elif bound != value:
                    break
            elif term != value:
                break
        else:
            yield from _join(rest, builtins, index, extended)


def _order_body(body: tuple[MetaAtom, ...]) -> tuple[MetaAtom, ...]:
    """Join order: ground atoms first, then by fewest new variables."""
    remaining = list(body)
    ordered: list[MetaAtom] = []
    bound: set[str] = set()
    while remaining:
        best = min(remaining, key=lambda a: (len(a.variables() - bound), -len(a.variables() & bound)))
        remaining.remove(best)
        ordered.append(best)
        bound |= best.variables()
    return tuple(ordered)


def possible_atoms(program: NonGroundProgram) -> set[GroundAtomKey]:
    """Least model of the positivized program: negation dropped, disjunction kept as "any head"."""
    index = _Index()
    rules = [(r, _order_body(r.pos_body)) for r in program.rules if r.head]
    changed = True
    rounds = 0
    while changed:
        changed = False
        rounds += 1
        for rule, body in rules:
            for subst in list(_join(body, rule.builtins, index)):
                for atom in rule.head:
                    if index.add(_key(atom, subst)):
                        changed = True
    logger.debug("Positivized fixpoint reached after %d rounds: %d atoms", rounds, len(index))
    return index.atoms


class _LiteralCache:
    def __init__(self) -> None:
        self.cache: dict[GroundAtomKey, ClassicalLiteral] = {}

    def get(self, key: GroundAtomKey) -> ClassicalLiteral:
        lit = self.cache.get(key)
        if lit is None:
            lit = ClassicalLiteral(atom=Atom(name=key[0], args=key[1]), positive=key[2])
            self.cache[key] = lit
        return lit


def _ground_id(rule_id: str, subst: Substitution) -> str:
    if not subst:
        return rule_id
    return f"{rule_id}[{','.join(f'{v}={c}' for v, c in sorted(subst.items()))}]"


def _substitutions(
    rule: Union[MetaRule, MetaWeakConstraint],
    index: _Index | None,
    universe: list[str],
    stats: GroundingStats,
) -> Iterator[Substitution]:
    variables = sorted(rule.variables())
    if index is not None:
        yield from _join(_order_body(rule.pos_body), rule.builtins, index)
        return
    for values in itertools.product(universe, repeat=len(variables)):
        subst = dict(zip(variables, values))
        if _builtins_hold(rule.builtins, subst) is False:
            stats.builtin_pruned += 1
            continue
        yield subst


def ground_with_stats(
    program: NonGroundProgram | Program, relevance: bool = True
) -> tuple[Program, GroundingStats]:
    """Instantiate every rule; variable-free rules are kept as they are."""
    if isinstance(program, Program):
        program = from_program(program)
    universe = herbrand_universe(program)
    stats = GroundingStats(source_rules=len(program.rules), universe_size=len(universe))
    index: _Index | None = None
    if relevance:
        index = _Index()
        for key in possible_atoms(program):
            index.add(key)
        stats.possible_atoms = len(index)

    literals = _LiteralCache()
    seen: set[tuple] = set()
    rules: list[Rule] = []
    for source in program.rules:
        if source.is_ground():
            if not _builtins_hold(source.builtins, {}):
                stats.builtin_pruned += 1
                continue
            substitutions: Iterable[Substitution] = [{}]
        else:
            substitutions = _substitutions(source, index, universe, stats)
        for subst in substitutions:
            head = frozenset(literals.get(_key(a, subst)) for a in source.head)
            pos = frozenset(literals.get(_key(a, subst)) for a in source.pos_body)
            neg = frozenset(literals.get(_key(a, subst)) for a in source.neg_body)
            shape = (head, pos, neg)
            if shape in seen:
                stats.duplicates_removed += 1
                continue
            seen.add(shape)
            rules.append(
                Rule.model_construct(id=_ground_id(source.id, subst), head=head, pos_body=pos, neg_body=neg)
            )

    weak: list[WeakConstraint] = []
    seen_weak: set[tuple] = set()
    for wc in program.weak_constraints:
        if wc.is_ground():
            substitutions = [{}] if _builtins_hold(wc.builtins, {}) else []
        else:
            substitutions = _substitutions(wc, index, universe, stats)
        for subst in substitutions:
            pos = frozenset(literals.get(_key(a, subst)) for a in wc.pos_body)
            neg = frozenset(literals.get(_key(a, subst)) for a in wc.neg_body)
            shape = (pos, neg, wc.weight, wc.level)
            if shape in seen_weak:
                stats.duplicates_removed += 1
                continue
            seen_weak.add(shape)
            weak.append(WeakConstraint(pos_body=pos, neg_body=neg, weight=wc.weight, level=wc.level))

    stats.ground_rules = len(rules)
    stats.ground_weak_constraints = len(weak)
    logger.info(
        "Grounded %d rules into %d ground rules (%d pruned by comparisons, %d duplicates)",
        stats.source_rules,
        stats.ground_rules,
        stats.builtin_pruned,
        stats.duplicates_removed,
    )
    return Program(rules=tuple(rules), weak_constraints=tuple(weak)), stats


def ground(program: NonGroundProgram | Program, relevance: bool = True) -> Program:
    return ground_with_stats(program, relevance=relevance)[0]


def _node(item: MetaAtom | ClassicalLiteral) -> str:
    if isinstance(item, MetaAtom):
        return item.predicate if item.positive else f"-{item.predicate}"
    return str(item)


def dependency_graph(program: NonGroundProgram | Program) -> nx.DiGraph:
    """Head -> body dependencies.

    Nodes are signed predicates for non-ground programs and ground literals for
    ground ones.  Edges carry ``positive`` and ``negative`` flags.
    """
    graph = nx.DiGraph()
    for rule in program.rules:
        heads = [_node(h) for h in rule.head]
        graph.add_nodes_from(heads)
        for sign, body in (("positive", rule.pos_body), ("negative", rule.neg_body)):
            for b in body:
                target = _node(b)
                for h in heads:
                    if graph.has_edge(h, target):
                        graph[h][target][sign] = True
                    else:
                        graph.add_edge(h, target, positive=False, negative=False)
                        graph[h][target][sign] = True
    return graph


def is_stratified(program: NonGroundProgram | Program) -> bool:
    """No cycle of the dependency graph passes through a negative edge."""
    graph = dependency_graph(program)
    component = {}
    for i, scc in enumerate(nx.strongly_connected_components(graph)):
        for node in scc:
            component[node] = i
    for u, v, data in graph.edges(data=True):
        if data["negative"] and component[u] == component[v]:
            return False
    return True


def is_tight(program: NonGroundProgram | Program) -> bool:
    """The positive dependency graph is acyclic."""
    graph = dependency_graph(program)
    positive = nx.DiGraph()
    positive.add_nodes_from(graph.nodes)
    positive.add_edges_from((u, v) for u, v, d in graph.edges(data=True) if d["positive"])
    return nx.is_directed_acyclic_graph(positive)


def representation_restriction(program: Program, facts: Program) -> Program:
    """Rules whose body literals over fact predicates agree with ``facts``."""
    fact_literals = {next(iter(r.head)) for r in facts.rules if r.is_fact}
    fact_predicates = {lit.atom.name for lit in fact_literals}

    def agrees(rule: Rule) -> bool:
        for lit in rule.pos_body:
            if lit.atom.name in fact_predicates and lit not in fact_literals:
                return False
        for lit in rule.neg_body:
            if lit.atom.name in fact_predicates and lit in fact_literals:
                return False
        return True

    return Program(
        rules=tuple(r for r in program.rules if agrees(r)),
        weak_constraints=program.weak_constraints,
    )
