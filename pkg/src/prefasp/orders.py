"""Strict orders on rule identifiers: closure, reduction, linear extensions, distance."""

from __future__ import annotations

import logging
from bisect import bisect
from typing import Iterable, Iterator

import networkx as nx

from prefasp.config import DEFAULT_ENUMERATION_LIMIT
from prefasp.errors import ProgramError, ResourceLimitError
from prefasp.models import PrioritizedProgram, RuleOrder

logger = logging.getLogger(__name__)


def order_graph(pairs: Iterable[tuple[str, str]], domain: Iterable[str] = ()) -> nx.DiGraph:
    """Directed graph with an edge a -> b for every pair a < b."""
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted(domain))
    graph.add_edges_from(sorted(pairs))
    return graph


def close_pairs(pairs: Iterable[tuple[str, str]]) -> frozenset[tuple[str, str]]:
    """Transitive closure of a pair set; a cycle shows up as a reflexive pair."""
    pairs = list(pairs)
    if not pairs:
        return frozenset()
    closure = nx.transitive_closure(order_graph(pairs), reflexive=False)
    return frozenset(closure.edges())


def transitive_closure(order: RuleOrder) -> RuleOrder:
    closed = close_pairs(order.pairs)
    return RuleOrder(pairs=closed, domain=order.domain, total=order.total)


def transitive_reduction(order: RuleOrder) -> RuleOrder:
    graph = order_graph(order.pairs, order.domain)
    if not nx.is_directed_acyclic_graph(graph):
        raise ProgramError("Cannot reduce a cyclic order")
    reduced = nx.transitive_reduction(graph)
    return RuleOrder(pairs=frozenset(reduced.edges()), domain=order.domain, total=order.total)


def linear_extensions(
    pairs: Iterable[tuple[str, str]], domain: Iterable[str]
) -> Iterator[tuple[str, ...]]:
    """Every total sequence of ``domain`` consistent with ``pairs``, highest first."""
    graph = order_graph(pairs, domain)
    if graph.number_of_nodes() == 0:
        yield ()
        return
    for sequence in nx.all_topological_sorts(graph):
        yield tuple(sequence)


def full_prioritizations(
    program: PrioritizedProgram, limit: int = DEFAULT_ENUMERATION_LIMIT
) -> list[RuleOrder]:
    """All total orders refining the program's preferences, in lexicographic order."""
    n = len(program.rules)
    if n > limit:
        raise ResourceLimitError(
            f"Program has {n} rules; full prioritizations are enumerated up to {limit}"
        )
    sequences = sorted(linear_extensions(program.prefers, program.rule_ids))
    logger.debug("Enumerated %d full prioritizations over %d rules", len(sequences), n)
    return [RuleOrder.linear(seq) for seq in sequences]


def count_inversions(values: list[int]) -> int:
    inversions = 0
    sorted_so_far: list[int] = []
    for i, u in enumerate(values):
        j = bisect(sorted_so_far, u)
        inversions += i - j
        sorted_so_far.insert(j, u)
    return inversions


def sequence_distance(first: tuple[str, ...] | list[str], second: tuple[str, ...] | list[str]) -> int:
    """Number of pairs ordered one way in ``first`` and the other way in ``second``."""
    if sorted(first) != sorted(second):
        raise ProgramError("Orders are defined over different rule sets")
    position = {rule_id: i for i, rule_id in enumerate(second)}
    return count_inversions([position[rule_id] for rule_id in first])


def order_distance(first: RuleOrder, second: RuleOrder) -> int:
    if first.domain != second.domain:
        raise ProgramError("Orders are defined over different rule sets")
    if not first.is_total() or not second.is_total():
        raise ProgramError("Distance is only defined between total orders")
    return sequence_distance(first.sequence(), second.sequence())


def distance_to_extensions(
    sequence: tuple[str, ...] | list[str], extensions: list[tuple[str, ...]]
) -> tuple[int, tuple[str, ...]]:
    """Closest linear extension to ``sequence``; ties go to the lexicographically first."""
    best: tuple[int, tuple[str, ...]] | None = None
    for ext in extensions:
        d = sequence_distance(ext, sequence)
        if best is None or (d, ext) < best:
            best = (d, ext)
            if d == 0:
                break
    if best is None:
        raise ProgramError("No linear extension to compare against")
    return best
