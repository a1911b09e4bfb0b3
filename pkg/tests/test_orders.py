"""Tests for rule orders."""

import itertools
import random

import pytest

from prefasp.errors import ProgramError, ResourceLimitError
from prefasp.models import RuleOrder
from prefasp.orders import (
    close_pairs,
    count_inversions,
    distance_to_extensions,
    full_prioritizations,
    linear_extensions,
    order_distance,
    sequence_distance,
    transitive_closure,
    transitive_reduction,
)
from prefasp.parser import parse_prioritized


def order(pairs, domain):
    return RuleOrder(pairs=frozenset(pairs), domain=frozenset(domain))


def bubble_sort_swaps(first, second):
    position = {x: i for i, x in enumerate(second)}
    values = [position[x] for x in first]
    swaps = 0
    for i in range(len(values)):
        for j in range(len(values) - 1 - i):
            if values[j] > values[j + 1]:
                values[j], values[j + 1] = values[j + 1], values[j]
                swaps += 1
    return swaps


def brute_force_reduction(pairs):
    target = close_pairs(pairs)
    pairs = sorted(pairs)
    for size in range(len(pairs) + 1):
        for subset in itertools.combinations(pairs, size):
            if close_pairs(subset) == target:
                return frozenset(subset)
    return frozenset(pairs)


class TestClosureAndReduction:
    def test_closure_of_chain(self):
        closed = transitive_closure(order({("r1", "r2"), ("r2", "r3")}, ["r1", "r2", "r3"]))
        assert closed.pairs == {("r1", "r2"), ("r2", "r3"), ("r1", "r3")}

    def test_empty(self):
        empty = order(set(), ["r1"])
        assert transitive_closure(empty).pairs == frozenset()
        assert transitive_reduction(empty).pairs == frozenset()

    def test_bird_penguin_closure(self, bird_penguin):
        assert len(transitive_closure(bird_penguin.order()).pairs) == 6

    def test_reduction_removes_implied_pair(self):
        reduced = transitive_reduction(
            order({("r1", "r2"), ("r2", "r3"), ("r1", "r3")}, ["r1", "r2", "r3"])
        )
        assert reduced.pairs == {("r1", "r2"), ("r2", "r3")}

    def test_reduction_matches_minimal_subset_search(self):
        rng = random.Random(11)
        nodes = ["a", "b", "c", "d", "e"]
        for _ in range(30):
            pairs = {
                (nodes[i], nodes[j])
                for i in range(5)
                for j in range(i + 1, 5)
                if rng.random() < 0.4
            }
            reduced = transitive_reduction(order(pairs, nodes))
            assert reduced.pairs == brute_force_reduction(pairs)

    def test_cycle_shows_in_closure(self):
        assert ("a", "a") in close_pairs({("a", "b"), ("b", "a")})


class TestFullPrioritizations:
    def test_total_input_has_one_extension(self, bird_penguin):
        orders = full_prioritizations(bird_penguin)
        assert [o.sequence() for o in orders] == [["r1", "r2", "r3", "r4"]]

    def test_empty_order_gives_all_permutations(self):
        program = parse_prioritized("r1: a. r2: b. r3: c.")
        assert len(full_prioritizations(program)) == 6

    def test_permutation_filter(self):
        program = parse_prioritized("r1: a. r2: b. r3: c. r1 < r3. r2 < r3.")
        sequences = [tuple(o.sequence()) for o in full_prioritizations(program)]
        expected = [
            p
            for p in itertools.permutations(["r1", "r2", "r3"])
            if p.index("r1") < p.index("r3") and p.index("r2") < p.index("r3")
        ]
        assert sequences == sorted(expected)

    def test_members_refine_program_order(self, partial_order):
        for o in full_prioritizations(partial_order):
            assert o.is_total()
            assert close_pairs(partial_order.prefers) <= close_pairs(o.pairs)

    def test_limit(self, bird_penguin):
        with pytest.raises(ResourceLimitError):
            full_prioritizations(bird_penguin, limit=3)

    def test_empty_domain(self):
        assert list(linear_extensions([], [])) == [()]


class TestDistance:
    def test_example_distance(self):
        first = RuleOrder.linear(["a", "b", "c"])
        second = RuleOrder.linear(["c", "a", "b"])
        assert order_distance(first, second) == 2
        assert order_distance(second, first) == 2

    def test_identity_and_reverse(self):
        seq = ["r1", "r2", "r3", "r4"]
        assert sequence_distance(seq, seq) == 0
        assert sequence_distance(seq, list(reversed(seq))) == 6

    def test_domain_mismatch(self):
        with pytest.raises(ProgramError):
            order_distance(RuleOrder.linear("ab"), RuleOrder.linear("ac"))

    def test_partial_orders_rejected(self):
        with pytest.raises(ProgramError):
            order_distance(order(set(), "ab"), RuleOrder.linear("ab"))

    def test_count_inversions(self):
        assert count_inversions([]) == 0
        assert count_inversions([0, 1, 2]) == 0
        assert count_inversions([2, 1, 0]) == 3

    def test_metric_properties(self):
        rng = random.Random(5)
        for _ in range(1000):
            n = rng.randint(1, 7)
            items = [f"r{i}" for i in range(n)]
            x, y, z = (rng.sample(items, n) for _ in range(3))
            dxy = sequence_distance(x, y)
            assert sequence_distance(x, x) == 0
            assert dxy == sequence_distance(y, x)
            assert sequence_distance(x, z) <= dxy + sequence_distance(y, z)
            assert dxy == bubble_sort_swaps(x, y)

    def test_closest_extension_prefers_lexicographic(self):
        extensions = [("a", "b", "c"), ("b", "a", "c")]
        assert distance_to_extensions(("c", "a", "b"), extensions) == (2, ("a", "b", "c"))
        with pytest.raises(ProgramError):
            distance_to_extensions(("a",), [])
