"""Tests for B-, W-, D- and weakly preferred answer sets."""

import random

import pytest

from prefasp.errors import NotAnAnswerSetError, ResourceLimitError
from prefasp.models import ClassicalLiteral, Interpretation, PrioritizedProgram, Program, RuleLabel
from prefasp.parser import parse_prioritized
from prefasp.preferences import (
    answer_sets_of,
    b_preferred_by_enumeration,
    bpas,
    cb_value,
    cd_value,
    cw_value,
    dpas,
    dual_reduct,
    full_order,
    is_b_preferred,
    is_b_preferred_total,
    is_d_preferred,
    is_w_preferred,
    label_rules,
    preference_graph,
    pvd,
    weakly_preferred,
    wpas,
)
from prefasp.validation import random_program

SEPARATION = """
r1: a.
r2: a :- not b.
r3: b.
r2 < r3.
"""


def sets(*items):
    return [Interpretation.of(i) for i in items]


@pytest.fixture
def separation():
    return parse_prioritized(SEPARATION)


@pytest.fixture
def empty_program():
    return PrioritizedProgram(program=Program())


class TestDualReduct:
    def test_bird_penguin(self, bird_penguin, a1):
        reduct = dual_reduct(bird_penguin, a1)
        assert reduct.origins == ("r1", "r2", "r3", "r4")
        assert all(r.is_prerequisite_free for r in reduct.rules)
        assert reduct.rules[2].neg_body == bird_penguin.program.rule("r3").neg_body

    def test_prerequisite_free_program_unchanged(self, no_preferred):
        reduct = dual_reduct(no_preferred, Interpretation())
        assert [r.shape() for r in reduct.rules] == [r.shape() for r in no_preferred.rules]

    def test_duplicates_keep_the_preferred_rule(self):
        program = parse_prioritized("r1: a :- not b.\nr2: a :- c, not b.\nr3: c.\nr2 < r1.\nr3 < r2.")
        reduct = dual_reduct(program, Interpretation.of(["a", "c"]))
        assert reduct.origins == ("r3", "r2")

    def test_rules_with_false_prerequisites_dropped(self, bird_penguin):
        reduct = dual_reduct(bird_penguin, Interpretation.of(["peng"]))
        assert reduct.origins == ("r1", "r2", "r3")


class TestCbValue:
    def test_preferred_answer_set_is_reproduced(self, bird_penguin, a1):
        trace = cb_value(dual_reduct(bird_penguin, a1), a1)
        assert trace.value == a1
        assert len(trace.stages) == 5
        assert trace.stages[-1] == a1

    def test_non_preferred_answer_set(self, bird_penguin, a1, a2):
        trace = cb_value(dual_reduct(bird_penguin, a2), a2)
        assert trace.value == a1

    def test_single_answer_set_example(self, no_preferred):
        s = Interpretation.of(["b"])
        assert cb_value(dual_reduct(no_preferred, s), s).value == Interpretation.of(["b", "c"])

    def test_inconsistent_sequence_gives_all_literals(self):
        program = parse_prioritized("r1: a.\nr2: -a.\nr1 < r2.")
        trace = cb_value(program, Interpretation())
        assert not trace.consistent
        assert trace.value.to_list() == ["-a", "a"]

    def test_subset_implies_equality(self):
        rng = random.Random(23)
        for _ in range(100):
            program = random_program(rng, prerequisite_free=True, fully_prioritized=True)
            for a in answer_sets_of(program):
                value = cb_value(dual_reduct(program, a), a).value
                assert (value <= a) == (value == a)


class TestFullOrder:
    def test_bird_penguin(self, bird_penguin, a1, a2):
        assert is_b_preferred(bird_penguin, a1)
        assert not is_b_preferred(bird_penguin, a2)

    def test_zombie_blocks(self, bird_penguin, a2):
        trace = full_order(bird_penguin, a2)
        assert not trace.accepted
        assert [r.removed for r in trace.rounds] == [["r1"], ["r2"]]
        assert trace.blocked == ["r3", "r4"]

    def test_partial_order_rounds(self, partial_order):
        a = Interpretation.of(["c", "-d"])
        trace = full_order(partial_order, a)
        assert trace.accepted
        assert [r.removed for r in trace.rounds] == [["r2"], ["r1", "r4"], ["r3"]]
        assert trace.rounds[1].labels == {"r1": RuleLabel.ZOMBIE, "r4": RuleLabel.IRRELEVANT}
        assert trace.rounds[0].added == ["c"]
        assert trace.rounds[2].working_set == ["-d", "c"]
        assert trace.witness.sequence() == ["r2", "r1", "r4", "r3"]
        assert is_b_preferred_total(partial_order, a, trace.witness.sequence())

    def test_single_rule(self):
        program = parse_prioritized("a.")
        trace = full_order(program, Interpretation.of(["a"]))
        assert trace.accepted
        assert len(trace.rounds) == 1

    def test_zombie_source_never_defeated(self, no_preferred):
        trace = full_order(no_preferred, Interpretation.of(["b"]))
        assert not trace.accepted
        assert trace.rounds == []
        assert trace.blocked == ["r1", "r2"]

    def test_no_preferred_in_violation_example(self, violation_degree):
        for a in answer_sets_of(violation_degree):
            assert not is_b_preferred(violation_degree, a)

    def test_requires_answer_set(self, bird_penguin):
        with pytest.raises(NotAnAnswerSetError):
            full_order(bird_penguin, Interpretation.of(["peng"]))

    def test_labels(self, bird_penguin, a2):
        labels = label_rules(bird_penguin, a2)
        assert labels == {
            "r1": RuleLabel.GENERATING,
            "r2": RuleLabel.GENERATING,
            "r3": RuleLabel.ZOMBIE,
            "r4": RuleLabel.GENERATING,
        }

    def test_preference_graph(self, bird_penguin, a2):
        graph = preference_graph(bird_penguin, a2)
        assert graph.sources() == ["r1"]
        assert graph.label("r3") is RuleLabel.ZOMBIE
        assert not graph.removable("r3")
        assert graph.remove(["r1"]) == [ClassicalLiteral.parse("peng")]
        assert graph.sources() == ["r2"]
        assert len(graph) == 3

    def test_trace_serialization(self, partial_order):
        data = full_order(partial_order, Interpretation.of(["c", "-d"])).to_dict()
        assert data["witness"] == ["r2", "r1", "r4", "r3"]
        assert data["rounds"][1]["labels"] == {"r1": "z", "r4": "i"}

    def test_agrees_with_enumeration(self):
        rng = random.Random(31)
        for _ in range(60):
            program = random_program(rng)
            for a in answer_sets_of(program):
                by_enumeration = b_preferred_by_enumeration(program, a) is not None
                assert full_order(program, a).accepted == by_enumeration

    def test_witness_is_confirming_full_prioritization(self, caplog):
        rng = random.Random(47)
        accepted = 0
        with caplog.at_level("WARNING", logger="prefasp.preferences"):
            for _ in range(60):
                program = random_program(rng)
                for a in answer_sets_of(program):
                    trace = full_order(program, a)
                    if not trace.accepted:
                        continue
                    accepted += 1
                    assert trace.witness.refines(program.order())
                    assert is_b_preferred_total(program, a, trace.witness.sequence())
        assert accepted > 0
        assert not caplog.records

    @pytest.mark.slow
    def test_agrees_with_enumeration_six_rules(self):
        rng = random.Random(37)
        for _ in range(200):
            program = random_program(rng, max_rules=6)
            for a in answer_sets_of(program):
                by_enumeration = b_preferred_by_enumeration(program, a) is not None
                assert full_order(program, a).accepted == by_enumeration

    def test_enumeration_limit(self, bird_penguin, a1):
        with pytest.raises(ResourceLimitError):
            b_preferred_by_enumeration(bird_penguin, a1, limit=2)


class TestWAndD:
    def test_cw_bird_penguin(self, bird_penguin, a1, a2):
        trace = cw_value(bird_penguin, a1)
        assert trace.value == a1
        assert trace.stages[1] == Interpretation.of(["peng"])
        assert trace.stages[2] == Interpretation.of(["peng", "bird"])
        assert is_w_preferred(bird_penguin, a1)
        assert not is_w_preferred(bird_penguin, a2)

    def test_cd_bird_penguin(self, bird_penguin, a1, a2):
        trace = cd_value(bird_penguin, a1)
        assert trace.value == a1
        assert "-flies@r3" in trace.to_dict()["origins"][-1]
        assert is_d_preferred(bird_penguin, a1)
        assert not is_d_preferred(bird_penguin, a2)

    def test_empty_program(self, empty_program):
        assert cw_value(empty_program, Interpretation()).value == Interpretation()
        assert cd_value(empty_program, Interpretation()).value == Interpretation()
        assert is_w_preferred(empty_program, Interpretation())
        assert is_d_preferred(empty_program, Interpretation())

    def test_violation_example_not_w_preferred(self, violation_degree):
        a = Interpretation.of(["c", "-d"])
        assert cw_value(violation_degree, a).value != a

    def test_separation(self, separation):
        a = Interpretation.of(["a", "b"])
        assert answer_sets_of(separation) == [a]
        assert cw_value(separation, a).value == a
        assert cd_value(separation, a).value == Interpretation.of(["a"])
        assert is_w_preferred(separation, a)
        assert not is_d_preferred(separation, a)
        assert is_b_preferred(separation, a)

    def test_requires_answer_set(self, bird_penguin):
        with pytest.raises(NotAnAnswerSetError):
            is_w_preferred(bird_penguin, Interpretation())


class TestSetLevel:
    def test_bird_penguin(self, bird_penguin, a1):
        assert bpas(bird_penguin) == [a1]
        assert wpas(bird_penguin) == [a1]
        assert dpas(bird_penguin) == [a1]

    def test_no_preferred(self, no_preferred):
        assert answer_sets_of(no_preferred) == sets(["b"])
        assert bpas(no_preferred) == []
        assert wpas(no_preferred) == []
        assert dpas(no_preferred) == []

    def test_hierarchy_on_random_programs(self):
        rng = random.Random(41)
        for _ in range(60):
            program = random_program(rng)
            b, w, d = (set(a.key() for a in f(program)) for f in (bpas, wpas, dpas))
            assert d <= w <= b


class TestViolationDegree:
    def test_violation_example(self, violation_degree):
        assert pvd(violation_degree, Interpretation.of(["a", "b"])).value == 2
        result = pvd(violation_degree, Interpretation.of(["c", "-d"]))
        assert result.value == 1
        assert result.disagreements == [("r1", "r2")]

    def test_preferred_answer_set_has_zero(self, bird_penguin, a1):
        result = pvd(bird_penguin, a1)
        assert result.value == 0
        assert result.prioritization == result.preferred_order

    def test_witness_orders(self, no_preferred):
        data = pvd(no_preferred, Interpretation.of(["b"])).to_dict()
        assert data == {
            "answer_set": ["b"],
            "pvd": 1,
            "full_prioritization": ["r1", "r2"],
            "preferred_order": ["r2", "r1"],
            "disagreements": [["r1", "r2"]],
        }

    def test_weakly_preferred(self, violation_degree, no_preferred, bird_penguin, a1):
        results = weakly_preferred(violation_degree)
        assert [(r.answer_set.to_list(), r.value) for r in results] == [(["-d", "c"], 1)]
        assert [(r.answer_set.to_list(), r.value) for r in weakly_preferred(no_preferred)] == [(["b"], 1)]
        assert [(r.answer_set, r.value) for r in weakly_preferred(bird_penguin)] == [(a1, 0)]

    def test_limit(self, bird_penguin, a1):
        with pytest.raises(ResourceLimitError):
            pvd(bird_penguin, a1, limit=3)
        with pytest.raises(ResourceLimitError):
            weakly_preferred(bird_penguin, limit=3)

    def test_requires_answer_set(self, bird_penguin):
        with pytest.raises(NotAnAnswerSetError):
            pvd(bird_penguin, Interpretation.of(["peng"]))

    def test_b_preferred_iff_zero(self):
        rng = random.Random(43)
        for _ in range(40):
            program = random_program(rng)
            for a in answer_sets_of(program):
                assert (pvd(program, a).value == 0) == is_b_preferred(program, a)
