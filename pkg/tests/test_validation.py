"""Tests for cross-validation of native and meta results."""

import pytest

from prefasp.meta import MetaOptions, MetaSemantics
from prefasp.models import Interpretation
from prefasp.validation import (
    bijection_holds,
    cross_validate,
    hierarchy_violations,
    native_result,
    random_programs,
    summarize,
    validate_program,
)


class TestCrossValidate:
    @pytest.mark.parametrize("semantics", list(MetaSemantics))
    def test_bird_penguin(self, bird_penguin, semantics):
        report = cross_validate(bird_penguin, semantics, program_id="bird-penguin")
        assert report.agree, report.to_dict()
        assert report.raw_count >= len(report.meta)

    @pytest.mark.parametrize("semantics", list(MetaSemantics))
    def test_no_preferred(self, no_preferred, semantics):
        assert cross_validate(no_preferred, semantics).agree

    def test_native_results(self, no_preferred):
        assert native_result(no_preferred, MetaSemantics.PLAIN) == [Interpretation.of(["b"])]
        assert native_result(no_preferred, MetaSemantics.BGRAPH) == []
        assert native_result(no_preferred, MetaSemantics.WEAK) == [Interpretation.of(["b"])]

    def test_report_serialization(self, bird_penguin):
        report = cross_validate(bird_penguin, MetaSemantics.B, program_id="bp")
        data = report.to_dict()
        assert data["program"] == "bp"
        assert data["semantics"] == "b"
        assert data["agree"] is True
        assert data["native"] == [["-flies", "bird", "peng"]]
        assert "native_seconds" not in data
        assert "meta_seconds" in report.to_dict(timings=True)

    def test_reduced_b_program(self, bird_penguin):
        options = MetaOptions(drop_redundant_constraint=True)
        assert cross_validate(bird_penguin, MetaSemantics.B, options=options).agree

    def test_validate_program_covers_all_semantics(self, violation_degree):
        reports = validate_program(violation_degree, program_id="vd")
        assert [r.semantics for r in reports] == list(MetaSemantics)
        assert all(r.agree for r in reports)

    def test_selected_semantics(self, bird_penguin):
        reports = validate_program(bird_penguin, semantics=[MetaSemantics.W])
        assert len(reports) == 1


class TestProperties:
    def test_hierarchy(self, bird_penguin, violation_degree, partial_order):
        for program in (bird_penguin, violation_degree, partial_order):
            assert hierarchy_violations(program) == []

    def test_bijection(self, bird_penguin, no_preferred):
        assert bijection_holds(bird_penguin)
        assert bijection_holds(no_preferred)


class TestRandomPrograms:
    def test_ids_and_determinism(self):
        first = list(random_programs(3, seed=7))
        second = list(random_programs(3, seed=7))
        assert [i for i, _ in first] == ["random-7-0000", "random-7-0001", "random-7-0002"]
        assert [p for _, p in first] == [p for _, p in second]

    def test_generator_options(self):
        for _, program in random_programs(20, seed=5, prerequisite_free=True, fully_prioritized=True):
            assert program.is_fully_prioritized
            assert all(r.is_prerequisite_free for r in program.rules)

    def test_small_run_agrees(self):
        reports = []
        for program_id, program in random_programs(10, seed=7, max_rules=4, max_atoms=3):
            reports.extend(
                validate_program(
                    program,
                    program_id,
                    semantics=[MetaSemantics.PLAIN, MetaSemantics.B, MetaSemantics.W, MetaSemantics.D],
                )
            )
            assert hierarchy_violations(program) == []
            assert bijection_holds(program)
        summary = summarize(reports)
        assert summary["reports"] == 40
        assert summary["disagreements"] == 0

    @pytest.mark.slow
    def test_full_run_agrees(self):
        reports = []
        for program_id, program in random_programs(200, seed=7):
            reports.extend(validate_program(program, program_id))
            assert hierarchy_violations(program) == []
            assert bijection_holds(program)
        assert summarize(reports)["disagreements"] == 0


def test_summarize(bird_penguin):
    reports = [
        cross_validate(bird_penguin, MetaSemantics.PLAIN),
        cross_validate(bird_penguin, MetaSemantics.B),
    ]
    assert summarize(reports) == {
        "reports": 2,
        "disagreements": 0,
        "by_semantics": {"plain": {"agree": 1, "disagree": 0}, "b": {"agree": 1, "disagree": 0}},
    }
