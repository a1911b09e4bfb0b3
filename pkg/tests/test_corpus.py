"""Tests for the example corpus and its recorded results."""

import pytest

from prefasp.corpus import Corpus, CorpusEntry, Expected
from prefasp.meta import MetaSemantics, emit_facts, meta_solve
from prefasp.models import Interpretation
from prefasp.preferences import answer_sets_of, bpas, dpas, full_order, pvd, weakly_preferred, wpas
from prefasp.solver import answer_sets, is_answer_set, optimal_answer_sets, solve_with_stats

SHIPPED = Corpus().names()

NATIVE = {"b": bpas, "w": wpas, "d": dpas}
META = {"b": MetaSemantics.B, "w": MetaSemantics.W, "d": MetaSemantics.D, "weak": MetaSemantics.WEAK}


def entry(name):
    return Corpus().load(name)


@pytest.fixture
def corpus(tmp_path):
    return Corpus(tmp_path / "corpus")


class TestCorpusStorage:
    def test_shipped_names(self):
        assert SHIPPED == [
            "bird-penguin",
            "disjunction",
            "full-order",
            "no-preferred",
            "stratified",
            "violation-degree",
            "weak-constraints",
        ]

    def test_missing_entry(self, corpus):
        assert corpus.load("nothing") is None
        assert not corpus.exists("nothing")
        assert corpus.names() == []

    def test_save_and_load(self, corpus, texts):
        saved = CorpusEntry(
            name="np",
            description="swap costs one",
            source=texts["no-preferred"],
            expected=Expected(b=[], weak=[["b"]]),
        )
        path = corpus.save(saved)
        assert path.name == "np.lp"
        loaded = corpus.load("np")
        assert loaded.description == "swap costs one"
        assert loaded.expected.sets("weak") == [Interpretation.of(["b"])]
        assert loaded.expected.sets("b") == []
        assert loaded.expected.sets("w") is None
        assert loaded.prioritized().rule_ids == ["r1", "r2"]

    def test_name_from_file_stem(self, corpus):
        corpus.corpus_dir.mkdir(parents=True)
        (corpus.corpus_dir / "plain.lp").write_text("a.\n", encoding="utf-8")
        loaded = corpus.load("plain")
        assert loaded.name == "plain"
        assert loaded.kind == "prioritized"

    def test_unreadable_file_skipped(self, corpus, texts):
        corpus.save(CorpusEntry(name="good", source=texts["bird-penguin"]))
        (corpus.corpus_dir / "broken.lp").write_text("---\nname: [unclosed\n---\na.\n", encoding="utf-8")
        assert [e.name for e in corpus.list_all()] == ["good"]
        assert corpus.names() == ["broken", "good"]

    def test_ground_entry_program(self, corpus, texts):
        corpus.save(CorpusEntry(name="dis", kind="ground", source=texts["disjunction"]))
        program = corpus.load("dis").program()
        assert len(program.rules) == 3

    def test_to_dict(self):
        data = entry("bird-penguin").to_dict()
        assert data["name"] == "bird-penguin"
        assert data["kind"] == "prioritized"
        assert data["path"].endswith("bird-penguin.lp")


@pytest.mark.parametrize("name", SHIPPED)
class TestShippedResults:
    def test_answer_sets(self, name):
        e = entry(name)
        expected = e.expected.sets("answer_sets")
        if expected is not None:
            assert answer_sets(e.program()) == expected

    def test_native_preferred(self, name):
        e = entry(name)
        if not e.is_prioritized:
            pytest.skip("ground program")
        program = e.prioritized()
        for key, compute in NATIVE.items():
            expected = e.expected.sets(key)
            if expected is not None:
                assert compute(program) == expected, key
        expected = e.expected.sets("weak")
        if expected is not None:
            assert [r.answer_set for r in weakly_preferred(program)] == expected

    def test_meta_preferred(self, name):
        e = entry(name)
        if not e.is_prioritized:
            pytest.skip("ground program")
        program = e.prioritized()
        for key, semantics in META.items():
            expected = e.expected.sets(key)
            if expected is None:
                continue
            found = meta_solve(program, semantics)
            if key in ("w", "d"):
                found = [s for s in found if is_answer_set(program.program, s)]
            assert found == expected, key

    def test_violation_degrees(self, name):
        e = entry(name)
        for recorded in e.expected.pvd:
            result = pvd(e.prioritized(), Interpretation.of(recorded.answer_set))
            assert result.value == recorded.pvd
            if recorded.disagreements is not None:
                assert [list(p) for p in result.disagreements] == recorded.disagreements

    def test_optimal(self, name):
        e = entry(name)
        if e.expected.optimal:
            found = optimal_answer_sets(e.program())
            assert [(a.to_list(), v.value) for a, v in found] == [
                (o.answer_set, o.value) for o in e.expected.optimal
            ]

    def test_full_order(self, name):
        e = entry(name)
        for recorded in e.expected.full_order:
            trace = full_order(e.prioritized(), Interpretation.of(recorded.answer_set))
            assert trace.accepted == recorded.accepted
            assert [r.removed for r in trace.rounds] == recorded.rounds

    def test_facts(self, name):
        e = entry(name)
        if e.expected.facts is not None:
            assert [str(r.head[0]) for r in emit_facts(e.prioritized()).rules] == e.expected.facts

    def test_stratified_without_search(self, name):
        e = entry(name)
        if not e.stratified:
            pytest.skip("not stratified")
        found, stats = solve_with_stats(e.program())
        assert stats.stratified
        assert stats.choices == 0
        assert found == e.expected.sets("answer_sets")


def test_answer_sets_of_matches_solver():
    e = entry("bird-penguin")
    assert answer_sets_of(e.prioritized()) == answer_sets(e.program())
