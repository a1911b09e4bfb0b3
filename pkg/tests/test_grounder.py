"""Tests for grounding and dependency analysis."""

from prefasp.grounder import (
    dependency_graph,
    from_program,
    ground,
    ground_with_stats,
    herbrand_universe,
    is_stratified,
    is_tight,
    possible_atoms,
    representation_restriction,
)
from prefasp.meta import MetaSemantics, emit_facts, meta_program
from prefasp.models import ClassicalLiteral, render_program
from prefasp.parser import parse_meta, parse_program


def heads(program):
    return sorted(str(next(iter(r.head))) for r in program.rules if r.head)


class TestHerbrandUniverse:
    def test_forced_constant(self):
        assert herbrand_universe(parse_meta("p(X) :- q(X).")) == ["u0"]

    def test_facts(self):
        assert herbrand_universe(parse_meta("q(a). q(b).")) == ["a", "b"]

    def test_meta_program_constants(self, bird_penguin):
        combined = meta_program(MetaSemantics.B) + emit_facts(bird_penguin)
        assert herbrand_universe(combined) == [
            "bird",
            "flies",
            "neg__flies",
            "peng",
            "r1",
            "r2",
            "r3",
            "r4",
        ]


class TestGround:
    def test_inequality_drops_reflexive_instances(self):
        program = parse_meta("rule(r1). rule(r2).\npr(X,Y) v pr(Y,X) :- rule(X), rule(Y), X != Y.")
        ground_program, stats = ground_with_stats(program)
        disjunctive = [r for r in ground_program.rules if len(r.head) == 2]
        # both instances share one head set
        assert len(disjunctive) == 1
        assert stats.duplicates_removed == 1

    def test_ground_program_unchanged(self, disjunction):
        again = ground(disjunction)
        assert [r.shape() for r in again.rules] == [r.shape() for r in disjunction.rules]
        assert [r.id for r in again.rules] == disjunction.rule_ids

    def test_strict_comparison_over_stages(self):
        program = parse_meta(
            "stage(s1). stage(s2). r(x).\nlater(R,S1) :- r(R), stage(S), stage(S1), S < S1."
        )
        result = heads(ground(program))
        assert "later(x,s2)" in result
        assert "later(x,s1)" not in result

    def test_relevance_matches_naive_on_answer_relevant_rules(self):
        program = parse_meta("q(a). q(b). r(a).\np(X) :- q(X), not r(X).\ns(X) :- p(X), r(X).")
        relevant = ground(program)
        naive = ground(program, relevance=False)
        assert len(relevant.rules) < len(naive.rules)
        assert set(heads(relevant)) <= set(heads(naive))

    def test_stats(self):
        program = parse_meta("rule(r1). rule(r2).\npr(X,Y) :- rule(X), rule(Y), X != Y.")
        _, stats = ground_with_stats(program, relevance=False)
        assert stats.universe_size == 2
        assert stats.builtin_pruned == 2
        assert stats.ground_rules == 4

    def test_duplicates_removed(self):
        _, stats = ground_with_stats(parse_meta("a. a."))
        assert stats.ground_rules == 1
        assert stats.duplicates_removed == 1

    def test_weak_constraints_instantiated(self):
        program = parse_meta("p(a). p(b).\n:~ p(X). [2:1]")
        ground_program = ground(program)
        assert len(ground_program.weak_constraints) == 2
        assert all(w.weight == 2 for w in ground_program.weak_constraints)

    def test_plain_interpreter_dump_reparses(self, bird_penguin):
        combined = meta_program(MetaSemantics.PLAIN) + emit_facts(bird_penguin)
        dump = render_program(ground(combined), with_labels=False)
        reparsed = parse_program(dump)
        assert len(reparsed.rules) == len(ground(combined).rules)


class TestPossibleAtoms:
    def test_negation_ignored(self):
        atoms = possible_atoms(parse_meta("a :- not b.\nc :- d."))
        assert ("a", (), True) in atoms
        assert ("c", (), True) not in atoms

    def test_disjunction_keeps_every_head(self):
        atoms = possible_atoms(parse_meta("a v b.\nc :- b."))
        assert ("c", (), True) in atoms


class TestDependencies:
    def test_graph_edges(self):
        graph = dependency_graph(parse_program("a :- b, not c."))
        assert graph["a"]["b"]["positive"]
        assert graph["a"]["c"]["negative"]
        assert not graph["a"]["c"]["positive"]

    def test_stratified(self):
        assert is_stratified(parse_program("a. b :- a, not c. c :- not a."))
        assert not is_stratified(parse_program("a :- not b. b :- not a."))

    def test_non_ground_stratification(self):
        assert is_stratified(parse_meta("p(X) :- q(X), not r(X). q(a)."))
        assert not is_stratified(parse_meta("p(X) :- q(X), not p(X). q(a)."))

    def test_tight(self):
        assert is_tight(parse_program("a :- not b. b :- not a."))
        assert not is_tight(parse_program("a :- b. b :- a."))

    def test_representation_restriction(self):
        program = parse_program("p :- f, not g. q :- not f. r :- h.")
        facts = parse_program("f.")
        kept = representation_restriction(program, facts)
        assert [str(next(iter(r.head))) for r in kept.rules] == ["p", "r"]

    def test_from_program_round_trip(self, weak_program):
        assert ground(from_program(weak_program)).weak_constraints == weak_program.weak_constraints


def test_instantiated_heads_are_literals():
    program = ground(parse_meta("p(a). q(X) :- p(X)."))
    literal = ClassicalLiteral.of("q", "a")
    assert literal in {next(iter(r.head)) for r in program.rules}
