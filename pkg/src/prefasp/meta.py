"""Meta-interpretation: fact representation, embedded meta-programs, projection."""

from __future__ import annotations

import logging
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from prefasp.config import ASSETS_DIR, DEFAULT_TIMEOUT
from prefasp.errors import DemangleError, ProgramError
from prefasp.grounder import GroundingStats, ground_with_stats
from prefasp.models import (
    ClassicalLiteral,
    Interpretation,
    PrioritizedProgram,
    sort_interpretations,
    sort_literals,
)
from prefasp.orders import transitive_reduction
from prefasp.parser import MetaAtom, MetaRule, NonGroundProgram, parse_meta, rule_id
from prefasp.solver import ObjectiveValue, SolverStats, optimal_answer_sets_with_stats, solve_with_stats

logger = logging.getLogger(__name__)

NEG_PREFIX = "neg__"
POS_PREFIX = "pos__"
_RESERVED_STARTS = ("neg_", "pos_")


def mangle(literal: ClassicalLiteral) -> str:
    """Meta-level constant naming an object-level literal.

    ``a`` stays ``a``, ``-a`` becomes ``neg__a``; atoms that already start with
    ``neg_`` or ``pos_`` are escaped as ``pos__a``.
    """
    if literal.atom.args:
        raise ProgramError(f"Only propositional literals can be represented, got {literal}")
    name = literal.atom.name
    if not literal.positive:
        return f"{NEG_PREFIX}{name}"
    if name.startswith(_RESERVED_STARTS):
        return f"{POS_PREFIX}{name}"
    return name


def demangle(constant: str) -> ClassicalLiteral:
    for prefix, positive in ((NEG_PREFIX, False), (POS_PREFIX, True)):
        if constant.startswith(prefix):
            name = constant[len(prefix):]
            if not name or (positive and not name.startswith(_RESERVED_STARTS)):
                raise DemangleError(f"Not a literal constant: {constant!r}")
            try:
                return ClassicalLiteral.of(name, positive=positive)
            except ValueError as exc:
                raise DemangleError(f"Not a literal constant: {constant!r}") from exc
    if constant.startswith(_RESERVED_STARTS):
        raise DemangleError(f"Not a literal constant: {constant!r}")
    try:
        return ClassicalLiteral.of(constant)
    except ValueError as exc:
        raise DemangleError(f"Not a literal constant: {constant!r}") from exc


def _fact(k: int, predicate: str, *terms: str) -> MetaRule:
    return MetaRule(id=rule_id(k), head=(MetaAtom(predicate=predicate, terms=terms),))


def emit_facts(program: PrioritizedProgram) -> NonGroundProgram:
    """F(P): rule/head/pbl/nbl per rule, compl per complementary pair, pr per reduced preference."""
    facts: list[MetaRule] = []

    def add(predicate: str, *terms: str) -> None:
        facts.append(_fact(len(facts) + 1, predicate, *terms))

    for rule in program.rules:
        add("rule", rule.id)
        for lit in sort_literals(rule.head):
            add("head", mangle(lit), rule.id)
        for lit in sort_literals(rule.pos_body):
            add("pbl", mangle(lit), rule.id)
        for lit in sort_literals(rule.neg_body):
            add("nbl", mangle(lit), rule.id)

    occurring = program.program.occurring_literals()
    for lit in sort_literals(occurring):
        if lit.positive and lit.complement() in occurring:
            add("compl", mangle(lit), mangle(lit.complement()))

    for higher, lower in sorted(transitive_reduction(program.order()).pairs):
        add("pr", higher, lower)

    logger.debug("Emitted %d facts for %d rules", len(facts), len(program.rules))
    return NonGroundProgram(rules=tuple(facts))


class MetaSemantics(str, Enum):
    PLAIN = "plain"
    B = "b"
    BGRAPH = "bgraph"
    W = "w"
    D = "d"
    WEAK = "weak"

    @property
    def assets(self) -> tuple[str, ...]:
        return _ASSETS[self]

    @property
    def projection(self) -> str:
        return "in_PAS" if self in (MetaSemantics.W, MetaSemantics.D) else "in_AS"

    @property
    def optimizing(self) -> bool:
        return self is MetaSemantics.WEAK


_ASSETS: dict[MetaSemantics, tuple[str, ...]] = {
    MetaSemantics.PLAIN: ("plain.lp",),
    MetaSemantics.B: ("plain.lp", "b.lp"),
    MetaSemantics.BGRAPH: ("plain.lp", "bgraph.lp"),
    MetaSemantics.W: ("w.lp",),
    MetaSemantics.D: ("d.lp",),
    MetaSemantics.WEAK: ("plain.lp", "weak.lp"),
}


class MetaOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    drop_redundant_constraint: bool = False


class MetaAssets:
    """Meta-program texts read from a directory of ``.lp`` files."""

    def __init__(self, assets_dir: Path | str | None = None) -> None:
        if assets_dir is None:
            assets_dir = ASSETS_DIR
        self.assets_dir = Path(assets_dir).expanduser().resolve()

    def text(self, semantics: MetaSemantics) -> str:
        parts = []
        for name in semantics.assets:
            path = self.assets_dir / name
            if not path.exists():
                raise ProgramError(f"Meta-program asset not found: {path}")
            parts.append(path.read_text(encoding="utf-8"))
        return "\n".join(parts)

    def program(self, semantics: MetaSemantics, options: MetaOptions | None = None) -> NonGroundProgram:
        program = parse_meta(self.text(semantics))
        if options is not None and options.drop_redundant_constraint and semantics is MetaSemantics.B:
            program = _drop_redundant_constraint(program)
        return program


def _is_redundant_constraint(rule: MetaRule) -> bool:
    return (
        rule.is_constraint
        and [a.predicate for a in rule.pos_body] == ["in_AS"]
        and [a.predicate for a in rule.neg_body] == ["in_CP"]
    )


def _drop_redundant_constraint(program: NonGroundProgram) -> NonGroundProgram:
    kept = tuple(r for r in program.rules if not _is_redundant_constraint(r))
    if len(kept) == len(program.rules):
        logger.warning("No redundant in_AS/in_CP constraint found to drop")
    return NonGroundProgram(rules=kept, weak_constraints=program.weak_constraints)


def meta_program(
    semantics: MetaSemantics,
    options: MetaOptions | None = None,
    assets_dir: Path | str | None = None,
) -> NonGroundProgram:
    return MetaAssets(assets_dir).program(MetaSemantics(semantics), options)


def project(answer_set: Interpretation, predicate: str) -> Interpretation:
    """Demangled arguments of the unary ``predicate`` atoms true in ``answer_set``."""
    return Interpretation.of(
        demangle(lit.atom.args[0])
        for lit in answer_set
        if lit.positive and lit.atom.name == predicate and len(lit.atom.args) == 1
    )


def order_atoms(answer_set: Interpretation, predicate: str = "pr") -> list[tuple[str, str]]:
    """Pairs (a, b) with ``predicate(a,b)`` true, sorted."""
    return sorted(
        (lit.atom.args[0], lit.atom.args[1])
        for lit in answer_set
        if lit.positive and lit.atom.name == predicate and len(lit.atom.args) == 2
    )


class MetaRun(BaseModel):
    """Outcome of one meta-interpretation run, raw and projected."""

    semantics: MetaSemantics
    projected: list[Interpretation]
    raw: list[Interpretation]
    objective: ObjectiveValue | None = None
    grounding: GroundingStats
    solver: SolverStats

    @property
    def raw_count(self) -> int:
        return len(self.raw)

    def witnesses(self, answer_set: Interpretation) -> list[Interpretation]:
        """Raw meta answer sets projecting onto ``answer_set``."""
        key = answer_set.key()
        return [r for r in self.raw if project(r, self.semantics.projection).key() == key]


def meta_solve_raw(
    program: PrioritizedProgram,
    semantics: MetaSemantics,
    options: MetaOptions | None = None,
    assets_dir: Path | str | None = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> MetaRun:
    semantics = MetaSemantics(semantics)
    combined = meta_program(semantics, options, assets_dir) + emit_facts(program)
    ground_program, grounding = ground_with_stats(combined)

    objective: ObjectiveValue | None = None
    if semantics.optimizing:
        scored, stats = optimal_answer_sets_with_stats(ground_program, timeout=timeout)
        raw = [a for a, _ in scored]
        if scored:
            objective = scored[0][1]
    else:
        raw, stats = solve_with_stats(ground_program, timeout=timeout)

    unique: dict[tuple[str, ...], Interpretation] = {}
    for answer_set in raw:
        projected = project(answer_set, semantics.projection)
        unique.setdefault(projected.key(), projected)
    logger.info(
        "Meta run %s: %d raw answer sets, %d after projection",
        semantics.value,
        len(raw),
        len(unique),
    )
    return MetaRun(
        semantics=semantics,
        projected=sort_interpretations(unique.values()),
        raw=sort_interpretations(raw),
        objective=objective,
        grounding=grounding,
        solver=stats,
    )


def meta_solve(
    program: PrioritizedProgram,
    semantics: MetaSemantics,
    options: MetaOptions | None = None,
    assets_dir: Path | str | None = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> list[Interpretation]:
    """Projected, demangled, deduplicated results of the meta-program for ``semantics``."""
    return meta_solve_raw(program, semantics, options, assets_dir, timeout).projected


def render_facts(program: PrioritizedProgram) -> str:
    lines = []
    for fact in emit_facts(program).rules:
        lines.append(f"{fact.head[0]}.")
    return "\n".join(lines) + ("\n" if lines else "")

