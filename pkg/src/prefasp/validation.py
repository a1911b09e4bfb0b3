"""Differential checks between the native semantics and the meta-programs."""

from __future__ import annotations

import logging
import random
import time
from pathlib import Path
from typing import Iterator

from pydantic import BaseModel, Field

from prefasp.config import (
    DEFAULT_PVD_LIMIT,
    DEFAULT_RANDOM_PROGRAMS,
    DEFAULT_SEED,
    DEFAULT_TIMEOUT,
    RANDOM_MAX_ATOMS,
    RANDOM_MAX_RULES,
)
from prefasp.meta import MetaOptions, MetaSemantics, meta_solve_raw
from prefasp.models import (
    ClassicalLiteral,
    Interpretation,
    PrioritizedProgram,
    Program,
    Rule,
    sort_interpretations,
)
from prefasp.parser import rule_id
from prefasp.preferences import (
    answer_sets_of,
    bpas,
    dpas,
    is_b_preferred,
    is_d_preferred,
    is_w_preferred,
    weakly_preferred,
    wpas,
)
from prefasp.solver import is_answer_set

logger = logging.getLogger(__name__)

ATOM_NAMES = "abcdefghij"


class CrossValidationReport(BaseModel):
    program_id: str = ""
    semantics: MetaSemantics
    native: list[Interpretation] = Field(default_factory=list)
    meta: list[Interpretation] = Field(default_factory=list)
    only_native: list[Interpretation] = Field(default_factory=list)
    only_meta: list[Interpretation] = Field(default_factory=list)
    non_answer_sets: list[Interpretation] = Field(default_factory=list)
    raw_count: int = 0
    native_seconds: float = 0.0
    meta_seconds: float = 0.0

    @property
    def agree(self) -> bool:
        return not self.only_native and not self.only_meta

    def to_dict(self, timings: bool = False) -> dict:
        data = {
            "program": self.program_id,
            "semantics": self.semantics.value,
            "agree": self.agree,
            "native": [a.to_list() for a in self.native],
            "meta": [a.to_list() for a in self.meta],
            "only_native": [a.to_list() for a in self.only_native],
            "only_meta": [a.to_list() for a in self.only_meta],
            "non_answer_sets": [a.to_list() for a in self.non_answer_sets],
            "raw_count": self.raw_count,
        }
        if timings:
            data["native_seconds"] = round(self.native_seconds, 3)
            data["meta_seconds"] = round(self.meta_seconds, 3)
        return data


def native_result(
    program: PrioritizedProgram,
    semantics: MetaSemantics,
    pvd_limit: int = DEFAULT_PVD_LIMIT,
    timeout: float = DEFAULT_TIMEOUT,
) -> list[Interpretation]:
    """The set the meta-program for ``semantics`` is expected to reproduce."""
    semantics = MetaSemantics(semantics)
    if semantics is MetaSemantics.PLAIN:
        return answer_sets_of(program, timeout)
    if semantics in (MetaSemantics.B, MetaSemantics.BGRAPH):
        return bpas(program, timeout)
    if semantics is MetaSemantics.W:
        return wpas(program, timeout)
    if semantics is MetaSemantics.D:
        return dpas(program, timeout)
    results = weakly_preferred(program, limit=pvd_limit, timeout=timeout)
    return sort_interpretations(r.answer_set for r in results)


def cross_validate(
    program: PrioritizedProgram,
    semantics: MetaSemantics,
    program_id: str = "",
    options: MetaOptions | None = None,
    assets_dir: Path | str | None = None,
    pvd_limit: int = DEFAULT_PVD_LIMIT,
    timeout: float = DEFAULT_TIMEOUT,
) -> CrossValidationReport:
    semantics = MetaSemantics(semantics)

    started = time.perf_counter()
    native = native_result(program, semantics, pvd_limit=pvd_limit, timeout=timeout)
    native_seconds = time.perf_counter() - started

    started = time.perf_counter()
    run = meta_solve_raw(program, semantics, options, assets_dir, timeout)
    meta_seconds = time.perf_counter() - started

    meta = run.projected
    non_answer_sets: list[Interpretation] = []
    if semantics in (MetaSemantics.W, MetaSemantics.D):
        # W and D fixpoints need not be answer sets
        non_answer_sets = [s for s in meta if not is_answer_set(program.program, s)]
        meta = [s for s in meta if s not in non_answer_sets]

    native_keys = {a.key() for a in native}
    meta_keys = {a.key() for a in meta}
    report = CrossValidationReport(
        program_id=program_id,
        semantics=semantics,
        native=native,
        meta=meta,
        only_native=[a for a in native if a.key() not in meta_keys],
        only_meta=[a for a in meta if a.key() not in native_keys],
        non_answer_sets=non_answer_sets,
        raw_count=run.raw_count,
        native_seconds=native_seconds,
        meta_seconds=meta_seconds,
    )
    if report.agree:
        logger.info("%s [%s]: %d set(s) agree", program_id or "program", semantics.value, len(native))
    else:
        logger.warning(
            "%s [%s]: native and meta results differ (native only: %s, meta only: %s)",
            program_id or "program",
            semantics.value,
            [a.render() for a in report.only_native],
            [a.render() for a in report.only_meta],
        )
    return report


def validate_program(
    program: PrioritizedProgram,
    program_id: str = "",
    semantics: list[MetaSemantics] | None = None,
    options: MetaOptions | None = None,
    assets_dir: Path | str | None = None,
    pvd_limit: int = DEFAULT_PVD_LIMIT,
    timeout: float = DEFAULT_TIMEOUT,
) -> list[CrossValidationReport]:
    """One report per semantics, all six by default."""
    selected = semantics or list(MetaSemantics)
    return [
        cross_validate(
            program,
            s,
            program_id=program_id,
            options=options,
            assets_dir=assets_dir,
            pvd_limit=pvd_limit,
            timeout=timeout,
        )
        for s in selected
    ]


def hierarchy_violations(program: PrioritizedProgram, timeout: float = DEFAULT_TIMEOUT) -> list[str]:
    """Answer sets breaking DPAS ⊆ WPAS ⊆ BPAS ⊆ AS, as messages."""
    problems = []
    for a in answer_sets_of(program, timeout):
        d, w, b = is_d_preferred(program, a), is_w_preferred(program, a), is_b_preferred(program, a)
        if d and not w:
            problems.append(f"{a.render()} is D-preferred but not W-preferred")
        if w and not b:
            problems.append(f"{a.render()} is W-preferred but not B-preferred")
    return problems


def bijection_holds(program: PrioritizedProgram, timeout: float = DEFAULT_TIMEOUT) -> bool:
    """Meta answer sets of the plain interpreter correspond one-to-one to answer sets."""
    run = meta_solve_raw(program, MetaSemantics.PLAIN, timeout=timeout)
    native = answer_sets_of(program, timeout)
    return (
        run.raw_count == len(native)
        and len(run.projected) == run.raw_count
        and {a.key() for a in run.projected} == {a.key() for a in native}
    )


def _random_literal(rng: random.Random, atoms: str, negation: float) -> ClassicalLiteral:
    return ClassicalLiteral.of(rng.choice(atoms), positive=rng.random() >= negation)


def random_program(
    rng: random.Random,
    max_rules: int = RANDOM_MAX_RULES,
    max_atoms: int = RANDOM_MAX_ATOMS,
    preference_density: float = 0.3,
    prerequisite_free: bool = False,
    fully_prioritized: bool = False,
) -> PrioritizedProgram:
    """A random normal prioritized program over the first ``max_atoms`` letters."""
    atoms = ATOM_NAMES[:max_atoms]
    rules = []
    for k in range(1, rng.randint(1, max_rules) + 1):
        head = _random_literal(rng, atoms, 0.25)
        pos = set()
        if not prerequisite_free:
            pos = {_random_literal(rng, atoms, 0.25) for _ in range(rng.randint(0, 2))}
        neg = {_random_literal(rng, atoms, 0.25) for _ in range(rng.randint(0, 2))}
        rules.append(
            Rule(id=rule_id(k), head=frozenset({head}), pos_body=frozenset(pos), neg_body=frozenset(neg))
        )
    ids = [r.id for r in rules]
    rng.shuffle(ids)
    if fully_prioritized:
        prefers = {(ids[i], ids[i + 1]) for i in range(len(ids) - 1)}
    else:
        prefers = {
            (ids[i], ids[j])
            for i in range(len(ids))
            for j in range(i + 1, len(ids))
            if rng.random() < preference_density
        }
    return PrioritizedProgram(program=Program(rules=tuple(rules)), prefers=frozenset(prefers))


def random_programs(
    count: int = DEFAULT_RANDOM_PROGRAMS, seed: int = DEFAULT_SEED, **kwargs
) -> Iterator[tuple[str, PrioritizedProgram]]:
    """``count`` programs from one seeded generator, named ``random-<seed>-<i>``."""
    rng = random.Random(seed)
    for i in range(count):
        yield f"random-{seed}-{i:04d}", random_program(rng, **kwargs)


def summarize(reports: list[CrossValidationReport]) -> dict:
    by_semantics: dict[str, dict[str, int]] = {}
    for r in reports:
        entry = by_semantics.setdefault(r.semantics.value, {"agree": 0, "disagree": 0})
        entry["agree" if r.agree else "disagree"] += 1
    return {
        "reports": len(reports),
        "disagreements": sum(1 for r in reports if not r.agree),
        "by_semantics": by_semantics,
    }
