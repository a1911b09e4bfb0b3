"""Domain models for prioritized logic programs."""

from __future__ import annotations

import re
from enum import Enum
from typing import Any, Iterable, Iterator

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

IDENTIFIER = re.compile(r"^[a-z][A-Za-z0-9_]*$")


class RuleLabel(str, Enum):
    GENERATING = "g"
    ZOMBIE = "z"
    IRRELEVANT = "i"


class SourceSpan(BaseModel):
    model_config = ConfigDict(frozen=True)

    line: int = Field(ge=1)
    column: int = Field(ge=1)
    start: int = Field(default=0, ge=0)
    end: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_order(self) -> SourceSpan:
        if self.end < self.start:
            raise ValueError("span end precedes start")
        return self


class Atom(BaseModel):
    """A predicate applied to constants; propositional atoms have no args."""

    model_config = ConfigDict(frozen=True)

    name: str
    args: tuple[str, ...] = ()

    @field_validator("name")
    @classmethod
    def validate_name(cls, v: str) -> str:
        if not IDENTIFIER.match(v):
            raise ValueError(f"Invalid atom name: {v!r}")
        return v

    @field_validator("args")
    @classmethod
    def validate_args(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        for arg in v:
            if not IDENTIFIER.match(arg):
                raise ValueError(f"Invalid constant: {arg!r}")
        return v

    def __str__(self) -> str:
        if self.args:
            return f"{self.name}({','.join(self.args)})"
        return self.name

    def __lt__(self, other: Atom) -> bool:
        return str(self) < str(other)


class ClassicalLiteral(BaseModel):
    model_config = ConfigDict(frozen=True)

    atom: Atom
    positive: bool = True

    @classmethod
    def of(cls, name: str, *args: str, positive: bool = True) -> ClassicalLiteral:
        return cls(atom=Atom(name=name, args=tuple(args)), positive=positive)

    @classmethod
    def parse(cls, text: str) -> ClassicalLiteral:
        """Build a propositional literal from "a" or "-a"."""
        text = text.strip()
        if text.startswith("-"):
            return cls.of(text[1:], positive=False)
        return cls.of(text)

    def complement(self) -> ClassicalLiteral:
        return ClassicalLiteral(atom=self.atom, positive=not self.positive)

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"-{self.atom}"

    def __lt__(self, other: ClassicalLiteral) -> bool:
        return str(self) < str(other)


def complement(literal: ClassicalLiteral) -> ClassicalLiteral:
    return literal.complement()


def sort_literals(literals: Iterable[ClassicalLiteral]) -> list[ClassicalLiteral]:
    return sorted(literals, key=str)


class Rule(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    head: frozenset[ClassicalLiteral] = frozenset()
    pos_body: frozenset[ClassicalLiteral] = frozenset()
    neg_body: frozenset[ClassicalLiteral] = frozenset()

    @field_validator("id")
    @classmethod
    def validate_id(cls, v: str) -> str:
        if not v:
            raise ValueError("Rule id cannot be empty")
        return v

    @property
    def is_fact(self) -> bool:
        return len(self.head) == 1 and not self.pos_body and not self.neg_body

    @property
    def is_constraint(self) -> bool:
        return not self.head

    @property
    def is_normal(self) -> bool:
        return len(self.head) <= 1

    @property
    def is_prerequisite_free(self) -> bool:
        return not self.pos_body

    @property
    def head_literal(self) -> ClassicalLiteral:
        """The single head literal of a normal, non-constraint rule."""
        if len(self.head) != 1:
            raise ValueError(f"Rule {self.id} does not have a single head literal")
        return next(iter(self.head))

    def defeated_by(self, literals: Iterable[ClassicalLiteral]) -> bool:
        return not self.neg_body.isdisjoint(literals)

    def shape(self) -> tuple[frozenset, frozenset, frozenset]:
        return (self.head, self.pos_body, self.neg_body)


class WeakConstraint(BaseModel):
    model_config = ConfigDict(frozen=True)

    pos_body: frozenset[ClassicalLiteral] = frozenset()
    neg_body: frozenset[ClassicalLiteral] = frozenset()
    weight: int = Field(default=1, ge=1)
    level: int = Field(default=1, ge=1)

    def violated_by(self, literals: frozenset[ClassicalLiteral] | set[ClassicalLiteral]) -> bool:
        return self.pos_body <= literals and self.neg_body.isdisjoint(literals)


class Program(BaseModel):
    model_config = ConfigDict(frozen=True)

    rules: tuple[Rule, ...] = ()
    weak_constraints: tuple[WeakConstraint, ...] = ()

    @field_validator("rules")
    @classmethod
    def validate_unique_ids(cls, v: tuple[Rule, ...]) -> tuple[Rule, ...]:
        seen: set[str] = set()
        for rule in v:
            if rule.id in seen:
                raise ValueError(f"Duplicate rule id: {rule.id}")
            seen.add(rule.id)
        return v

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[Rule]:  # type: ignore[override]
        return iter(self.rules)

    @property
    def rule_ids(self) -> list[str]:
        return [r.id for r in self.rules]

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    @property
    def is_normal(self) -> bool:
        return all(r.is_normal for r in self.rules)

    @property
    def is_positive(self) -> bool:
        return all(not r.neg_body for r in self.rules)

    def atoms(self) -> set[Atom]:
        found: set[Atom] = set()
        for r in self.rules:
            for lit in r.head | r.pos_body | r.neg_body:
                found.add(lit.atom)
        for wc in self.weak_constraints:
            for lit in wc.pos_body | wc.neg_body:
                found.add(lit.atom)
        return found

    def literals(self) -> frozenset[ClassicalLiteral]:
        """B_P: every literal over an occurring atom, plus complements."""
        result: set[ClassicalLiteral] = set()
        for atom in self.atoms():
            result.add(ClassicalLiteral(atom=atom, positive=True))
            result.add(ClassicalLiteral(atom=atom, positive=False))
        return frozenset(result)

    def occurring_literals(self) -> frozenset[ClassicalLiteral]:
        result: set[ClassicalLiteral] = set()
        for r in self.rules:
            result |= r.head | r.pos_body | r.neg_body
        for wc in self.weak_constraints:
            result |= wc.pos_body | wc.neg_body
        return frozenset(result)

    def without_weak_constraints(self) -> Program:
        return Program(rules=self.rules)


class PrioritizedProgram(BaseModel):
    """A normal program with a strict partial order on its rules.

    A pair ``(a, b)`` in ``prefers`` means rule ``a`` has higher priority.
    """

    model_config = ConfigDict(frozen=True)

    program: Program
    prefers: frozenset[tuple[str, str]] = frozenset()

    @model_validator(mode="after")
    def validate_prioritized(self) -> PrioritizedProgram:
        from prefasp.orders import close_pairs

        if self.program.weak_constraints:
            raise ValueError("Prioritized programs cannot contain weak constraints")
        for r in self.program.rules:
            if len(r.head) != 1:
                raise ValueError(f"Rule {r.id} is not a normal rule with a single head")
        ids = set(self.program.rule_ids)
        for a, b in self.prefers:
            if a not in ids or b not in ids:
                raise ValueError(f"Preference {a} < {b} refers to an unknown rule")
        closure = close_pairs(self.prefers)
        for a, b in closure:
            if a == b:
                raise ValueError(f"Cyclic preference through rule {a}")
        return self

    @property
    def rules(self) -> tuple[Rule, ...]:
        return self.program.rules

    @property
    def rule_ids(self) -> list[str]:
        return self.program.rule_ids

    def order(self) -> RuleOrder:
        return RuleOrder(pairs=self.prefers, domain=frozenset(self.rule_ids))

    def with_order(self, order: RuleOrder) -> PrioritizedProgram:
        return PrioritizedProgram(program=self.program, prefers=order.pairs)

    @property
    def is_fully_prioritized(self) -> bool:
        return self.order().is_total()

    @property
    def is_prerequisite_free(self) -> bool:
        return all(r.is_prerequisite_free for r in self.program.rules)


class Interpretation(BaseModel):
    model_config = ConfigDict(frozen=True)

    literals: frozenset[ClassicalLiteral] = frozenset()

    @classmethod
    def of(cls, literals: Iterable[ClassicalLiteral | str]) -> Interpretation:
        """Build from literals or propositional texts like "-flies"."""
        items = [
            ClassicalLiteral.parse(x) if isinstance(x, str) else x for x in literals
        ]
        return cls(literals=frozenset(items))

    def is_consistent(self) -> bool:
        return all(lit.complement() not in self.literals for lit in self.literals)

    def sorted(self) -> list[ClassicalLiteral]:
        return sort_literals(self.literals)

    def key(self) -> tuple[str, ...]:
        return tuple(str(lit) for lit in self.sorted())

    def render(self) -> str:
        return "{" + ", ".join(self.key()) + "}"

    def to_list(self) -> list[str]:
        return list(self.key())

    def __contains__(self, literal: object) -> bool:
        return literal in self.literals

    def __iter__(self) -> Iterator[ClassicalLiteral]:  # type: ignore[override]
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self.literals)

    def __le__(self, other: Interpretation) -> bool:
        return self.literals <= other.literals

    def __lt__(self, other: Interpretation) -> bool:
        return self.literals < other.literals

    def __str__(self) -> str:
        return self.render()


def is_consistent(interpretation: Interpretation) -> bool:
    return interpretation.is_consistent()


def sort_interpretations(items: Iterable[Interpretation]) -> list[Interpretation]:
    return sorted(items, key=lambda i: i.key())


class RuleOrder(BaseModel):
    """A strict order on rule identifiers; ``(a, b)`` reads ``a < b``."""

    model_config = ConfigDict(frozen=True)

    pairs: frozenset[tuple[str, str]] = frozenset()
    domain: frozenset[str] = frozenset()
    total: bool = False

    @model_validator(mode="after")
    def validate_order(self) -> RuleOrder:
        from prefasp.orders import close_pairs

        for a, b in self.pairs:
            if a not in self.domain or b not in self.domain:
                raise ValueError(f"Pair ({a}, {b}) outside the order's domain")
        closure = close_pairs(self.pairs)
        if any(a == b for a, b in closure):
            raise ValueError("Order is cyclic")
        if self.total:
            n = len(self.domain)
            if len(closure) != n * (n - 1) // 2:
                raise ValueError("Order marked total does not compare every pair")
        return self

    @classmethod
    def linear(cls, sequence: Iterable[str]) -> RuleOrder:
        """The total order listing ``sequence`` from highest to lowest priority."""
        seq = list(sequence)
        pairs = frozenset(
            (seq[i], seq[j]) for i in range(len(seq)) for j in range(i + 1, len(seq))
        )
        return cls(pairs=pairs, domain=frozenset(seq), total=True)

    def is_total(self) -> bool:
        from prefasp.orders import close_pairs

        n = len(self.domain)
        return len(close_pairs(self.pairs)) == n * (n - 1) // 2

    def sequence(self) -> list[str]:
        """Elements of a total order from highest to lowest priority."""
        from prefasp.orders import close_pairs

        closure = close_pairs(self.pairs)
        above = {x: 0 for x in self.domain}
        for a, _ in closure:
            above[a] += 1
        if sorted(above.values()) != list(range(len(self.domain))):
            raise ValueError("Order is not total")
        return sorted(self.domain, key=lambda x: -above[x])

    def refines(self, other: RuleOrder) -> bool:
        from prefasp.orders import close_pairs

        return close_pairs(other.pairs) <= close_pairs(self.pairs)

    def precedes(self, a: str, b: str) -> bool:
        from prefasp.orders import close_pairs

        return (a, b) in close_pairs(self.pairs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "pairs": [list(p) for p in sorted(self.pairs)],
            "domain": sorted(self.domain),
            "total": self.total,
        }


def render_rule(rule: Rule, with_label: bool = False) -> str:
    head = " v ".join(str(l) for l in sort_literals(rule.head))
    body = [str(l) for l in sort_literals(rule.pos_body)]
    body += [f"not {l}" for l in sort_literals(rule.neg_body)]
    text = head
    if body:
        text = f"{head} :- {', '.join(body)}" if head else f":- {', '.join(body)}"
    text += "."
    if with_label:
        return f"{rule.id} : {text}"
    return text


def render_weak_constraint(wc: WeakConstraint) -> str:
    body = [str(l) for l in sort_literals(wc.pos_body)]
    body += [f"not {l}" for l in sort_literals(wc.neg_body)]
    return f":~ {', '.join(body)}. [{wc.weight}:{wc.level}]"


def render_program(program: Program | PrioritizedProgram, with_labels: bool = True) -> str:
    """Render in the parser's surface syntax."""
    lines: list[str] = []
    prefers: frozenset[tuple[str, str]] = frozenset()
    if isinstance(program, PrioritizedProgram):
        prefers = program.prefers
        program = program.program
    for r in program.rules:
        lines.append(render_rule(r, with_label=with_labels))
    for wc in program.weak_constraints:
        lines.append(render_weak_constraint(wc))
    for a, b in sorted(prefers):
        lines.append(f"{a} < {b}.")
    return "\n".join(lines) + ("\n" if lines else "")
