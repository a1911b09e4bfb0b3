"""Surface syntax for prioritized programs and the non-ground meta language.

Both languages share one grammar::

    program    ::= statement*
    statement  ::= [label ":"] head [":-" body] "."
                 | [label ":"] ":-" body "."
                 | ":~" body "." ["[" weight [":" level] "]"]
                 | label "<" label "."
    head       ::= literal ("v" literal)*
    body       ::= item ("," item)*
    item       ::= literal | "not" literal | term ("<" | ">" | "!=") term
    literal    ::= ["-"] name ["(" term ("," term)* ")"]
    term       ::= constant | Variable | "_"

``%`` starts a comment.  ``v`` and ``not`` are reserved words.  The front ends
below decide which statements each language admits.
"""

from __future__ import annotations

import logging
from typing import Literal, Union

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from prefasp.config import CONSTRAINT_ATOM_PREFIX, RULE_ID_PREFIX, RULE_ID_WIDTH
from prefasp.errors import ParseError, ProgramError, SafetyError
from prefasp.models import (
    Atom,
    ClassicalLiteral,
    PrioritizedProgram,
    Program,
    Rule,
    SourceSpan,
    WeakConstraint,
)
from prefasp.orders import close_pairs

logger = logging.getLogger(__name__)

GRAMMAR = r"""
start: statement*

?statement: rule_stmt
          | weak_stmt
          | pref_stmt

rule_stmt: label clause "."
         | clause "."
label: IDENT ":"

clause: head ":-" body   -> full_rule
      | head             -> fact_rule
      | ":-" body        -> constraint_rule

pref_stmt: IDENT LT IDENT "."

weak_stmt: ":~" body "." weight_spec?
weight_spec: "[" INT "]"             -> weight_only
           | "[" INT ":" INT "]"     -> weight_level

head: literal ("v" literal)*
body: body_item ("," body_item)*

?body_item: literal
          | "not" literal            -> naf
          | term comparison term     -> builtin

comparison: LT | GT | NEQ

literal: NEG atom                    -> neg_literal
       | atom                        -> pos_literal

atom: IDENT
    | IDENT "(" term ("," term)* ")"

term: IDENT | VAR | ANON

IDENT: /[a-z][A-Za-z0-9_]*/
VAR: /[A-Z][A-Za-z0-9_]*/
ANON: "_"
NEG: "-"
LT: "<"
GT: ">"
NEQ: "!="
COMMENT: /%[^\n]*/

%import common.INT
%import common.WS
%ignore WS
%ignore COMMENT
"""


def is_variable(term: str) -> bool:
    return term[:1].isupper() or term.startswith("_")


class MetaAtom(BaseModel):
    """A possibly non-ground classical literal of the meta language."""

    model_config = ConfigDict(frozen=True)

    predicate: str
    terms: tuple[str, ...] = ()
    positive: bool = True

    def variables(self) -> set[str]:
        return {t for t in self.terms if is_variable(t)}

    def is_ground(self) -> bool:
        return not self.variables()

    def __str__(self) -> str:
        rendered = [("_" if t.startswith("_") else t) for t in self.terms]
        text = f"{self.predicate}({','.join(rendered)})" if rendered else self.predicate
        return text if self.positive else f"-{text}"


class Comparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: Literal["<", ">", "!="]
    left: str
    right: str

    def variables(self) -> set[str]:
        return {t for t in (self.left, self.right) if is_variable(t)}

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


class MetaRule(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str = ""
    head: tuple[MetaAtom, ...] = ()
    pos_body: tuple[MetaAtom, ...] = ()
    neg_body: tuple[MetaAtom, ...] = ()
    builtins: tuple[Comparison, ...] = ()
    span: SourceSpan | None = None

    def variables(self) -> set[str]:
        found: set[str] = set()
        for atom in self.head + self.pos_body + self.neg_body:
            found |= atom.variables()
        for cmp in self.builtins:
            found |= cmp.variables()
        return found

    def is_ground(self) -> bool:
        return not self.variables()

    @property
    def is_constraint(self) -> bool:
        return not self.head


class MetaWeakConstraint(BaseModel):
    model_config = ConfigDict(frozen=True)

    pos_body: tuple[MetaAtom, ...] = ()
    neg_body: tuple[MetaAtom, ...] = ()
    builtins: tuple[Comparison, ...] = ()
    weight: int = Field(default=1, ge=1)
    level: int = Field(default=1, ge=1)
    span: SourceSpan | None = None

    def variables(self) -> set[str]:
        found: set[str] = set()
        for atom in self.pos_body + self.neg_body:
            found |= atom.variables()
        for cmp in self.builtins:
            found |= cmp.variables()
        return found

    def is_ground(self) -> bool:
        return not self.variables()


class PreferenceStatement(BaseModel):
    model_config = ConfigDict(frozen=True)

    higher: str
    lower: str
    span: SourceSpan | None = None


class NonGroundProgram(BaseModel):
    model_config = ConfigDict(frozen=True)

    rules: tuple[MetaRule, ...] = ()
    weak_constraints: tuple[MetaWeakConstraint, ...] = ()

    def __add__(self, other: NonGroundProgram) -> NonGroundProgram:
        return concat(self, other)

    def __len__(self) -> int:
        return len(self.rules) + len(self.weak_constraints)

    def is_ground(self) -> bool:
        return all(r.is_ground() for r in self.rules) and all(
            w.is_ground() for w in self.weak_constraints
        )

    def constants(self) -> set[str]:
        found: set[str] = set()
        for r in self.rules:
            for atom in r.head + r.pos_body + r.neg_body:
                found.update(t for t in atom.terms if not is_variable(t))
            for cmp in r.builtins:
                found.update(t for t in (cmp.left, cmp.right) if not is_variable(t))
        for w in self.weak_constraints:
            for atom in w.pos_body + w.neg_body:
                found.update(t for t in atom.terms if not is_variable(t))
            for cmp in w.builtins:
                found.update(t for t in (cmp.left, cmp.right) if not is_variable(t))
        return found


def concat(*programs: NonGroundProgram) -> NonGroundProgram:
    """Join programs, renumbering rule ids so they stay distinct."""
    rules: list[MetaRule] = []
    weak: list[MetaWeakConstraint] = []
    for index, program in enumerate(programs):
        for r in program.rules:
            rules.append(r.model_copy(update={"id": f"p{index}_{r.id}"}) if len(programs) > 1 else r)
        weak.extend(program.weak_constraints)
    return NonGroundProgram(rules=tuple(rules), weak_constraints=tuple(weak))


class _Naf(BaseModel):
    model_config = ConfigDict(frozen=True)

    atom: MetaAtom


Statement = Union[MetaRule, MetaWeakConstraint, PreferenceStatement]


def _span(meta) -> SourceSpan | None:
    if getattr(meta, "empty", True):
        return None
    return SourceSpan(
        line=meta.line, column=meta.column, start=meta.start_pos, end=meta.end_pos
    )


def _split_body(items: list) -> tuple[tuple[MetaAtom, ...], tuple[MetaAtom, ...], tuple[Comparison, ...]]:
    pos = tuple(i for i in items if isinstance(i, MetaAtom))
    neg = tuple(i.atom for i in items if isinstance(i, _Naf))
    builtins = tuple(i for i in items if isinstance(i, Comparison))
    return pos, neg, builtins


class ProgramTransformer(Transformer):
    """Builds statements bottom-up; validation happens in the front ends."""

    def start(self, children):
        return list(children)

    def term(self, children):
        return str(children[0])

    def comparison(self, children):
        return str(children[0])

    def atom(self, children):
        return (str(children[0]), tuple(children[1:]))

    def pos_literal(self, children):
        name, terms = children[0]
        return MetaAtom.model_construct(predicate=name, terms=terms, positive=True)

    def neg_literal(self, children):
        name, terms = children[1]
        return MetaAtom.model_construct(predicate=name, terms=terms, positive=False)

    def naf(self, children):
        return _Naf.model_construct(atom=children[0])

    def builtin(self, children):
        left, op, right = children
        return Comparison(op=op, left=left, right=right)

    def head(self, children):
        return tuple(children)

    def body(self, children):
        return list(children)

    def label(self, children):
        return str(children[0])

    def full_rule(self, children):
        return (children[0], children[1])

    def fact_rule(self, children):
        return (children[0], [])

    def constraint_rule(self, children):
        return ((), children[0])

    @v_args(meta=True)
    def rule_stmt(self, meta, children):
        label = children[0] if len(children) == 2 else ""
        head, body = children[-1]
        pos, neg, builtins = _split_body(body)
        return MetaRule.model_construct(
            id=label, head=head, pos_body=pos, neg_body=neg, builtins=builtins, span=_span(meta)
        )

    def weight_only(self, children):
        return (int(children[0]), 1)

    def weight_level(self, children):
        return (int(children[0]), int(children[1]))

    @v_args(meta=True)
    def weak_stmt(self, meta, children):
        pos, neg, builtins = _split_body(children[0])
        weight, level = children[1] if len(children) > 1 else (1, 1)
        return {
            "pos_body": pos,
            "neg_body": neg,
            "builtins": builtins,
            "weight": weight,
            "level": level,
            "span": _span(meta),
        }

    @v_args(meta=True)
    def pref_stmt(self, meta, children):
        return PreferenceStatement(
            higher=str(children[0]), lower=str(children[2]), span=_span(meta)
        )


_PARSER = Lark(
    GRAMMAR,
    parser="lalr",
    propagate_positions=True,
    maybe_placeholders=False,
)


def _error_span(exc: UnexpectedInput, text: str) -> SourceSpan:
    line = getattr(exc, "line", -1)
    column = getattr(exc, "column", -1)
    pos = getattr(exc, "pos_in_stream", None)
    if line is None or line < 1:
        line = text.count("\n") + 1
        column = len(text) - text.rfind("\n")
    start = pos if isinstance(pos, int) and pos >= 0 else len(text)
    return SourceSpan(line=line, column=max(column or 1, 1), start=start, end=start)


def _parse_statements(text: str) -> list[Statement]:
    try:
        raw = ProgramTransformer().transform(_PARSER.parse(text))
    except UnexpectedCharacters as exc:
        raise ParseError(f"Unexpected character {exc.char!r}", _error_span(exc, text)) from exc
    except UnexpectedEOF as exc:
        raise ParseError("Unexpected end of input", _error_span(exc, text)) from exc
    except UnexpectedToken as exc:
        token = "end of input" if exc.token.type == "$END" else repr(str(exc.token))
        raise ParseError(f"Unexpected {token}", _error_span(exc, text)) from exc
    except UnexpectedInput as exc:
        raise ParseError("Syntax error", _error_span(exc, text)) from exc

    statements: list[Statement] = []
    for item in raw:
        if isinstance(item, dict):
            try:
                statements.append(MetaWeakConstraint(**item))
            except ValidationError as exc:
                raise ParseError(
                    "Weak constraint weight and level must be at least 1", item["span"]
                ) from exc
        else:
            statements.append(item)
    return statements


def _rename_anonymous(rule: MetaRule | MetaWeakConstraint) -> MetaRule | MetaWeakConstraint:
    """Give every "_" occurrence its own variable name."""
    counter = 0

    def fresh(atom: MetaAtom) -> MetaAtom:
        nonlocal counter
        if "_" not in atom.terms:
            return atom
        terms = []
        for t in atom.terms:
            if t == "_":
                counter += 1
                t = f"_{counter}"
            terms.append(t)
        return atom.model_copy(update={"terms": tuple(terms)})

    def fresh_cmp(cmp: Comparison) -> Comparison:
        nonlocal counter
        sides = []
        for t in (cmp.left, cmp.right):
            if t == "_":
                counter += 1
                t = f"_{counter}"
            sides.append(t)
        return cmp.model_copy(update={"left": sides[0], "right": sides[1]})

    update = {
        "pos_body": tuple(fresh(a) for a in rule.pos_body),
        "neg_body": tuple(fresh(a) for a in rule.neg_body),
        "builtins": tuple(fresh_cmp(c) for c in rule.builtins),
    }
    if isinstance(rule, MetaRule):
        update["head"] = tuple(fresh(a) for a in rule.head)
    return rule.model_copy(update=update)


def check_safety(rule: MetaRule | MetaWeakConstraint) -> None:
    """Every variable must occur in a positive, non-builtin body atom."""
    bound: set[str] = set()
    for atom in rule.pos_body:
        bound |= atom.variables()
    used: set[str] = set()
    for atom in getattr(rule, "head", ()) + rule.neg_body:
        used |= atom.variables()
    for cmp in rule.builtins:
        used |= cmp.variables()
    unsafe = used - bound
    if unsafe:
        names = sorted({"_" if v.startswith("_") else v for v in unsafe})
        raise SafetyError(f"Unsafe variables {', '.join(names)}", names, rule.span)


def rule_id(k: int) -> str:
    return f"{RULE_ID_PREFIX}{k:0{RULE_ID_WIDTH}d}"


def _assign_ids(rules: list[MetaRule]) -> list[MetaRule]:
    labels: dict[str, MetaRule] = {}
    for r in rules:
        if not r.id:
            continue
        if r.id in labels:
            raise ProgramError(f"Duplicate rule label: {r.id}")
        labels[r.id] = r
    result = []
    k = 0
    for r in rules:
        if not r.id:
            k += 1
            while rule_id(k) in labels:
                k += 1
            r = r.model_copy(update={"id": rule_id(k)})
        result.append(r)
    return result


def parse_meta(text: str) -> NonGroundProgram:
    """Parse a non-ground meta-language program and check its safety."""
    rules: list[MetaRule] = []
    weak: list[MetaWeakConstraint] = []
    for statement in _parse_statements(text):
        if isinstance(statement, PreferenceStatement):
            raise ParseError(
                "Preference statements belong to prioritized programs", statement.span
            )
        if isinstance(statement, MetaWeakConstraint):
            wc = _rename_anonymous(statement)
            check_safety(wc)
            weak.append(wc)
            continue
        rule = _rename_anonymous(statement)
        check_safety(rule)
        rules.append(rule)
    program = NonGroundProgram(rules=tuple(_assign_ids(rules)), weak_constraints=tuple(weak))
    logger.debug("Parsed meta program with %d rules", len(program.rules))
    return program


def _to_literal(atom: MetaAtom, span: SourceSpan | None, propositional: bool) -> ClassicalLiteral:
    if atom.variables():
        raise ParseError("Variables are only allowed in meta programs", span)
    if propositional and atom.terms:
        raise ProgramError(f"Prioritized programs are propositional, got {atom}")
    return ClassicalLiteral(atom=Atom(name=atom.predicate, args=atom.terms), positive=atom.positive)


def _object_statements(
    text: str,
) -> tuple[list[MetaRule], list[MetaWeakConstraint], list[PreferenceStatement]]:
    rules: list[MetaRule] = []
    weak: list[MetaWeakConstraint] = []
    prefs: list[PreferenceStatement] = []
    for statement in _parse_statements(text):
        if isinstance(statement, PreferenceStatement):
            prefs.append(statement)
            continue
        if statement.builtins:
            raise ParseError("Comparisons are only allowed in meta programs", statement.span)
        if isinstance(statement, MetaWeakConstraint):
            weak.append(statement)
        else:
            rules.append(statement)
    return _assign_ids(rules), weak, prefs


def _build_rule(rule: MetaRule, propositional: bool) -> Rule:
    def lits(atoms: tuple[MetaAtom, ...]) -> frozenset[ClassicalLiteral]:
        return frozenset(_to_literal(a, rule.span, propositional) for a in atoms)

    return Rule(id=rule.id, head=lits(rule.head), pos_body=lits(rule.pos_body), neg_body=lits(rule.neg_body))


def _build_weak(wc: MetaWeakConstraint) -> WeakConstraint:
    pos = frozenset(_to_literal(a, wc.span, False) for a in wc.pos_body)
    neg = frozenset(_to_literal(a, wc.span, False) for a in wc.neg_body)
    return WeakConstraint(pos_body=pos, neg_body=neg, weight=wc.weight, level=wc.level)


def _resolve_preferences(
    prefs: list[PreferenceStatement], ids: set[str]
) -> frozenset[tuple[str, str]]:
    pairs = set()
    for p in prefs:
        for label in (p.higher, p.lower):
            if label not in ids:
                raise ProgramError(f"Preference refers to unknown rule label: {label}")
        pairs.add((p.higher, p.lower))
    closure = close_pairs(pairs)
    cyclic = sorted(a for a, b in closure if a == b)
    if cyclic:
        raise ProgramError(f"Cyclic preference involving rule {cyclic[0]}")
    return frozenset(pairs)


def parse_program(text: str) -> Program:
    """Parse a ground program; disjunction, constraints and weak constraints allowed.

    Preference statements are checked against the rule labels and dropped.
    """
    rules, weak, prefs = _object_statements(text)
    built = tuple(_build_rule(r, propositional=False) for r in rules)
    _resolve_preferences(prefs, {r.id for r in built})
    return Program(rules=built, weak_constraints=tuple(_build_weak(w) for w in weak))


def parse_prioritized(text: str) -> PrioritizedProgram:
    """Parse a prioritized program.

    Rules must be normal; ``:- C.`` becomes ``bad_k :- C, not bad_k.`` with a
    fresh atom ``bad_k``.  ``a < b.`` gives rule ``a`` higher priority.
    """
    rules, weak, prefs = _object_statements(text)
    if weak:
        raise ProgramError("Prioritized programs cannot contain weak constraints")
    used_names = {a.predicate for r in rules for a in r.head + r.pos_body + r.neg_body}
    built: list[Rule] = []
    k = 0
    for r in rules:
        if len(r.head) > 1:
            raise ProgramError(f"Rule {r.id} has a disjunctive head; prioritized programs are normal")
        rule = _build_rule(r, propositional=True)
        if rule.is_constraint:
            k += 1
            while f"{CONSTRAINT_ATOM_PREFIX}{k}" in used_names:
                k += 1
            bad = ClassicalLiteral.of(f"{CONSTRAINT_ATOM_PREFIX}{k}")
            rule = Rule(
                id=rule.id,
                head=frozenset({bad}),
                pos_body=rule.pos_body,
                neg_body=rule.neg_body | {bad},
            )
        built.append(rule)
    prefers = _resolve_preferences(prefs, {r.id for r in built})
    program = PrioritizedProgram(program=Program(rules=tuple(built)), prefers=prefers)
    logger.debug(
        "Parsed prioritized program: %d rules, %d preferences", len(built), len(prefers)
    )
    return program


def render_meta(program: NonGroundProgram) -> str:
    """Render a meta-language program in surface syntax, one statement per line."""
    lines: list[str] = []
    for r in program.rules:
        head = " v ".join(str(a) for a in r.head)
        body = [str(a) for a in r.pos_body]
        body += [f"not {a}" for a in r.neg_body]
        body += [str(c) for c in r.builtins]
        if body:
            lines.append(f"{head} :- {', '.join(body)}." if head else f":- {', '.join(body)}.")
        else:
            lines.append(f"{head}.")
    for w in program.weak_constraints:
        body = [str(a) for a in w.pos_body]
        body += [f"not {a}" for a in w.neg_body]
        body += [str(c) for c in w.builtins]
        lines.append(f":~ {', '.join(body)}. [{w.weight}:{w.level}]")
    return "\n".join(lines) + ("\n" if lines else "")
