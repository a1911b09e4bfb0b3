"""prefasp - answer sets and preferred answer sets of prioritized logic programs."""

__version__ = "0.1.0"

from prefasp.meta import MetaSemantics, emit_facts, meta_solve
from prefasp.models import ClassicalLiteral, Interpretation, PrioritizedProgram, Program, Rule, RuleOrder
from prefasp.parser import parse_meta, parse_prioritized, parse_program
from prefasp.preferences import bpas, dpas, is_b_preferred, is_d_preferred, is_w_preferred, weakly_preferred, wpas
from prefasp.solver import answer_sets, optimal_answer_sets

__all__ = [
    "ClassicalLiteral",
    "Interpretation",
    "MetaSemantics",
    "PrioritizedProgram",
    "Program",
    "Rule",
    "RuleOrder",
    "answer_sets",
    "bpas",
    "dpas",
    "emit_facts",
    "is_b_preferred",
    "is_d_preferred",
    "is_w_preferred",
    "meta_solve",
    "optimal_answer_sets",
    "parse_meta",
    "parse_prioritized",
    "parse_program",
    "weakly_preferred",
    "wpas",
]
