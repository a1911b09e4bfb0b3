"""Command line interface for prefasp."""

from __future__ import annotations

import json
import logging
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Callable

import click
from colorama import Fore, Style, init
from pydantic import BaseModel, Field

from prefasp import __version__
from prefasp.config import (
    DEFAULT_ENUMERATION_LIMIT,
    DEFAULT_PVD_LIMIT,
    DEFAULT_SEED,
    DEFAULT_TIMEOUT,
)
from prefasp.corpus import Corpus
from prefasp.errors import EXIT_DISAGREEMENT, InputError, ParseError, PrefaspError
from prefasp.grounder import GroundingStats, ground_with_stats
from prefasp.meta import MetaOptions, MetaSemantics, meta_solve_raw, order_atoms, render_facts
from prefasp.models import Interpretation, PrioritizedProgram, Program, render_program
from prefasp.parser import parse_meta, parse_prioritized, parse_program
from prefasp.preferences import (
    FixpointTrace,
    answer_sets_of,
    cd_value,
    cw_value,
    full_order,
    is_b_preferred,
    is_d_preferred,
    is_w_preferred,
    pvd,
    weakly_preferred,
)
from prefasp.solver import optimal_answer_sets_with_stats, solve_with_stats
from prefasp.validation import (
    CrossValidationReport,
    hierarchy_violations,
    random_programs,
    summarize,
    validate_program,
)

init(autoreset=True)

logger = logging.getLogger(__name__)


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"


class Limits(BaseModel):
    enumeration: int = Field(default=DEFAULT_ENUMERATION_LIMIT, ge=1)
    pvd: int = Field(default=DEFAULT_PVD_LIMIT, ge=1)
    timeout: float = Field(default=DEFAULT_TIMEOUT, ge=0)


class RunConfig(BaseModel):
    command: str
    source: str = "-"
    semantics: str | None = None
    output_format: OutputFormat = OutputFormat.TEXT
    limit_rules: int | None = Field(default=None, ge=1)
    timeout: float = Field(default=DEFAULT_TIMEOUT, ge=0)
    seed: int = DEFAULT_SEED
    explain: bool = False
    raw: bool = False

    @property
    def limits(self) -> Limits:
        if self.limit_rules is None:
            return Limits(timeout=self.timeout)
        return Limits(enumeration=self.limit_rules, pvd=self.limit_rules, timeout=self.timeout)


class AnswerSetEntry(BaseModel):
    literals: list[str]
    objective: dict[str, Any] | None = None
    pvd: int | None = None
    preferred: dict[str, bool] | None = None
    witness: dict[str, Any] | None = None


class Explanation(BaseModel):
    answer_set: list[str]
    semantics: str
    accepted: bool
    trace: dict[str, Any]


class Diagnostics(BaseModel):
    grounding: dict[str, int] | None = None
    solver: dict[str, Any] | None = None
    raw_count: int | None = None
    notes: list[str] = Field(default_factory=list)


class ResultDocument(BaseModel):
    """Machine-readable result of one command."""

    command: str
    semantics: str | None = None
    program: str = ""
    answer_sets: list[AnswerSetEntry] = Field(default_factory=list)
    explanations: list[Explanation] | None = None
    raw: list[list[str]] | None = None
    facts: list[str] | None = None
    reports: list[dict[str, Any]] | None = None
    summary: dict[str, Any] | None = None
    diagnostics: Diagnostics = Field(default_factory=Diagnostics)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json", exclude_none=True), indent=2, ensure_ascii=False)


def setup_logging(verbose: int = 0) -> None:
    """Diagnostics go to stderr; stdout carries results only."""
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


def fail(exc: PrefaspError) -> None:
    click.echo(f"{Fore.RED}Error: {exc}", err=True)
    sys.exit(exc.exit_code)


def run_guarded(action: Callable[[], None]) -> None:
    try:
        action()
    except PrefaspError as exc:
        fail(exc)


def read_source(source: str) -> str:
    """Program text from a path, or from stdin for "-"."""
    try:
        if source == "-":
            data = click.get_binary_stream("stdin").read()
        else:
            data = Path(source).read_bytes()
        return data.decode("utf-8")
    except OSError as exc:
        raise InputError(f"Cannot read {source}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise InputError(f"{source} is not UTF-8 text (invalid byte at offset {exc.start})") from exc


def load_program(text: str) -> tuple[Program, GroundingStats | None]:
    """A ground program, grounding the text first when it has variables."""
    try:
        return parse_program(text), None
    except ParseError as exc:
        try:
            meta = parse_meta(text)
        except PrefaspError:
            raise exc
        return ground_with_stats(meta)


def entry(answer_set: Interpretation, **annotations: Any) -> AnswerSetEntry:
    return AnswerSetEntry(literals=answer_set.to_list(), **annotations)


def emit(doc: ResultDocument, cfg: RunConfig, render_text: Callable[[ResultDocument], None]) -> None:
    if cfg.output_format is OutputFormat.JSON:
        click.echo(doc.to_json())
    else:
        render_text(doc)


def braces(literals: list[str]) -> str:
    return "{" + ", ".join(literals) + "}"


def chain(sequence: list[str]) -> str:
    return " < ".join(sequence)


def echo_sets(doc: ResultDocument, title: str, empty: str) -> None:
    if not doc.answer_sets:
        click.echo(empty)
        return
    for i, item in enumerate(doc.answer_sets, 1):
        line = f"{Fore.CYAN}{title} {i}:{Style.RESET_ALL} {braces(item.literals)}"
        if item.pvd is not None:
            line += f"  pvd = {item.pvd}"
        click.echo(line)
        if item.objective is not None:
            levels = ", ".join(f"level {k}: {v}" for k, v in item.objective["levels"].items())
            click.echo(f"  H = {item.objective['value']} ({levels})" if levels else f"  H = {item.objective['value']}")
        if item.witness is not None:
            click.echo(f"  Full prioritization: {chain(item.witness['full_prioritization'])}")
            click.echo(f"  Preferred order:     {chain(item.witness['preferred_order'])}")
            pairs = ", ".join(f"({a}, {b})" for a, b in item.witness["disagreements"]) or "none"
            click.echo(f"  Disagreements:       {pairs}")


def echo_explanations(doc: ResultDocument) -> None:
    for exp in doc.explanations or []:
        verdict = f"{Fore.GREEN}accepted" if exp.accepted else f"{Fore.RED}rejected"
        click.echo(f"\n{Style.BRIGHT}Answer set {braces(exp.answer_set)}{Style.RESET_ALL}: {verdict}")
        if exp.semantics == "b":
            for k, rnd in enumerate(exp.trace["rounds"], 1):
                removed = ", ".join(f"{r} [{rnd['labels'][r]}]" for r in rnd["removed"])
                added = f"; added {', '.join(rnd['added'])}" if rnd["added"] else ""
                click.echo(f"  Round {k}: removed {removed}{added}; S = {braces(rnd['working_set'])}")
            if exp.trace.get("witness"):
                click.echo(f"  Witness: {chain(exp.trace['witness'])}")
            if exp.trace.get("blocked"):
                click.echo(f"  Blocked: {', '.join(exp.trace['blocked'])}")
        else:
            for k, stage in enumerate(exp.trace["stages"]):
                click.echo(f"  S{k} = {braces(stage)}")
            if not exp.trace["consistent"]:
                click.echo("  Last stage is inconsistent; the value is the set of all literals")


def echo_notes(doc: ResultDocument) -> None:
    for note in doc.diagnostics.notes:
        click.echo(f"{Fore.YELLOW}{note}")


def fixpoint_explanation(trace: FixpointTrace, answer_set: Interpretation, semantics: str) -> Explanation:
    return Explanation(
        answer_set=answer_set.to_list(),
        semantics=semantics,
        accepted=trace.value == answer_set,
        trace=trace.to_dict(),
    )


format_option = click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]), default="text", help="Output format")
limit_rules_option = click.option("--limit-rules", type=click.IntRange(min=1), default=None, help="Largest program for enumeration and pvd")
timeout_option = click.option("--timeout", type=click.FloatRange(min=0), default=DEFAULT_TIMEOUT, help="Solver timeout in seconds (0=no limit)")

common_options = [format_option, limit_rules_option, timeout_option]


def with_common_options(func: Callable) -> Callable:
    for option in reversed(common_options):
        func = option(func)
    return func


@click.group()
@click.version_option(version=__version__, prog_name="prefasp")
@click.option("--verbose", "-v", count=True, help="Log progress to stderr (-vv for debug)")
def cli(verbose: int) -> None:
    """Answer sets and preferred answer sets of prioritized logic programs."""
    setup_logging(verbose)


@cli.command()
@click.argument("source", type=click.Path(allow_dash=True), default="-")
@with_common_options
def solve(source: str, output_format: str, limit_rules: int | None, timeout: float) -> None:
    """Print the answer sets (optimal ones under weak constraints)."""
    cfg = RunConfig(command="solve", source=source, output_format=output_format, limit_rules=limit_rules, timeout=timeout)

    def action() -> None:
        program, grounding = load_program(read_source(source))
        doc = ResultDocument(command="solve", program=render_program(program, with_labels=False))
        if grounding is not None:
            doc.diagnostics.grounding = grounding.to_dict()
        if program.weak_constraints:
            scored, stats = optimal_answer_sets_with_stats(program, timeout=cfg.limits.timeout)
            doc.answer_sets = [entry(a, objective=v.to_dict()) for a, v in scored]
            title = "Optimal answer set"
        else:
            found, stats = solve_with_stats(program, timeout=cfg.limits.timeout)
            doc.answer_sets = [entry(a) for a in found]
            title = "Answer set"
        doc.diagnostics.solver = stats.to_dict()
        emit(doc, cfg, lambda d: echo_sets(d, title, "No answer sets."))

    run_guarded(action)


@cli.command()
@click.argument("source", type=click.Path(allow_dash=True), default="-")
@click.option("--semantics", "-s", type=click.Choice(["b", "w", "d"]), default="b", help="Preference semantics")
@click.option("--explain", is_flag=True, help="Show the FULL-ORDER rounds (b) or fixpoint stages (w, d)")
@format_option
@timeout_option
def preferred(source: str, semantics: str, explain: bool, output_format: str, timeout: float) -> None:
    """Print the B-, W- or D-preferred answer sets."""
    cfg = RunConfig(
        command="preferred",
        source=source,
        semantics=semantics,
        output_format=output_format,
        timeout=timeout,
        explain=explain,
    )
    check = {"b": is_b_preferred, "w": is_w_preferred, "d": is_d_preferred}[semantics]

    def action() -> None:
        program = parse_prioritized(read_source(source))
        candidates = answer_sets_of(program, timeout=cfg.limits.timeout)
        selected = [a for a in candidates if check(program, a)]
        doc = ResultDocument(
            command="preferred",
            semantics=semantics,
            program=render_program(program),
            answer_sets=[entry(a, preferred={semantics: True}) for a in selected],
        )
        if not selected:
            doc.diagnostics.notes.append("No preferred answer set.")
        if cfg.explain:
            doc.explanations = []
            for a in candidates:
                if semantics == "b":
                    trace = full_order(program, a)
                    doc.explanations.append(
                        Explanation(answer_set=a.to_list(), semantics="b", accepted=trace.accepted, trace=trace.to_dict())
                    )
                else:
                    value = cw_value if semantics == "w" else cd_value
                    doc.explanations.append(fixpoint_explanation(value(program, a), a, semantics))

        def render(d: ResultDocument) -> None:
            echo_sets(d, f"{semantics.upper()}-preferred answer set", "No preferred answer set.")
            echo_explanations(d)

        emit(doc, cfg, render)

    run_guarded(action)


@cli.command()
@click.argument("source", type=click.Path(allow_dash=True), default="-")
@click.option("--explain", is_flag=True, help="Also report the pvd of every answer set")
@with_common_options
def weak(source: str, explain: bool, output_format: str, limit_rules: int | None, timeout: float) -> None:
    """Print the weakly preferred answer sets with their violation degree."""
    cfg = RunConfig(
        command="weak", source=source, output_format=output_format, limit_rules=limit_rules, timeout=timeout, explain=explain
    )

    def action() -> None:
        program = parse_prioritized(read_source(source))
        limits = cfg.limits
        results = weakly_preferred(program, limit=limits.pvd, timeout=limits.timeout)
        doc = ResultDocument(
            command="weak",
            program=render_program(program),
            answer_sets=[
                entry(r.answer_set, pvd=r.value, witness={k: v for k, v in r.to_dict().items() if k not in ("answer_set", "pvd")})
                for r in results
            ],
        )
        if cfg.explain:
            doc.explanations = []
            for a in answer_sets_of(program, timeout=limits.timeout):
                result = pvd(program, a, limit=limits.pvd)
                doc.explanations.append(
                    Explanation(answer_set=a.to_list(), semantics="weak", accepted=a in [r.answer_set for r in results], trace=result.to_dict())
                )

        def render(d: ResultDocument) -> None:
            echo_sets(d, "Weakly preferred answer set", "No answer sets.")
            for exp in d.explanations or []:
                click.echo(f"pvd {braces(exp.answer_set)} = {exp.trace['pvd']}")

        emit(doc, cfg, render)

    run_guarded(action)


@cli.command("emit-facts")
@click.argument("source", type=click.Path(allow_dash=True), default="-")
@format_option
def emit_facts_cmd(source: str, output_format: str) -> None:
    """Print the fact representation of a prioritized program."""
    cfg = RunConfig(command="emit-facts", source=source, output_format=output_format)

    def action() -> None:
        program = parse_prioritized(read_source(source))
        text = render_facts(program)
        doc = ResultDocument(command="emit-facts", program=render_program(program), facts=text.splitlines())
        emit(doc, cfg, lambda d: click.echo(text, nl=False))

    run_guarded(action)


@cli.command()
@click.argument("source", type=click.Path(allow_dash=True), default="-")
@click.option("--semantics", "-s", type=click.Choice([s.value for s in MetaSemantics]), default="plain", help="Meta-program")
@click.option("--raw", is_flag=True, help="Also print the unprojected meta answer sets")
@click.option("--drop-redundant-constraint", is_flag=True, help="Run the B meta-program without its implied constraint")
@click.option("--assets", "assets_dir", type=click.Path(file_okay=False), default=None, help="Directory with meta-program assets")
@with_common_options
def meta(
    source: str,
    semantics: str,
    raw: bool,
    drop_redundant_constraint: bool,
    assets_dir: str | None,
    output_format: str,
    limit_rules: int | None,
    timeout: float,
) -> None:
    """Solve through a meta-program and project back to the program's literals."""
    cfg = RunConfig(
        command="meta",
        source=source,
        semantics=semantics,
        output_format=output_format,
        limit_rules=limit_rules,
        timeout=timeout,
        raw=raw,
    )

    def action() -> None:
        program = parse_prioritized(read_source(source))
        options = MetaOptions(drop_redundant_constraint=drop_redundant_constraint)
        run = meta_solve_raw(program, MetaSemantics(semantics), options, assets_dir, cfg.limits.timeout)
        doc = ResultDocument(
            command="meta",
            semantics=semantics,
            program=render_program(program),
            answer_sets=[entry(a) for a in run.projected],
        )
        if run.semantics is MetaSemantics.WEAK and run.objective is not None:
            for item, projected in zip(doc.answer_sets, run.projected):
                item.objective = run.objective.to_dict()
                witness = run.witnesses(projected)[0]
                item.witness = {"pr": order_atoms(witness, "pr"), "pr1": order_atoms(witness, "pr1")}
        doc.diagnostics.grounding = run.grounding.to_dict()
        doc.diagnostics.solver = run.solver.to_dict()
        doc.diagnostics.raw_count = run.raw_count
        if cfg.raw:
            doc.raw = [a.to_list() for a in run.raw]

        def render(d: ResultDocument) -> None:
            echo_sets(d, "Meta answer set", "No answer sets.")
            for item in d.answer_sets:
                if item.witness is not None:
                    click.echo(f"  pr:  {', '.join(f'{a}<{b}' for a, b in item.witness['pr'])}")
                    click.echo(f"  pr1: {', '.join(f'{a}<{b}' for a, b in item.witness['pr1'])}")
            for i, lits in enumerate(d.raw or [], 1):
                click.echo(f"{Fore.CYAN}Raw answer set {i}:{Style.RESET_ALL} {braces(lits)}")

        emit(doc, cfg, render)

    run_guarded(action)


def _validation_inputs(
    path: str | None, random_count: int | None, seed: int
) -> list[tuple[str, PrioritizedProgram]]:
    if random_count is not None:
        return list(random_programs(random_count, seed))
    if path is None:
        return [("stdin", parse_prioritized(read_source("-")))]
    target = Path(path)
    if not target.exists():
        raise InputError(f"No such file or directory: {path}")
    if target.is_dir():
        entries = Corpus(target).list_all()
    else:
        try:
            entries = [Corpus.load_file(target)]
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"Cannot read {path}: {exc}") from exc
    return [(e.name, e.prioritized()) for e in entries if e.is_prioritized]


@cli.command()
@click.argument("path", type=click.Path(), required=False)
@click.option("--random", "random_count", type=click.IntRange(min=1), default=None, help="Validate N random programs")
@click.option("--seed", type=int, default=DEFAULT_SEED, help="Seed for --random")
@click.option("--semantics", "-s", "selected", type=click.Choice([s.value for s in MetaSemantics]), multiple=True, help="Restrict to these meta-programs")
@click.option("--assets", "assets_dir", type=click.Path(file_okay=False), default=None, help="Directory with meta-program assets")
@with_common_options
def validate(
    path: str | None,
    random_count: int | None,
    seed: int,
    selected: tuple[str, ...],
    assets_dir: str | None,
    output_format: str,
    limit_rules: int | None,
    timeout: float,
) -> None:
    """Cross-validate meta-programs against the native semantics."""
    cfg = RunConfig(
        command="validate", source=path or "-", output_format=output_format, limit_rules=limit_rules, timeout=timeout, seed=seed
    )

    def action() -> None:
        limits = cfg.limits
        semantics = [MetaSemantics(s) for s in selected] or None
        reports: list[CrossValidationReport] = []
        notes: list[str] = []
        for name, program in _validation_inputs(path, random_count, cfg.seed):
            reports.extend(
                validate_program(
                    program,
                    program_id=name,
                    semantics=semantics,
                    assets_dir=assets_dir,
                    pvd_limit=limits.pvd,
                    timeout=limits.timeout,
                )
            )
            notes.extend(f"{name}: {v}" for v in hierarchy_violations(program, limits.timeout))
        summary = summarize(reports)
        summary["hierarchy_violations"] = len(notes)
        doc = ResultDocument(
            command="validate",
            reports=[r.to_dict() for r in reports],
            summary=summary,
            diagnostics=Diagnostics(notes=notes),
        )

        def render(d: ResultDocument) -> None:
            for r in reports:
                status = f"{Fore.GREEN}agree" if r.agree else f"{Fore.RED}DISAGREE"
                click.echo(
                    f"{r.program_id:<24} {r.semantics.value:<7} {status}{Style.RESET_ALL}"
                    f"  native={len(r.native)} meta={len(r.meta)}"
                )
                for s in r.non_answer_sets:
                    click.echo(f"  fixpoint that is not an answer set: {s.render()}")
            echo_notes(d)
            click.echo(
                f"{summary['reports']} reports, {summary['disagreements']} disagreements, "
                f"{summary['hierarchy_violations']} hierarchy violations"
            )

        emit(doc, cfg, render)
        if summary["disagreements"] or notes:
            sys.exit(EXIT_DISAGREEMENT)

    run_guarded(action)


@cli.command()
@click.argument("source", type=click.Path(allow_dash=True), default="-")
@click.option("--naive", is_flag=True, help="Instantiate over the whole Herbrand universe")
@click.option("--stats", is_flag=True, help="Print grounding statistics to stderr")
@format_option
def ground(source: str, naive: bool, stats: bool, output_format: str) -> None:
    """Print the ground instantiation of a meta-language program."""
    cfg = RunConfig(command="ground", source=source, output_format=output_format)

    def action() -> None:
        program, grounding = ground_with_stats(parse_meta(read_source(source)), relevance=not naive)
        doc = ResultDocument(command="ground", program=render_program(program, with_labels=False))
        doc.diagnostics.grounding = grounding.to_dict()
        emit(doc, cfg, lambda d: click.echo(d.program, nl=False))
        if stats:
            click.echo(json.dumps(grounding.to_dict(), indent=2), err=True)

    run_guarded(action)


@cli.command()
@click.argument("name", required=False)
@click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]), default="text", help="Output format")
def corpus(name: str | None, output_format: str) -> None:
    """List the bundled example programs, or print one."""
    store = Corpus()
    if name is None:
        entries = store.list_all()
        if output_format == OutputFormat.JSON.value:
            click.echo(json.dumps([e.to_dict() for e in entries], indent=2, ensure_ascii=False))
            return
        for e in entries:
            click.echo(f"{e.name:<20} {e.kind:<12} {e.description}")
        return
    found = store.load(name)
    if found is None:
        click.echo(f"{Fore.RED}Error: No example named {name}", err=True)
        sys.exit(1)
    if output_format == OutputFormat.JSON.value:
        data = found.to_dict()
        data["source"] = found.source
        data["expected"] = found.expected.model_dump(exclude_none=True)
        click.echo(json.dumps(data, indent=2, ensure_ascii=False))
        return
    click.echo(found.source, nl=False)


@cli.command()
def schema() -> None:
    """Print the JSON schema of the result documents."""
    click.echo(json.dumps(ResultDocument.model_json_schema(), indent=2, ensure_ascii=False))


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
