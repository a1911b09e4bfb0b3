"""Named example programs stored as ``.lp`` files with YAML front matter."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Literal

import frontmatter
from pydantic import BaseModel, Field

from prefasp.config import CORPUS_DIR
from prefasp.models import Interpretation, PrioritizedProgram, Program
from prefasp.parser import parse_prioritized, parse_program

logger = logging.getLogger(__name__)

LiteralList = list[str]


class ExpectedPvd(BaseModel):
    answer_set: LiteralList
    pvd: int = Field(ge=0)
    disagreements: list[list[str]] | None = None


class ExpectedOptimal(BaseModel):
    answer_set: LiteralList
    value: int = Field(ge=0)


class ExpectedFullOrder(BaseModel):
    answer_set: LiteralList
    accepted: bool
    rounds: list[list[str]] = Field(default_factory=list)


class Expected(BaseModel):
    """Known results; a missing key means "not recorded"."""

    answer_sets: list[LiteralList] | None = None
    b: list[LiteralList] | None = None
    w: list[LiteralList] | None = None
    d: list[LiteralList] | None = None
    weak: list[LiteralList] | None = None
    pvd: list[ExpectedPvd] = Field(default_factory=list)
    optimal: list[ExpectedOptimal] = Field(default_factory=list)
    full_order: list[ExpectedFullOrder] = Field(default_factory=list)
    facts: list[str] | None = None

    def sets(self, key: str) -> list[Interpretation] | None:
        """Expected result for ``key`` as interpretations, or None if not recorded."""
        value = getattr(self, key)
        if value is None:
            return None
        return [Interpretation.of(lits) for lits in value]


class CorpusEntry(BaseModel):
    name: str
    description: str = ""
    kind: Literal["prioritized", "ground"] = "prioritized"
    stratified: bool = False
    source: str = ""
    expected: Expected = Field(default_factory=Expected)
    path: Path | None = None

    @property
    def is_prioritized(self) -> bool:
        return self.kind == "prioritized"

    def prioritized(self) -> PrioritizedProgram:
        return parse_prioritized(self.source)

    def program(self) -> Program:
        if self.is_prioritized:
            return self.prioritized().program
        return parse_program(self.source)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "kind": self.kind,
            "path": str(self.path) if self.path else None,
        }

    def to_frontmatter(self) -> frontmatter.Post:
        metadata: dict[str, Any] = {"name": self.name, "kind": self.kind}
        if self.description:
            metadata["description"] = self.description
        if self.stratified:
            metadata["stratified"] = True
        expected = self.expected.model_dump(exclude_none=True, exclude_defaults=True)
        if expected:
            metadata["expected"] = expected
        return frontmatter.Post(self.source, **metadata)

    @classmethod
    def from_frontmatter(cls, post: frontmatter.Post, path: Path | None = None) -> CorpusEntry:
        metadata = post.metadata
        name = metadata.get("name") or (path.stem if path else "")
        return cls(
            name=name,
            description=metadata.get("description", ""),
            kind=metadata.get("kind", "prioritized"),
            stratified=metadata.get("stratified", False),
            source=post.content + "\n",
            expected=Expected.model_validate(metadata.get("expected") or {}),
            path=path,
        )


class Corpus:
    """Example programs in a directory, one ``<name>.lp`` per entry."""

    def __init__(self, corpus_dir: Path | str | None = None) -> None:
        if corpus_dir is None:
            corpus_dir = CORPUS_DIR
        self.corpus_dir = Path(corpus_dir).expanduser().resolve()

    def _path(self, name: str) -> Path:
        return self.corpus_dir / f"{name}.lp"

    def exists(self, name: str) -> bool:
        return self._path(name).exists()

    def load(self, name: str) -> CorpusEntry | None:
        path = self._path(name)
        if not path.exists():
            return None
        return self.load_file(path)

    @staticmethod
    def load_file(path: Path | str) -> CorpusEntry:
        path = Path(path)
        post = frontmatter.load(path)
        return CorpusEntry.from_frontmatter(post, path)

    def save(self, entry: CorpusEntry) -> Path:
        self.corpus_dir.mkdir(parents=True, exist_ok=True)
        path = self._path(entry.name)
        path.write_text(frontmatter.dumps(entry.to_frontmatter()) + "\n", encoding="utf-8")
        return path

    def names(self) -> list[str]:
        if not self.corpus_dir.exists():
            return []
        return sorted(p.stem for p in self.corpus_dir.glob("*.lp"))

    def list_all(self) -> list[CorpusEntry]:
        entries = []
        for path in sorted(self.corpus_dir.glob("*.lp")):
            try:
                entries.append(self.load_file(path))
            except Exception as e:
                logger.warning("Skipping unreadable corpus file %s: %s", path.name, e)
        return entries
