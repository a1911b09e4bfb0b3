"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from prefasp.models import SourceSpan

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_RESOURCE_LIMIT = 2
EXIT_DISAGREEMENT = 3


class PrefaspError(Exception):
    exit_code = EXIT_INPUT_ERROR


class InputError(PrefaspError, ValueError):
    """The program text or an argument is unusable."""


class ParseError(InputError):
    def __init__(self, message: str, span: SourceSpan | None = None) -> None:
        self.span = span
        if span is not None:
            message = f"{message} at line {span.line}, column {span.column}"
        super().__init__(message)


class SafetyError(ParseError):
    def __init__(
        self,
        message: str,
        variables: list[str],
        span: SourceSpan | None = None,
    ) -> None:
        self.variables = variables
        super().__init__(message, span)


class ProgramError(InputError):
    """Structurally invalid program: labels, preferences, normal form."""


class NotAnAnswerSetError(InputError):
    pass


class DemangleError(InputError):
    pass


class ResourceLimitError(PrefaspError):
    exit_code = EXIT_RESOURCE_LIMIT


class SolverTimeout(ResourceLimitError):
    pass
