from dataclasses import dataclass
from enum import Enum


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    line: int
    column: int
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity.value}: {self.message}"


def error(line: int, column: int, message: str) -> Diagnostic:
    return Diagnostic(Severity.ERROR, line, column, message)


def warning(line: int, column: int, message: str) -> Diagnostic:
    return Diagnostic(Severity.WARNING, line, column, message)


def has_errors(diagnostics) -> bool:
    return any(d.is_error for d in diagnostics)
