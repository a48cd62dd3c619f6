from __future__ import annotations

from enum import Enum
from typing import Any


class PsiError(Exception):
    """Base class for every error raised by the kernel."""


class ParseError(PsiError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column

    def as_dict(self) -> dict[str, Any]:
        return {"message": self.message, "line": self.line, "column": self.column}


class TypeErrorKind(str, Enum):
    UNBOUND_VARIABLE = "UnboundVariable"
    ANNOTATION_MISMATCH = "AnnotationMismatch"
    NOT_AN_ARROW = "NotAnArrow"
    NOT_A_CONJUNCTION = "NotAConjunction"
    NOT_A_UNIVERSAL = "NotAUniversal"
    ESCAPING_TYPE_VARIABLE = "EscapingTypeVariable"
    PROJECTION_TYPE_NOT_PRESENT = "ProjectionTypeNotPresent"


class PsiTypeError(PsiError):
    """A typing failure, located at the innermost failing subterm."""

    def __init__(self, kind: TypeErrorKind, location: str, detail: str) -> None:
        super().__init__(f"{kind.value} at {location}: {detail}")
        self.kind = kind
        self.location = location
        self.detail = detail

    def as_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "location": self.location, "detail": self.detail}


class EmptyConjunctionError(PsiError, ValueError):
    """Raised when a conjunction of zero types is requested; there is no unit type."""


class InvariantViolation(PsiError):
    """A property the kernel relies on was observed to fail."""
