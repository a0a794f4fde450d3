"""Exception and report types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass, field


class QhmmError(Exception):
    """Base class for every library-specific error."""


class ShapeError(QhmmError, ValueError):
    """Operands have malformed or incompatible shapes."""


class DomainError(QhmmError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class InputError(QhmmError, ValueError):
    """Bad caller-supplied input, e.g. a symbol outside the model alphabet."""


class ResourceLimitError(QhmmError):
    """A sequence-length or enumeration cap would be exceeded."""


class EligibilityError(QhmmError):
    """The trellis Viterbi recursion is not sound for this model."""


@dataclass
class ValidationReport:
    """Outcome of validating a grid or model.

    ``problems`` is empty iff the subject satisfies its invariants; each
    entry names the offending field, index or column in plain text.
    """

    subject: str
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def add(self, problem: str) -> None:
        self.problems.append(problem)

    def __str__(self) -> str:
        if self.ok:
            return f"{self.subject}: OK"
        lines = [f"{self.subject}: {len(self.problems)} problem(s)"]
        lines += [f"  - {p}" for p in self.problems]
        return "\n".join(lines)


class ValidationError(QhmmError, ValueError):
    """Raised when construction or loading hits a failed validation report."""

    def __init__(self, report: ValidationReport):
        super().__init__(str(report))
        self.report = report


class ModelFormatError(QhmmError, ValueError):
    """A model or measurement file could not be parsed."""
