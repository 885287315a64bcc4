from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .cone import ValidityReport


class KConeError(ValueError):
    """Base class of every domain error raised by kcone."""


class DegenerateInputError(KConeError):
    pass


class PreconditionError(KConeError):
    pass


class ValidityError(KConeError):
    def __init__(self, message: str, report: ValidityReport):
        super().__init__(message)
        self.report = report


class BlowdownImpossible(ValidityError):
    pass


class SearchExhaustedError(KConeError):
    def __init__(self, message: str, **diagnostics: Any):
        super().__init__(message)
        self.diagnostics = diagnostics


class RankError(KConeError):
    pass


class NoProgressionError(KConeError):
    pass


class IdentityViolation(KConeError):
    def __init__(self, message: str, terms: list[dict[str, Any]] | None = None):
        super().__init__(message)
        self.terms = terms or []


class AssemblyError(KConeError):
    pass


class IntegrityError(KConeError):
    pass
