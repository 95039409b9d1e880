"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations

from typing import Any, Optional


class QFactorialError(Exception):
    """Base class; ``exit_status`` is what the CLI returns for this failure."""

    exit_status: int = 1

    def payload(self) -> dict[str, Any]:
        return {"detail": str(self), "type": type(self).__name__}


class InputError(QFactorialError):
    exit_status = 3


class FormSyntaxError(InputError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class InhomogeneousFormError(InputError):
    def __init__(self, degree_a: int, degree_b: int) -> None:
        super().__init__(f"inhomogeneous expression: terms of degree {degree_a} and {degree_b}")
        self.degrees = (degree_a, degree_b)


class PointFileError(InputError):
    pass


class DimensionMismatchError(InputError):
    pass


class DegreeMismatchError(InputError):
    pass


class FieldMismatchError(InputError):
    pass


class NotSingularError(InputError):
    pass


class PointOnCenterError(InputError):
    def __init__(self, point: Any) -> None:
        super().__init__(f"point {point} lies on the projection center")
        self.point = point


class CertificateError(InputError):
    """A stored or freshly built certificate failed exact re-verification."""


class BudgetExceededError(QFactorialError):
    exit_status = 4

    def __init__(self, message: str, partial: Optional[Any] = None) -> None:
        super().__init__(message)
        self.partial = partial

    def payload(self) -> dict[str, Any]:
        data = super().payload()
        if self.partial is not None:
            data["partial_lower_bound"] = self.partial
        return data


class ExhaustedAttemptsError(BudgetExceededError):
    pass


__all__ = [
    "QFactorialError",
    "InputError",
    "FormSyntaxError",
    "InhomogeneousFormError",
    "PointFileError",
    "DimensionMismatchError",
    "DegreeMismatchError",
    "FieldMismatchError",
    "NotSingularError",
    "PointOnCenterError",
    "CertificateError",
    "BudgetExceededError",
    "ExhaustedAttemptsError",
]
