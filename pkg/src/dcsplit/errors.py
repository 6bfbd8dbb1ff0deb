"""Exception hierarchy shared by every module and mapped to CLI exit codes."""

from __future__ import annotations

from typing import Any


class DcSplitError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ValidationError(DcSplitError):
    """Malformed complex, function or JSON payload.

    ``problems`` lists every violated condition found, not only the first.
    """

    def __init__(self, problems: list[str] | str):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class Discontinuous(ValidationError):
    def __init__(self, facet: int):
        self.facet = facet
        super().__init__(f"pieces disagree on facet {facet}")


class ZeroVector(DcSplitError):
    pass


class WrongDim(ValidationError):
    pass


class DimMismatch(ValidationError):
    pass


class EmptyList(ValidationError):
    pass


class CapExceeded(DcSplitError):
    exit_code = 3

    def __init__(self, name: str, value: int, limit: int):
        self.name, self.value, self.limit = name, value, limit
        super().__init__(f"{name}={value} exceeds cap {limit} (raise it via DCSPLIT_CAPS)")


class Infeasible(DcSplitError):
    """Carries a Farkas certificate that can be checked exactly."""

    exit_code = 2

    def __init__(self, message: str, certificate: Any = None):
        self.certificate = certificate
        super().__init__(message)


class NotBalanced(DcSplitError):
    def __init__(self, face: int | None, residual: Any = None):
        self.face, self.residual = face, residual
        where = "around codim-2 face %s" % face if face is not None else "along a dual cycle"
        super().__init__(f"weights fail to balance {where}")


class NotConvex(DcSplitError):
    pass


class ComplexMismatch(DcSplitError):
    pass


class DecompositionMismatch(DcSplitError):
    pass


class NotRegular(DcSplitError):
    exit_code = 2


class NotSubmodular(DcSplitError):
    pass


class ParamsTooSmall(DcSplitError):
    pass
