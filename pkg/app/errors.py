"""
Exception hierarchy shared by the numerics, the CLI and the HTTP service.
"""

from typing import Optional, Sequence, Tuple


class QDPIError(Exception):
    """Base class for every error raised by the toolkit."""


class DimensionError(QDPIError):
    """Operand shapes or subsystem dimensions do not fit together."""


class InvalidInputError(QDPIError):
    """A state, ensemble, channel or parameter violates its invariants."""


class NotHermitianError(InvalidInputError):
    """Matrix deviates from its adjoint beyond tolerance."""

    def __init__(self, deviation: float, tolerance: float):
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(
            f"matrix is not Hermitian: ||A - A^dag||_F = {deviation:.3e} > {tolerance:.3e}"
        )


class NegativityError(InvalidInputError):
    """Matrix has an eigenvalue below the positivity tolerance."""

    def __init__(self, eigenvalue: float, tolerance: float):
        self.eigenvalue = eigenvalue
        self.tolerance = tolerance
        super().__init__(
            f"matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e} < -{tolerance:.3e}"
        )


class ConsistencyError(QDPIError):
    """An internal reconstruction did not reproduce its input."""


class UnknownInequalityError(QDPIError):
    """Inequality name not recognised by the checker registry."""


class FileFormatError(QDPIError):
    """A Kraus, state or ensemble file is malformed."""

    def __init__(self, path: str, message: str, operator_index: Optional[int] = None):
        self.path = path
        self.operator_index = operator_index
        where = f" (operator {operator_index})" if operator_index is not None else ""
        super().__init__(f"{path}{where}: {message}")


class ChannelExprError(QDPIError):
    """Channel expression could not be parsed or typed."""

    def __init__(
        self,
        message: str,
        kind: str,
        line: int,
        column: int,
        expected: Sequence[str] = (),
    ):
        self.kind = kind
        self.line = line
        self.column = column
        self.expected: Tuple[str, ...] = tuple(expected)
        suffix = f"; expected one of: {', '.join(self.expected)}" if self.expected else ""
        super().__init__(f"{kind} error at line {line}, column {column}: {message}{suffix}")
