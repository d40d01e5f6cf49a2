"""Exception types shared across the package."""

from __future__ import annotations


class AdelicError(Exception):
    """Base class for package errors."""

    code = "error"


class InvalidPlace(AdelicError):
    code = "invalid-place"


class InvalidInput(AdelicError):
    code = "invalid-input"


class FactorizationTimeout(AdelicError):
    """Raised when the step budget runs out; carries what was found so far."""

    code = "factorization-timeout"

    def __init__(self, message: str, partial=None, cofactor: int = 1):
        super().__init__(message)
        self.partial = partial
        self.cofactor = cofactor


class DegenerateMap(AdelicError):
    code = "degenerate-map"


class DegreeCapExceeded(AdelicError):
    code = "degree-cap-exceeded"


class RootFindingError(AdelicError):
    code = "root-finding-failed"


class QuadratureError(AdelicError):
    """Refinement did not reach the tolerance; carries the last two values."""

    code = "quadrature-not-converged"

    def __init__(self, message: str, values: tuple[float, float] | None = None):
        super().__init__(message)
        self.values = values


class HeightOverflow(AdelicError):
    code = "height-iteration-overflow"


class EmptyEnclosure(AdelicError):
    code = "empty-enclosure"


class UnsupportedMap(AdelicError):
    code = "unsupported-map"


class ParseError(AdelicError):
    """Expression syntax error with the byte offset of the offending token."""

    code = "parse-error"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class OrbitAtInfinity(AdelicError):
    code = "orbit-at-infinity"
