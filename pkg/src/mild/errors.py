"""Exception types shared across the engine.

Absence of a solution, an uncertified window, or a saturated count are
ordinary return values, never exceptions.  Exceptions are reserved for
violated preconditions and malformed input.
"""

from __future__ import annotations


class MildError(Exception):
    """Base class for all engine errors."""


class ParseError(MildError):
    def __init__(self, message: str, line: int, column: int, expected: str | None = None):
        self.line = line
        self.column = column
        self.expected = expected
        loc = f"line {line}, column {column}"
        if expected:
            message = f"{message} (expected {expected})"
        super().__init__(f"{loc}: {message}")


class DegreeError(MildError):
    """An expression is not homogeneous of the required degree."""


class RingError(MildError):
    """A coefficient does not belong to the ambient coefficient ring."""


class DegreeCapError(MildError):
    """A basis or matrix was requested beyond the algebra's degree cap."""


class NotDStable(MildError):
    """d maps an ideal element outside the ideal; no induced differential."""

    def __init__(self, message: str, degree: int):
        self.degree = degree
        super().__init__(message)


class HypothesisViolated(MildError):
    """A model-construction hypothesis failed, with a witness degree."""

    def __init__(self, condition: str, degree: int | None, detail: str = ""):
        self.condition = condition
        self.degree = degree
        msg = f"hypothesis {condition} violated"
        if degree is not None:
            msg += f" at degree {degree}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NotSurjective(MildError):
    def __init__(self, degree: int, what: str = "morphism"):
        self.degree = degree
        super().__init__(f"{what} is not surjective in degree {degree}")


class NotQuasiIso(MildError):
    def __init__(self, degree: int, what: str = "morphism"):
        self.degree = degree
        super().__init__(f"{what} is not a quasi-isomorphism (fails at degree {degree})")


class LiftFailed(MildError):
    """The lifting linear system was inconsistent for some generator."""

    def __init__(self, generator: str, degree: int):
        self.generator = generator
        self.degree = degree
        super().__init__(
            f"no lift for generator {generator} (degree {degree}); a precondition is violated"
        )


class WindowExhausted(MildError):
    """A construction ran out of certified degrees before completing."""

    def __init__(self, message: str, certified_top: int):
        self.certified_top = certified_top
        super().__init__(message)
