"""Exception types shared across the package.

The CLI maps these onto exit codes: parse errors exit 2, guard violations
exit 3, precondition failures exit 4.
"""


class PolyParseError(ValueError):
    """Syntax error in polynomial text; carries the 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class GuardExceeded(RuntimeError):
    """An enumeration / factorization / memory guard was hit."""


class PreconditionError(ValueError):
    """Input violates a documented precondition (e.g. degenerate form)."""
