"""Exception hierarchy.

Every error raised by the library derives from :class:`FractoError`, so callers
(the CLI in particular) can separate bad input from genuine bugs.
"""


class FractoError(Exception):
    """Base class for all library errors."""


# ground spaces and convexities
class OutOfRange(FractoError, ValueError):
    pass


class SpaceMismatch(FractoError, ValueError):
    pass


class SpaceTooLarge(FractoError):
    pass


class MissingEntry(FractoError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ExtensivityViolation(FractoError, ValueError):
    pass


class EmptyList(FractoError, ValueError):
    pass


# fractoconvexities and expressions
class UnknownConvexityId(FractoError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DuplicateId(FractoError, ValueError):
    pass


class ArityError(FractoError, ValueError):
    pass


class ExprSyntaxError(FractoError):
    """Parse failure at a byte ``offset`` of the input, with what was expected."""

    def __init__(self, offset: int, expected: str, found: str = ""):
        self.offset = offset
        self.expected = expected
        self.found = found
        msg = f"at byte {offset}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


# independence checks
class PreconditionNotChecked(FractoError):
    pass


class ArityMismatch(FractoError, ValueError):
    pass


# models
class NotAPermutation(FractoError, ValueError):
    pass


class WindowTooSmall(FractoError, ValueError):
    pass


class UnknownCenter(FractoError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NumericalFailure(FractoError, ArithmeticError):
    pass


class EmptySubspace(FractoError, ValueError):
    pass


class SpaceFileError(FractoError, ValueError):
    pass
