"""Exception types shared across the package."""


class InputError(ValueError):
    """An input was malformed or outside what an operation accepts."""


class SingularMatrixError(ArithmeticError):
    """A matrix that had to be inverted has determinant zero."""


class LedgerError(ValueError):
    """A blow-up ledger step does not balance against the fibre class."""


class UndecidedError(RuntimeError):
    """The question is well posed but this library has no procedure for it."""
