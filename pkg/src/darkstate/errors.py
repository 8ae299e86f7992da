"""Exception types raised by darkstate."""


class ContractError(ValueError):
    """An input violates a documented precondition (e.g. non-Hermitian)."""


class UnsupportedRegimeError(ValueError):
    """The closed-form solution does not cover the requested parameters."""


class NoSupportError(ValueError):
    """Conditioning on an event that has zero probability."""


class IntegrationError(RuntimeError):
    """Numerical integration drifted beyond the allowed trace error."""


class NumericalRankError(RuntimeError):
    """A null space expected to be non-empty came out empty."""
