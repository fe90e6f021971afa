class ParseError(ValueError):
    """Malformed complex, pair, ring or flavor input."""


class ValidationError(ValueError):
    """Well-formed input that breaks a structural rule."""


class ConsistencyError(RuntimeError):
    """An internal invariant failed. Always a bug."""
