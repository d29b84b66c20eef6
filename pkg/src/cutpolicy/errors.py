"""Exception types shared across the package."""


class CutPolicyError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CutPolicyError):
    """Malformed input file."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class DimensionError(CutPolicyError):
    """Array shapes or row counts do not match."""


class ConfigError(CutPolicyError):
    """Invalid hyperparameter or configuration value."""


class DegenerateInputError(CutPolicyError):
    """An objective is undefined for the given input (e.g. no edges)."""


class PreconditionError(CutPolicyError):
    """An operation was called on input outside its domain."""


class SizeGuardError(CutPolicyError):
    """Input too large for exhaustive enumeration."""


class NoCandidatesError(CutPolicyError):
    """A node has no neighbor-bearing partition to move to."""
