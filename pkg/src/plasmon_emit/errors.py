"""Exception hierarchy.

Every error derives from ``PlasmonEmitError`` so callers (and the CLI) can map
families of failures onto exit codes.
"""


class PlasmonEmitError(Exception):
    pass


class DomainError(PlasmonEmitError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(PlasmonEmitError, ValueError):
    """A query falls outside tabulated or band support (no extrapolation)."""


class ConfigError(PlasmonEmitError, ValueError):
    """Inconsistent configuration, e.g. dipole orientation vs. density kind."""


class ParseError(PlasmonEmitError, ValueError):
    def __init__(self, message, line=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key


class ConvergenceError(PlasmonEmitError, ArithmeticError):
    def __init__(self, message, last_increment=None):
        super().__init__(message)
        self.last_increment = last_increment


class NumericError(PlasmonEmitError, ArithmeticError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class ResourceError(PlasmonEmitError, RuntimeError):
    pass
