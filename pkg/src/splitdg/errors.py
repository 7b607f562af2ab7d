"""Exception types raised by the library and mapped to CLI exit codes."""


class SplitDGError(Exception):
    """Base class for all library errors."""


class NumericalError(SplitDGError):
    """Failure of a numerical procedure (CLI exit code 2)."""


class NonConvergence(NumericalError):
    pass


class NonPositiveJacobian(NumericalError):
    def __init__(self, element, node, value):
        self.element = element
        self.node = node
        self.value = value
        super().__init__(f"non-positive Jacobian {value:.3e} in element {element} at node {node}")


class ConfigError(SplitDGError):
    """Invalid configuration (CLI exit code 1)."""


class ParseError(ConfigError):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class ValidationError(ConfigError):
    def __init__(self, field, message=""):
        self.field = field
        super().__init__(f"{field}: {message}" if message else field)
