"""Exception hierarchy shared by the model, fitting and I/O layers."""


class AeroInterfError(Exception):
    """Base class for all errors raised by this package."""


# model
class DivergentIntegral(AeroInterfError, ValueError):
    """Path-loss exponent <= 2: the Campbell integral does not converge."""


class QuadratureNonConvergence(AeroInterfError, RuntimeError):
    pass


# metrics
class EmptySeries(AeroInterfError, ValueError):
    pass


class NonPositivePower(AeroInterfError, ValueError):
    pass


class UndefinedVariance(AeroInterfError, ValueError):
    """Observed series is constant in the requested domain, so R^2 is undefined."""


# estimation / transfer
class InsufficientData(AeroInterfError, ValueError):
    pass


class MissingBin(AeroInterfError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing bin"


# workbench
class ParseError(AeroInterfError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnitMismatch(AeroInterfError, ValueError):
    pass


class DuplicateBin(AeroInterfError, ValueError):
    pass


class OffGridAltitude(AeroInterfError, ValueError):
    pass


class UnknownProfile(AeroInterfError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown profile"


class MissingReferenceFit(AeroInterfError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing reference fit"


class ValidationFailure(AeroInterfError):
    def __init__(self, check):
        self.check = check
        super().__init__(f"validation check failed: {check.name} ({check.detail})")
