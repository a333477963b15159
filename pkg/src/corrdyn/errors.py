"""Exception hierarchy shared by every corrdyn module."""


class CorrdynError(Exception):
    """Base class; ``exit_code`` is what the CLI returns when this escapes."""

    exit_code = 4


class ConfigInvalid(CorrdynError):
    exit_code = 2

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ParameterDegenerate(ConfigInvalid):
    pass


class DegenerateCrossRatio(ConfigInvalid):
    pass


class BadParameters(ConfigInvalid):
    pass


class OutOfStrip(ConfigInvalid):
    pass


class UnknownSuite(ConfigInvalid):
    pass


class NotSturmian(ConfigInvalid):
    pass


class NoConvergence(CorrdynError):
    exit_code = 3

    def __init__(self, message, last_residual=None):
        super().__init__(message)
        self.last_residual = last_residual


class SamplingDegenerate(CorrdynError):
    pass


class DegenerateRoot(CorrdynError):
    pass


class OrbitHitPole(CorrdynError):
    pass


class InvariantViolation(CorrdynError):
    exit_code = 4
