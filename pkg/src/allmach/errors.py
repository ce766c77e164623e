"""Exception hierarchy shared by the library and the CLI."""


class EulerError(Exception):
    """Base class for every error raised by allmach."""


class NonPositiveDensity(EulerError):
    pass


class NonPositivePressure(EulerError):
    pass


class InvalidEntropyState(EulerError):
    pass


class NonPositiveInput(EulerError):
    pass


class DegenerateEigensystem(EulerError):
    pass


class InvalidGrid(EulerError):
    pass


class NonFiniteState(EulerError):
    pass


class DegenerateFit(EulerError):
    pass


class ConfigError(EulerError):
    pass
