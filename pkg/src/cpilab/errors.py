class CPILabError(Exception):
    pass


class ConfigError(CPILabError, ValueError):
    """Malformed configuration, unknown keys or out-of-range values."""


class MaterialError(ConfigError):
    """Unknown material name or a dispersion model invalid over the band."""


class GridError(CPILabError, ValueError):
    pass


class NumericalError(CPILabError):
    """Base for failures of a numerical procedure on valid input."""


class WrapAroundError(NumericalError):
    """A time shift would push field content across the periodic grid boundary."""


class FitError(NumericalError):
    pass


class NoDipError(FitError):
    pass


class AmbiguityError(NumericalError):
    pass


class UndersampledError(NumericalError):
    pass
