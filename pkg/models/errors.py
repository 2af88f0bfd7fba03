"""
Exception hierarchy for the microcoil toolkit
"""


class MicrocoilError(ValueError):
    """Base class for domain errors (CLI exit status 1)"""


class GeometryError(MicrocoilError):
    """Coil geometry is physically impossible or degenerate"""


class UnsupportedCombinationError(MicrocoilError):
    """Requested model does not apply to the given coil shape"""


class SingularityError(MicrocoilError):
    """Field point lies on a current filament"""


class EmptyResultError(MicrocoilError):
    """No feasible design survived the constraints"""


class QuantityError(ValueError):
    """Malformed or unit-less quantity text (CLI exit status 2)"""
