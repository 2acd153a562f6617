"""Exception hierarchy shared by every module in the package."""


class PwlCorrError(Exception):
    """Base class for all package errors."""


class ParameterError(PwlCorrError, ValueError):
    """A correlator or mixture parameter is outside its valid range."""


class DomainError(PwlCorrError, ValueError):
    """A correlation value or count lies outside the function's domain."""


class NumericError(PwlCorrError, ArithmeticError):
    """Quadrature or fitting failed to reach the requested accuracy."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class DegenerateInputError(PwlCorrError, ValueError):
    """Input data cannot be processed (constant vector, empty batch, ...)."""


class SpecMismatchError(PwlCorrError, ValueError):
    """A calibration model was applied to a correlator it was not built for."""


class ModelFormatError(PwlCorrError, ValueError):
    """A calibration model file could not be parsed."""


class ModelVersionError(ModelFormatError):
    """A calibration model file carries an unsupported format version."""
