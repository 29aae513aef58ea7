"""Exception types shared across the library."""


class ValidationError(ValueError):
    """Input fails a structural or physical precondition."""


class InvalidBipartitionError(ValidationError):
    """Mode grouping is empty, covers every mode, or is out of range."""


class NumericalFailureError(RuntimeError):
    """A computation lost enough precision that its result is unusable."""


class DegenerateSpectrumError(NumericalFailureError):
    """Eigenvalues that should come in pure +/- i nu pairs acquired real parts."""


class OracleInapplicableError(RuntimeError):
    """The quadrature oracle cannot handle the requested integrand."""


class OptimizationFailureError(RuntimeError):
    """No restart of the probe search produced a usable objective value."""


class StateFileError(ValueError):
    """A state or probe file failed to parse."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class SampleSizeError(ValueError):
    """Too few measurement samples for the requested estimate."""
