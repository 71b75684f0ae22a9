"""Exception types shared across the package."""


class StructuralError(ValueError):
    """Malformed input: wrong shapes, non-finite entries, unreadable files.

    Distinct from :class:`SpectralValidationError`, which signals data that is
    well-formed but inadmissible.
    """


class SpectralValidationError(ValueError):
    """Spectral data violates the admissibility conditions (A1)/(A2).

    Carries the :class:`~slspec.spectra.ValidationReport` that triggered the
    rejection when one is available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NumericalError(RuntimeError):
    """A numerical stage failed: lost positivity, missing root brackets, ...

    ``stage`` names the pipeline stage that failed.
    """

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage
