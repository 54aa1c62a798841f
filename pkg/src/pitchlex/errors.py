"""Exception types raised across the package."""


class PitchlexError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(PitchlexError):
    """Corpus file violates the documented schema (bad field, row, or header)."""


class SideFileError(PitchlexError):
    """A referenced description/subtitle side-file could not be read."""


class ParseError(PitchlexError):
    """Subtitle input is malformed; message carries a line number when known."""


class DictionaryError(PitchlexError):
    """Category dictionary file is malformed."""


class ConfigError(PitchlexError):
    """Run configuration is invalid (missing category mapping, bad flag, ...)."""


class FitError(PitchlexError):
    """Logistic fit could not be completed."""


class DegenerateOutcomeError(FitError):
    """Outcome vector contains a single class."""


class SeparationError(FitError):
    """Complete or quasi-separation detected (coefficients diverging)."""

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = list(columns)


class CollinearityError(FitError):
    """Information matrix is singular (exactly collinear predictors)."""


class InfiniteVIFError(PitchlexError):
    """A predictor is an exact linear combination of the others."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column
