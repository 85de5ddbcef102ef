"""Exception types shared across the package."""


class StiefelcastError(Exception):
    """Base class for all package errors."""


class DimensionError(StiefelcastError):
    """Operand shapes do not conform."""


class ZeroDegreeError(StiefelcastError):
    """A graph node has degree <= 0, so D^{-1/2} is undefined."""


class EigFailure(StiefelcastError):
    """The symmetric eigensolver did not converge."""


class RankDeficientError(StiefelcastError):
    """Gram matrix is not positive definite even after regularization."""


class ConfigError(StiefelcastError):
    """Invalid configuration value or combination."""


class DataError(StiefelcastError):
    """Dataset is unusable for the requested operation (too short, empty split)."""


class ParseError(StiefelcastError):
    """A cell in an input file could not be parsed; message names row/column."""


class ShapeError(StiefelcastError):
    """Loaded data does not match the shape declared by its manifest."""


class FormatError(StiefelcastError):
    """Checkpoint or config file is malformed (bad magic, version, truncation)."""
