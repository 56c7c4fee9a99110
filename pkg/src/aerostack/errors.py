"""Exception hierarchy shared across the toolkit."""


class AerostackError(Exception):
    """Base class for all toolkit errors."""


class InputError(AerostackError):
    """Bad input data or configuration (CLI exit code 2)."""


class ComputeError(AerostackError):
    """Failure inside a numeric routine (CLI exit code 3)."""


# --- data ingestion ---------------------------------------------------------

class MissingFileError(InputError):
    pass


class SchemaMismatchError(InputError):
    """CSV header or feature schema does not match the expected one."""

    def __init__(self, message, missing_columns=()):
        super().__init__(message)
        self.missing_columns = tuple(missing_columns)


class BadTimestampError(InputError):
    """Unparsable timestamp; carries the 1-based data row number."""

    def __init__(self, message, row):
        super().__init__(message)
        self.row = row


class MixedSensorsError(InputError):
    pass


class EmptyInputError(InputError):
    pass


class ConfigError(InputError):
    pass


# --- feature engineering ----------------------------------------------------

class EmptySchemaError(InputError):
    pass


class UnknownColumnError(InputError):
    pass


# --- learners / solvers -----------------------------------------------------

class NonFiniteError(ComputeError):
    pass


class DegenerateMatrixError(ComputeError):
    pass


class MaxIterationsError(ComputeError):
    pass


class TooFewRowsError(InputError):
    pass


class LeakageError(ComputeError):
    """Out-of-fold bookkeeping shows a model trained on its own row."""


# --- evaluation -------------------------------------------------------------

class LengthMismatchError(InputError):
    pass


class ZeroVarianceError(ComputeError):
    pass


class EmptyTestError(InputError):
    pass
