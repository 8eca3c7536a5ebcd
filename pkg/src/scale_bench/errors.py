"""Exception hierarchy shared across the workbench.

DataError covers malformed or inconsistent input data, SchemaError file
records that violate a declared schema (carrying a line number where
possible), NumericError numeric failures such as non-finite losses or
undefined correlations.  The CLI maps these to distinct exit codes.
"""


class ScaleBenchError(Exception):
    pass


class DataError(ScaleBenchError):
    pass


class SchemaError(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericError(ScaleBenchError):
    pass
