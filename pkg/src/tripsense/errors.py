"""Exception types shared across the pipeline.

Everything raised on bad input data derives from DataError, which the CLI
maps to exit code 3. Unexpected failures fall through to exit code 4.
"""


class TripsenseError(Exception):
    """Base class for all toolkit errors."""


class DataError(TripsenseError):
    """Input data or parameters the pipeline cannot work with."""


class MalformedRow(DataError):
    def __init__(self, line_no: int, detail: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {detail}")


class MissingColumn(DataError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"required column {name!r} not found in header")


class ConflictingInfluence(DataError):
    def __init__(self, trip_id: str, values: tuple):
        self.trip_id = trip_id
        super().__init__(f"trip {trip_id!r} reports conflicting influences: {sorted(values)}")


class EmptyCorpus(DataError):
    pass


class EmptyData(DataError):
    pass


class SingleClass(DataError):
    pass


class DegenerateMatrix(DataError):
    pass


class TooFewSamples(DataError):
    pass


class TooFewMinority(DataError):
    pass


class WidthMismatch(DataError):
    pass


class InvalidConfig(DataError):
    pass
