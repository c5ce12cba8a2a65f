"""Error types. Every error carries a stable machine-readable code."""


class NovistokeError(Exception):
    code = "DOMAIN_ERROR"
    exit_code = 1

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message


class UndecidableSign(NovistokeError):
    code = "UNDECIDABLE_SIGN"


class IdenticalFactors(NovistokeError):
    code = "IDENTICAL_FACTORS"


class ArcMismatch(NovistokeError):
    code = "ARC_MISMATCH"


class NotRepresentable(NovistokeError):
    code = "NOT_REPRESENTABLE"


class InvalidObject(NovistokeError):
    """Raised when a constructed object violates its invariants."""

    code = "INVALID_OBJECT"


class ParseError(NovistokeError):
    code = "PARSE_ERROR"
    exit_code = 2

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ReferenceResolutionError(NovistokeError):
    code = "REFERENCE_ERROR"
    exit_code = 2
