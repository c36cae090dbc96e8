"""Exception hierarchy. Every error carries a stable machine-readable ``code``."""


class PseudoShiftError(Exception):
    code = "ERROR"

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self):
        return f"{self.code}: {self.message}"


class ScheduleError(PseudoShiftError):
    code = "SCHEDULE-NOT-INCREASING"


class SpaceMismatchError(PseudoShiftError):
    code = "SPACE-MISMATCH"


class ModeHypothesisError(PseudoShiftError):
    code = "MODE-HYPOTHESIS-FAILED"

    def __init__(self, message, witness=None):
        super().__init__(message, witness=witness)
        self.witness = witness


class TreeError(PseudoShiftError):
    """Raised by tree validation; ``code`` is CYCLE, OUTDEGREE or PARTIAL-PARENT."""

    def __init__(self, code, witness, message=None):
        super().__init__(message or f"{code} at vertex {witness!r}", witness=witness)
        self.code = code
        self.witness = witness


class ParamRangeError(PseudoShiftError):
    code = "PARAM-RANGE"


class ParseError(PseudoShiftError):
    code = "PARSE"

    def __init__(self, message, line=None, col=None):
        super().__init__(message, line=line, col=col)
        self.line = line
        self.col = col

    def __str__(self):
        where = ""
        if self.line is not None:
            where = f" (line {self.line}, col {self.col})"
        return f"{self.code}{where}: {self.message}"


class NonmonotoneFamilyError(ParseError):
    code = "NONMONOTONE-FAMILY"


class ValidationError(PseudoShiftError):
    code = "VALIDATION"

    def __init__(self, field, message):
        super().__init__(message, field=field)
        self.field = field

    def __str__(self):
        return f"{self.code} [{self.field}]: {self.message}"
