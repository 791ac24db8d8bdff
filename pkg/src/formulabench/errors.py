"""Exception types shared across the toolkit.

Validation failures raise subclasses of :class:`FormulaBenchError`; the CLI maps
them to exit code 1 and plain OS errors to exit code 2.
"""


class FormulaBenchError(Exception):
    """Base class for all toolkit errors."""


# --- formula model ---

class TokenizeError(FormulaBenchError):
    """A LaTeX string could not be tokenized at all."""


class UnbalancedBracesError(TokenizeError):
    """Group-open/close mismatch in a LaTeX string."""


class UnknownEscapeError(TokenizeError):
    """Backslash followed by a character that is neither a letter nor escapable."""


class ParseFailureError(FormulaBenchError):
    """Formula uses a construct outside the supported layout grammar."""


class OptFailureError(FormulaBenchError):
    """Layout tree cannot be read as an operator tree (e.g. dangling infix)."""


# --- clustering ---

class DuplicateInstanceIdError(FormulaBenchError):
    pass


class UnknownInstanceError(FormulaBenchError):
    pass


# --- collection I/O ---

class MalformedLineError(FormulaBenchError):
    def __init__(self, path, line_no, reason):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = str(path)
        self.line_no = line_no
        self.reason = reason


class DuplicateIdError(FormulaBenchError):
    pass


class MixedRunTagsError(FormulaBenchError):
    pass


class UnknownScaleError(FormulaBenchError):
    pass


class GradeOutOfRangeError(FormulaBenchError):
    pass


# --- pooling ---

class EmptyRunsError(FormulaBenchError):
    pass


# --- judgments ---

class MissingCounterpartError(FormulaBenchError):
    pass


class NoThresholdError(FormulaBenchError):
    pass


class UnpairedRecordsError(FormulaBenchError):
    pass


class EmptyIntersectionError(FormulaBenchError):
    pass


# --- metrics ---

class ZeroRelevantError(FormulaBenchError):
    pass


class UnknownMeasureError(FormulaBenchError):
    pass


# --- meta-analysis ---

class MismatchedSystemsError(FormulaBenchError):
    pass


class TooFewSystemsError(FormulaBenchError):
    pass


class MissingMeasureError(FormulaBenchError):
    pass


class UnknownComplexityError(FormulaBenchError):
    pass


# --- retriever ---

class EmptyQueryError(FormulaBenchError):
    pass


# --- assessment service ---

class UnknownTopicError(FormulaBenchError):
    pass


class UnknownItemError(FormulaBenchError):
    pass
