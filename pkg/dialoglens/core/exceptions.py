"""
Exception hierarchy

Data-level problems (violations, lint warnings) are returned as models;
these exceptions are for inputs that cannot be turned into a result at all.
"""
from enum import Enum
from typing import Optional, Sequence


class DialogLensError(Exception):
    """Base error carrying a human-readable detail string"""

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ParseErrorKind(str, Enum):
    EMPTY_CODE = "EmptyCode"
    INVALID_CHARACTER = "InvalidCharacter"
    UNKNOWN_ACTIVITY = "UnknownActivity"
    MISSING_ENTITY = "MissingEntity"
    UNKNOWN_ENTITY = "UnknownEntity"
    MISSING_LABEL = "MissingLabel"
    UNKNOWN_CRITERION = "UnknownCriterion"
    CRITERION_ON_NON_DISCUSS = "CriterionOnNonDiscuss"
    QUALIFIER_ON_NON_DISCUSS = "QualifierOnNonDiscuss"
    TRAILING_GARBAGE = "TrailingGarbage"


class CodeParseError(DialogLensError):
    """A code string rejected by the grammar, with the offending column"""

    def __init__(self, kind: ParseErrorKind, position: int, text: str, detail: str):
        self.kind = kind
        self.position = position
        self.text = text
        super().__init__(f"{kind.value} at column {position + 1} of {text!r}: {detail}")


class SchemeErrorKind(str, Enum):
    SYNTAX_ERROR = "SyntaxError"
    DUPLICATE_DECLARATION = "DuplicateDeclaration"
    EMPTY_ACTIVITY_SET = "EmptyActivitySet"
    INCOMPLETE_LEGALITY = "IncompleteLegality"
    ENCODING_ERROR = "EncodingError"


class SchemeFileError(DialogLensError):
    def __init__(self, kind: SchemeErrorKind, line: int, detail: str):
        self.kind = kind
        self.line = line
        super().__init__(f"line {line}: {kind.value}: {detail}")


class ProtocolLoadError(DialogLensError):
    """Raised with every problem found in a protocol file, not just the first"""

    def __init__(self, issues: Sequence["ProtocolIssue"], source: Optional[str] = None):  # noqa: F821
        self.issues = list(issues)
        self.source = source
        where = f" in {source}" if source else ""
        super().__init__(f"{len(self.issues)} problem(s){where}")


class LagTooLarge(DialogLensError):
    def __init__(self, lag: int, length: int):
        self.lag = lag
        self.length = length
        super().__init__(f"lag {lag} needs a sequence longer than {lag}, got {length}")


class InvalidAlpha(DialogLensError):
    def __init__(self, alpha: float):
        self.alpha = alpha
        super().__init__(f"alpha must lie strictly between 0 and 1, got {alpha}")


class SpanMismatch(DialogLensError):
    pass


class ConfigError(DialogLensError):
    """Bad flags, config keys or unreadable files; maps to exit code 2"""
