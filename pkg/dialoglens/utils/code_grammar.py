"""
Code string grammar

    code      := activity '/' entity [ ('//' | '/') criterion ]
    activity  := WORD [ ':' TAG ]
    entity    := 'DOCUMENT' | 'SECTION-' INT | MESSAGEKIND '-' INT | TASK
    criterion := WORD

Input is case-insensitive; output is the upper-case canonical form.
"""
import re
from typing import Optional

from dialoglens.core.exceptions import CodeParseError, ParseErrorKind as K
from dialoglens.models.scheme import (
    ActivityGroup,
    ActivityKind,
    ArtifactRef,
    Code,
    CodingScheme,
    DiscussVerb,
    EntityKind,
    MessageKind,
    MessageRef,
    TaskRef,
    entity_kind,
)

_ALLOWED = re.compile(r"[A-Z0-9/:\-]")
_WORD = re.compile(r"[A-Z]+")
_INT = re.compile(r"[0-9]+")
_TAG = re.compile(r"[A-Z0-9\-]+")

# Spelling used by the printed grammar; ACCEPTANCE is canonical
MESSAGE_ALIASES = {"ACCEPTATION": MessageKind.ACCEPTANCE}

_GROUP_TOKENS = {
    "MANAGE": ActivityGroup.MANAGE,
    "READ": ActivityGroup.READ,
    "REQUEST": ActivityGroup.REQUEST,
}


class _Parser:
    def __init__(self, text: str, scheme: CodingScheme, strict: bool):
        self._raw = text
        self._text = text.upper()
        self._end = len(self._text)
        self._pos = 0
        self._scheme = scheme
        self._strict = strict

    def _fail(self, kind: K, detail: str, pos: Optional[int] = None):
        raise CodeParseError(kind, self._pos if pos is None else pos, self._raw, detail)

    def _match(self, pattern: re.Pattern) -> Optional[str]:
        m = pattern.match(self._text, self._pos)
        if not m:
            return None
        self._pos = m.end()
        return m.group(0)

    def _peek(self, s: str) -> bool:
        return self._text.startswith(s, self._pos)

    def parse(self) -> Code:
        if not self._text:
            self._fail(K.EMPTY_CODE, "code is empty")
        for i, ch in enumerate(self._text):
            if not _ALLOWED.match(ch):
                self._fail(K.INVALID_CHARACTER, f"character {self._raw[i]!r} is not allowed", i)

        activity = self._activity()
        if not self._peek("/"):
            self._fail(K.MISSING_ENTITY, "expected '/' followed by an entity")
        self._pos += 1
        entity = self._entity(activity)
        criterion = self._criterion(activity)
        if self._pos != self._end:
            self._fail(K.TRAILING_GARBAGE, f"unexpected {self._raw[self._pos:]!r}")
        return Code(activity=activity, entity=entity, criterion=criterion)

    def _activity(self) -> ActivityKind:
        start = self._pos
        word = self._match(_WORD)
        if word is None:
            self._fail(K.UNKNOWN_ACTIVITY, "expected an activity")
        group = _GROUP_TOKENS.get(word)
        verb = None
        if group is None:
            try:
                verb = DiscussVerb(word)
            except ValueError:
                self._fail(K.UNKNOWN_ACTIVITY, f"{word} is not an activity", start)
            group = ActivityGroup.DISCUSS
            if verb not in self._scheme.discuss_verbs:
                self._fail(K.UNKNOWN_ACTIVITY, f"{word} is not a discussion verb of {self._scheme.name}", start)
        if group not in self._scheme.groups:
            self._fail(K.UNKNOWN_ACTIVITY, f"{word} is not an activity of {self._scheme.name}", start)

        qualifier = None
        if self._peek(":"):
            colon = self._pos
            if group != ActivityGroup.DISCUSS:
                self._fail(K.QUALIFIER_ON_NON_DISCUSS, f"{word} takes no qualifier", colon)
            self._pos += 1
            qualifier = self._match(_TAG)
            if qualifier is None:
                self._fail(K.TRAILING_GARBAGE, "empty qualifier after ':'", colon)
        return ActivityKind(group=group, discuss_verb=verb, qualifier=qualifier)

    def _label(self, word: str) -> int:
        if not self._peek("-"):
            self._fail(K.MISSING_LABEL, f"{word} needs a '-n' label")
        self._pos += 1
        digits_at = self._pos
        digits = self._match(_INT)
        if digits is None:
            self._fail(K.MISSING_LABEL, f"{word}- must be followed by an integer")
        value = int(digits)
        if value < 1:
            self._fail(K.MISSING_LABEL, f"{word} label must be at least 1", digits_at)
        return value

    def _entity(self, activity: ActivityKind):
        start = self._pos
        word = self._match(_WORD)
        if word is None:
            self._fail(K.MISSING_ENTITY, "expected an entity after '/'")

        if word == "DOCUMENT":
            entity = ArtifactRef()
        elif word == "SECTION":
            entity = ArtifactRef(section=self._label(word))
        elif word in MESSAGE_ALIASES or word in MessageKind.__members__:
            kind = MESSAGE_ALIASES.get(word) or MessageKind(word)
            if kind not in self._scheme.message_kinds:
                self._fail(K.UNKNOWN_ENTITY, f"{word} is not a message of {self._scheme.name}", start)
            entity = MessageRef(message_kind=kind, label=self._label(word))
        elif word in self._scheme.tasks:
            entity = TaskRef(task=word)
        else:
            self._fail(K.UNKNOWN_ENTITY, f"{word} is not an entity", start)

        if self._strict:
            allowed = self._scheme.legality[activity.group].entity_kinds
            kind = entity_kind(entity)
            if kind not in allowed:
                self._fail(K.UNKNOWN_ENTITY, f"{kind.value.lower()} entity {word} not allowed for {activity.token}", start)
        return entity

    def _criterion(self, activity: ActivityKind) -> Optional[str]:
        if not self._peek("/"):
            return None
        sep = self._pos
        self._pos += 2 if self._peek("//") else 1
        start = self._pos
        word = self._match(_WORD)
        if word is None:
            self._fail(K.UNKNOWN_CRITERION, "expected a criterion")
        if word not in self._scheme.criteria:
            self._fail(K.UNKNOWN_CRITERION, f"{word} is not a criterion of {self._scheme.name}", start)
        if self._strict and not self._scheme.legality[activity.group].criterion_allowed:
            self._fail(K.CRITERION_ON_NON_DISCUSS, f"{activity.token} takes no criterion", sep)
        return word


def parse(text: str, scheme: CodingScheme, strict: bool = True) -> Code:
    return _Parser(text, scheme, strict).parse()


def format_entity(code: Code) -> str:
    entity = code.entity
    kind = entity_kind(entity)
    if kind == EntityKind.TASK:
        return entity.task
    if kind == EntityKind.ARTIFACT:
        return "DOCUMENT" if entity.section is None else f"SECTION-{entity.section}"
    return f"{entity.message_kind.value}-{entity.label}"


def render(code: Code) -> str:
    activity = code.activity.token
    if code.activity.qualifier:
        activity += f":{code.activity.qualifier.upper()}"
    text = f"{activity}/{format_entity(code)}"
    if code.criterion:
        text += f"//{code.criterion.upper()}"
    return text
