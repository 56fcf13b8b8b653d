"""
Reader for line-oriented scheme files

    scheme v1 <name>
    activities: MANAGE, READ, REQUEST, DISCUSS
    discuss: ACCEPT, DEVELOP, ...
    tasks: PROJECT, MEETING
    criteria: FORM, CONTENT
    rule: DISCUSS -> ARTIFACT, MESSAGE [criterion]
"""
import re
from typing import Optional

from dialoglens.core.exceptions import SchemeErrorKind as E, SchemeFileError
from dialoglens.models.scheme import (
    ActivityGroup,
    CodingScheme,
    DiscussVerb,
    EntityKind,
    LegalityRule,
)

_HEADER = re.compile(r"^scheme\s+v1\s+(\S.*)$")
_SECTION = re.compile(r"^([A-Za-z_]+)\s*:\s*(.*)$")
_RULE = re.compile(r"^rule\s*:\s*([A-Za-z]+)\s*->\s*(.*?)\s*(\[criterion\])?$", re.IGNORECASE)
_TOKEN = re.compile(r"^[A-Z]+$")  # same alphabet as code words

SECTIONS = ("activities", "discuss", "tasks", "criteria")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _tokens(text: str, lineno: int) -> list[str]:
    if not text:
        return []
    tokens = [t.strip().upper() for t in text.split(",")]
    seen: set[str] = set()
    for token in tokens:
        if not _TOKEN.match(token):
            raise SchemeFileError(E.SYNTAX_ERROR, lineno, f"bad token {token!r}")
        if token in seen:
            raise SchemeFileError(E.DUPLICATE_DECLARATION, lineno, f"{token} listed twice")
        seen.add(token)
    return tokens


def _enum_tokens(enum, tokens: list[str], lineno: int, what: str):
    try:
        return frozenset(enum(t) for t in tokens)
    except ValueError as e:
        raise SchemeFileError(E.SYNTAX_ERROR, lineno, f"unknown {what}: {e}") from e


def read_scheme(text: str) -> CodingScheme:
    lines = [(n, _strip(raw)) for n, raw in enumerate(text.splitlines(), start=1)]
    lines = [(n, line) for n, line in lines if line]
    if not lines:
        raise SchemeFileError(E.SYNTAX_ERROR, 1, "empty scheme file")

    lineno, first = lines[0]
    header = _HEADER.match(first)
    if not header:
        raise SchemeFileError(E.SYNTAX_ERROR, lineno, "expected 'scheme v1 <name>'")
    name = header.group(1).strip()

    sections: dict[str, tuple[int, list[str]]] = {}
    rules: dict[ActivityGroup, tuple[int, LegalityRule]] = {}
    pending: Optional[tuple[str, int]] = None

    for lineno, line in lines[1:]:
        if pending is not None:
            key, key_line = pending
            pending = None
            if not _SECTION.match(line) and not _RULE.match(line):
                sections[key] = (key_line, _tokens(line, lineno))
                continue
            sections[key] = (key_line, [])

        rule = _RULE.match(line)
        if rule:
            try:
                group = ActivityGroup(rule.group(1).upper())
            except ValueError:
                raise SchemeFileError(E.SYNTAX_ERROR, lineno, f"unknown activity group {rule.group(1)!r}")
            if group in rules:
                raise SchemeFileError(E.DUPLICATE_DECLARATION, lineno, f"second rule for {group.value}")
            kinds = _enum_tokens(EntityKind, _tokens(rule.group(2), lineno), lineno, "entity kind")
            if not kinds:
                raise SchemeFileError(E.SYNTAX_ERROR, lineno, f"rule for {group.value} allows no entity")
            rules[group] = (lineno, LegalityRule(entity_kinds=kinds, criterion_allowed=bool(rule.group(3))))
            continue

        section = _SECTION.match(line)
        if not section:
            raise SchemeFileError(E.SYNTAX_ERROR, lineno, f"unrecognised line {line!r}")
        key = section.group(1).lower()
        if key not in SECTIONS:
            raise SchemeFileError(E.SYNTAX_ERROR, lineno, f"unknown section {section.group(1)!r}")
        if key in sections:
            raise SchemeFileError(E.DUPLICATE_DECLARATION, lineno, f"section {key} declared twice")
        if section.group(2):
            sections[key] = (lineno, _tokens(section.group(2), lineno))
        else:
            # list continues on the next line
            pending = (key, lineno)

    if pending is not None:
        sections[pending[0]] = (pending[1], [])

    if "activities" not in sections or not sections["activities"][1]:
        where = sections.get("activities", (lines[0][0], []))[0]
        raise SchemeFileError(E.EMPTY_ACTIVITY_SET, where, "no activity groups declared")
    act_line, act_tokens = sections["activities"]
    groups = _enum_tokens(ActivityGroup, act_tokens, act_line, "activity group")

    disc_line, disc_tokens = sections.get("discuss", (act_line, []))
    verbs = _enum_tokens(DiscussVerb, disc_tokens, disc_line, "discussion verb")
    if ActivityGroup.DISCUSS in groups and not verbs:
        raise SchemeFileError(E.EMPTY_ACTIVITY_SET, disc_line, "DISCUSS declared without any verb")
    if verbs and ActivityGroup.DISCUSS not in groups:
        raise SchemeFileError(E.SYNTAX_ERROR, disc_line, "discussion verbs given but DISCUSS is not an activity")

    for group, (lineno, _) in rules.items():
        if group not in groups:
            raise SchemeFileError(E.SYNTAX_ERROR, lineno, f"rule for undeclared activity {group.value}")
    missing = [g.value for g in ActivityGroup if g in groups and g not in rules]
    if missing:
        raise SchemeFileError(E.INCOMPLETE_LEGALITY, lines[-1][0], f"no rule for {', '.join(missing)}")

    return CodingScheme(
        name=name,
        groups=groups,
        discuss_verbs=verbs,
        tasks=frozenset(sections.get("tasks", (0, []))[1]),
        criteria=frozenset(sections.get("criteria", (0, []))[1]),
        legality={group: rule for group, (_, rule) in rules.items()},
    )
