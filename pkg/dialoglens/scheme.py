"""
Coding scheme: parsing, formatting and validating codes
"""
import logging
from functools import lru_cache
from pathlib import Path
from typing import Optional, Union

from dialoglens.core.exceptions import SchemeErrorKind, SchemeFileError
from dialoglens.models.scheme import (
    ABBREVIATIONS,
    MESSAGE_KINDS,
    ActivityGroup,
    Code,
    CodingScheme,
    DiscussVerb,
    EntityKind,
    LegalityRule,
    MessageKind,
    MessageRef,
    SchemeViolation,
    TaskRef,
    ViolationKind,
)
from dialoglens.utils import code_grammar, scheme_file

logger = logging.getLogger(__name__)

_ORDER = list(ViolationKind)


@lru_cache(maxsize=1)
def builtin_trm_scheme() -> CodingScheme:
    """The technical review meeting customization of the generic scheme"""
    return CodingScheme(
        name="TRM",
        groups=frozenset(ActivityGroup),
        discuss_verbs=frozenset(DiscussVerb),
        tasks=frozenset({"PROJECT", "MEETING"}),
        criteria=frozenset({"FORM", "CONTENT"}),
        legality={
            ActivityGroup.MANAGE: LegalityRule(entity_kinds=frozenset({EntityKind.TASK})),
            ActivityGroup.READ: LegalityRule(entity_kinds=frozenset({EntityKind.ARTIFACT})),
            ActivityGroup.REQUEST: LegalityRule(
                entity_kinds=frozenset({EntityKind.ARTIFACT, EntityKind.MESSAGE})
            ),
            ActivityGroup.DISCUSS: LegalityRule(
                entity_kinds=frozenset({EntityKind.ARTIFACT, EntityKind.MESSAGE}),
                criterion_allowed=True,
            ),
        },
    )


def parse_code(text: str, scheme: Optional[CodingScheme] = None, strict: bool = True) -> Code:
    """
    Parse one code string

    With strict=False any well-formed activity/entity/criterion combination is
    returned and pairing rules are left to validate_code.
    Raises CodeParseError with the failing column.
    """
    return code_grammar.parse(text, scheme or builtin_trm_scheme(), strict=strict)


def format_code(code: Code) -> str:
    return code_grammar.render(code)


def validate_code(code: Code, scheme: CodingScheme) -> list[SchemeViolation]:
    """Every legality violation of `code` under `scheme`; empty means valid"""
    violations: list[SchemeViolation] = []
    group = code.group

    if group not in scheme.groups or (
        group == ActivityGroup.DISCUSS and code.verb not in scheme.discuss_verbs
    ):
        violations.append(SchemeViolation(
            kind=ViolationKind.ACTIVITY_NOT_IN_SCHEME,
            field="activity",
            detail=f"{code.activity.token} is not an activity of {scheme.name}",
        ))
        rule = None
    else:
        rule = scheme.legality[group]

    kind = code.entity_kind
    if rule is not None and kind not in rule.entity_kinds:
        violations.append(SchemeViolation(
            kind=ViolationKind.ENTITY_KIND_NOT_ALLOWED,
            field="entity",
            detail=f"{kind.value.lower()} entity not allowed for {code.activity.token}",
        ))

    if isinstance(code.entity, TaskRef) and code.entity.task not in scheme.tasks:
        violations.append(SchemeViolation(
            kind=ViolationKind.TOKEN_NOT_IN_SCHEME,
            field="entity",
            detail=f"task {code.entity.task} is not declared",
        ))
    if isinstance(code.entity, MessageRef) and code.entity.message_kind not in scheme.message_kinds:
        violations.append(SchemeViolation(
            kind=ViolationKind.TOKEN_NOT_IN_SCHEME,
            field="entity",
            detail=f"message {code.entity.message_kind.value} is not declared",
        ))

    if code.criterion is not None:
        if code.criterion not in scheme.criteria:
            violations.append(SchemeViolation(
                kind=ViolationKind.TOKEN_NOT_IN_SCHEME,
                field="criterion",
                detail=f"criterion {code.criterion} is not declared",
            ))
        if rule is not None and not rule.criterion_allowed:
            violations.append(SchemeViolation(
                kind=ViolationKind.CRITERION_NOT_ALLOWED,
                field="criterion",
                detail=f"{code.activity.token} takes no criterion",
            ))

    violations.sort(key=lambda v: (_ORDER.index(v.kind), v.field))
    return violations


def message_kind_of(verb: DiscussVerb) -> MessageKind:
    return MESSAGE_KINDS[DiscussVerb(verb)]


def abbreviation(token: str) -> str:
    """Short chart label for an activity token (ACC, DEV, ... MNG, RQST)"""
    return ABBREVIATIONS.get(token.upper(), token.upper())


def load_scheme(path: Union[str, Path]) -> CodingScheme:
    path = Path(path)
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise SchemeFileError(
            SchemeErrorKind.ENCODING_ERROR,
            data[:e.start].count(b"\n") + 1,
            f"not UTF-8: byte 0x{data[e.start]:02x} at offset {e.start}",
        ) from e
    scheme = scheme_file.read_scheme(text)
    logger.info(f"Loaded scheme {scheme.name} from {path}")
    return scheme
