"""
Coding scheme data model

Tokens are stored upper-case, the way they appear in canonical code strings.
"""
from enum import Enum
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator


class ActivityGroup(str, Enum):
    MANAGE = "MANAGE"
    READ = "READ"
    REQUEST = "REQUEST"
    DISCUSS = "DISCUSS"


class DiscussVerb(str, Enum):
    ACCEPT = "ACCEPT"
    DEVELOP = "DEVELOP"
    EVALUATE = "EVALUATE"
    EXPLAIN = "EXPLAIN"
    HYPOTHESIZE = "HYPOTHESIZE"
    INFORM = "INFORM"
    JUSTIFY = "JUSTIFY"
    REJECT = "REJECT"


class MessageKind(str, Enum):
    ACCEPTANCE = "ACCEPTANCE"
    DEVELOPMENT = "DEVELOPMENT"
    EVALUATION = "EVALUATION"
    EXPLANATION = "EXPLANATION"
    HYPOTHESIS = "HYPOTHESIS"
    INFORMATION = "INFORMATION"
    JUSTIFICATION = "JUSTIFICATION"
    REJECTION = "REJECTION"


class EntityKind(str, Enum):
    TASK = "TASK"
    ARTIFACT = "ARTIFACT"
    MESSAGE = "MESSAGE"


# Discussion activity -> the message it produces
MESSAGE_KINDS: dict[DiscussVerb, MessageKind] = {
    DiscussVerb.ACCEPT: MessageKind.ACCEPTANCE,
    DiscussVerb.DEVELOP: MessageKind.DEVELOPMENT,
    DiscussVerb.EVALUATE: MessageKind.EVALUATION,
    DiscussVerb.EXPLAIN: MessageKind.EXPLANATION,
    DiscussVerb.HYPOTHESIZE: MessageKind.HYPOTHESIS,
    DiscussVerb.INFORM: MessageKind.INFORMATION,
    DiscussVerb.JUSTIFY: MessageKind.JUSTIFICATION,
    DiscussVerb.REJECT: MessageKind.REJECTION,
}

ABBREVIATIONS: dict[str, str] = {
    "ACCEPT": "ACC",
    "DEVELOP": "DEV",
    "EVALUATE": "EVAL",
    "EXPLAIN": "EXPL",
    "HYPOTHESIZE": "HYP",
    "INFORM": "INF",
    "JUSTIFY": "JUST",
    "REJECT": "REJ",
    "MANAGE": "MNG",
    "READ": "READ",
    "REQUEST": "RQST",
    "DISCUSS": "DCSS",
}


class ActivityKind(BaseModel):
    """Activity group, plus the verb for discussion activities.

    `qualifier` keeps an optional free-text refinement such as
    EVALUATE:NEGATIVE; it is carried through but never interpreted.
    """
    model_config = ConfigDict(frozen=True)

    group: ActivityGroup
    discuss_verb: Optional[DiscussVerb] = None
    qualifier: Optional[str] = None

    @model_validator(mode="after")
    def _verb_iff_discuss(self):
        if (self.group == ActivityGroup.DISCUSS) != (self.discuss_verb is not None):
            raise ValueError("discuss_verb is required for DISCUSS and forbidden otherwise")
        if self.qualifier is not None and self.group != ActivityGroup.DISCUSS:
            raise ValueError("qualifier only applies to discussion activities")
        return self

    @property
    def token(self) -> str:
        return self.discuss_verb.value if self.discuss_verb else self.group.value


class TaskRef(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["task"] = "task"
    task: str


class ArtifactRef(BaseModel):
    """The whole document when `section` is None"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["artifact"] = "artifact"
    section: Optional[int] = Field(default=None, ge=1)


class MessageRef(BaseModel):
    """Outcome of an earlier discussion episode; `label` is that episode's id"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["message"] = "message"
    message_kind: MessageKind
    label: int = Field(ge=1)


EntityRef = Annotated[Union[TaskRef, ArtifactRef, MessageRef], Field(discriminator="kind")]


def entity_kind(entity: EntityRef) -> EntityKind:
    if isinstance(entity, TaskRef):
        return EntityKind.TASK
    if isinstance(entity, ArtifactRef):
        return EntityKind.ARTIFACT
    return EntityKind.MESSAGE


class Code(BaseModel):
    model_config = ConfigDict(frozen=True)

    activity: ActivityKind
    entity: EntityRef
    criterion: Optional[str] = None

    @property
    def group(self) -> ActivityGroup:
        return self.activity.group

    @property
    def verb(self) -> Optional[DiscussVerb]:
        return self.activity.discuss_verb

    @property
    def entity_kind(self) -> EntityKind:
        return entity_kind(self.entity)


class LegalityRule(BaseModel):
    model_config = ConfigDict(frozen=True)

    entity_kinds: frozenset[EntityKind]
    criterion_allowed: bool = False

    @field_serializer("entity_kinds")
    def _sorted_kinds(self, kinds):
        return sorted(k.value for k in kinds)


class CodingScheme(BaseModel):
    """Closed vocabulary plus one legality row per activity group"""
    model_config = ConfigDict(frozen=True)

    name: str
    groups: frozenset[ActivityGroup]
    discuss_verbs: frozenset[DiscussVerb] = frozenset()
    tasks: frozenset[str] = frozenset()
    criteria: frozenset[str] = frozenset()
    legality: dict[ActivityGroup, LegalityRule]

    @field_serializer("groups", "discuss_verbs", "tasks", "criteria")
    def _sorted_tokens(self, tokens):
        # sets serialize in hash order otherwise
        return sorted(getattr(t, "value", t) for t in tokens)

    @model_validator(mode="after")
    def _legality_is_total(self):
        missing = self.groups - set(self.legality)
        if missing:
            raise ValueError(f"no legality rule for {sorted(g.value for g in missing)}")
        extra = set(self.legality) - self.groups
        if extra:
            raise ValueError(f"legality rule for undeclared group(s) {sorted(g.value for g in extra)}")
        if ActivityGroup.DISCUSS in self.groups and not self.discuss_verbs:
            raise ValueError("DISCUSS declared without any verb")
        return self

    @property
    def message_kinds(self) -> frozenset[MessageKind]:
        return frozenset(MESSAGE_KINDS[v] for v in self.discuss_verbs)


class ViolationKind(str, Enum):
    # declaration order is the reporting order
    ACTIVITY_NOT_IN_SCHEME = "ActivityNotInScheme"
    ENTITY_KIND_NOT_ALLOWED = "EntityKindNotAllowed"
    TOKEN_NOT_IN_SCHEME = "TokenNotInScheme"
    CRITERION_NOT_ALLOWED = "CriterionNotAllowed"


class SchemeViolation(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ViolationKind
    field: str
    detail: str
