from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from dialoglens.models.scheme import MessageKind


class Level(str, Enum):
    TOP = "top"
    DISCUSS = "discuss"


class Basis(str, Enum):
    FREQUENCY = "frequency"
    TIME = "time"


class DistributionEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    bucket: str
    count: int = Field(ge=0)
    duration_ms: int = Field(ge=0)
    proportion: float = Field(ge=0.0, le=1.0)


class Distribution(BaseModel):
    model_config = ConfigDict(frozen=True)

    entries: tuple[DistributionEntry, ...]
    basis: Basis
    population: int = Field(ge=0)

    def proportion(self, bucket: str) -> float:
        for entry in self.entries:
            if entry.bucket == bucket:
                return entry.proportion
        raise KeyError(bucket)

    def entry(self, bucket: str) -> DistributionEntry:
        for entry in self.entries:
            if entry.bucket == bucket:
                return entry
        raise KeyError(bucket)

    @property
    def buckets(self) -> tuple[str, ...]:
        return tuple(e.bucket for e in self.entries)


class ObjectClass(str, Enum):
    INI_SOL = "INI_SOL"
    ALT_SOL = "ALT_SOL"
    CRIT = "CRIT"
    OTH = "OTH"


class ObjectRule(str, Enum):
    ARTIFACT = "artifact"        # discussion of the reviewed document -> INI_SOL
    ALTERNATIVE = "alternative"  # discussion of a developed proposal -> ALT_SOL
    CRITERION = "criterion"      # message discussed under a criterion -> CRIT


class ObjectRules(BaseModel):
    """
    Priority table for classifying discussion objects

    Non-discussion episodes are always OTH and anything no rule claims falls
    back to OTH; `order` ranks the three rules in between.
    """
    model_config = ConfigDict(frozen=True)

    order: tuple[ObjectRule, ...] = (ObjectRule.ARTIFACT, ObjectRule.ALTERNATIVE, ObjectRule.CRITERION)
    alt_kinds: frozenset[MessageKind] = frozenset({MessageKind.DEVELOPMENT})
    use_dialogs: bool = True

    @field_validator("order")
    @classmethod
    def _is_permutation(cls, order):
        if sorted(order) != sorted(ObjectRule):
            raise ValueError("order must be a permutation of artifact, alternative, criterion")
        return order

    @field_serializer("alt_kinds")
    def _sorted_kinds(self, kinds):
        return sorted(k.value for k in kinds)


class ProfileRow(BaseModel):
    """Frequency and time side by side for one bucket"""
    model_config = ConfigDict(frozen=True)

    bucket: str
    abbreviation: str
    count: int
    duration_ms: int
    frequency_share: float
    time_share: float
    mean_duration_ms: float


class SensitivityWarning(BaseModel):
    model_config = ConfigDict(frozen=True)

    bucket: str
    proportion: float
    threshold: float
    detail: str
