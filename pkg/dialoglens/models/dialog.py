from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class DialogType(str, Enum):
    REV = "REV"
    ALT = "ALT"
    SYNC = "SYNC"
    CONFL = "CONFL"
    MNG = "MNG"


TOP_LEVEL_TYPES: tuple[DialogType, ...] = (DialogType.REV, DialogType.ALT, DialogType.SYNC, DialogType.MNG)
VOTING_TYPES: tuple[DialogType, ...] = (DialogType.REV, DialogType.ALT, DialogType.SYNC)


class DialogRules(BaseModel):
    model_config = ConfigDict(frozen=True)

    window: int = Field(default=5, ge=1)
    confl_break: int = Field(default=2, ge=1)
    tie_priority: tuple[DialogType, ...] = VOTING_TYPES

    @field_validator("tie_priority")
    @classmethod
    def _is_permutation(cls, priority):
        if sorted(priority) != sorted(VOTING_TYPES):
            raise ValueError("tie_priority must be a permutation of REV, ALT, SYNC")
        return priority


class DialogSpan(BaseModel):
    model_config = ConfigDict(frozen=True)

    type: DialogType
    first_id: int = Field(ge=1)
    last_id: int = Field(ge=1)
    section: Optional[int] = None
    nested: tuple["DialogSpan", ...] = ()
    degenerate: bool = False


class EpisodeVote(BaseModel):
    """How the detector labelled one episode"""
    model_config = ConfigDict(frozen=True)

    episode_id: int
    marker: Optional[DialogType]  # None for neutral and MNG episodes
    label: DialogType
    tied: bool = False


DialogSpan.model_rebuild()
