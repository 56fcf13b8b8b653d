from typing import Optional

from pydantic import BaseModel, ConfigDict

from dialoglens.core.config import RunConfig
from dialoglens.models.dialog import DialogSpan
from dialoglens.models.distribution import Distribution, ProfileRow, SensitivityWarning
from dialoglens.models.lag import LsaFinding, PatternGraph, PermutationResult, SequenceLevel
from dialoglens.models.protocol import IntegrityReport, SegmentationWarning


class SectionRow(BaseModel):
    """Dialog time (ms) within one section of the reviewed document"""
    model_config = ConfigDict(frozen=True)

    section: int
    REV: int = 0
    ALT: int = 0
    SYNC: int = 0
    MNG: int = 0


class LsaSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    level: SequenceLevel
    lag: int
    alpha: float
    length: int
    findings: tuple[LsaFinding, ...] = ()
    pattern: PatternGraph = PatternGraph()
    oracle: tuple[PermutationResult, ...] = ()
    skipped: Optional[str] = None  # reason when the sequence was too short


class Report(BaseModel):
    model_config = ConfigDict(frozen=True)

    tool: str
    version: str
    config: RunConfig
    meeting_id: str
    episodes: int
    total_duration_ms: int
    integrity: IntegrityReport
    segmentation: tuple[SegmentationWarning, ...]
    distributions: dict[str, Distribution]
    profiles: dict[str, tuple[ProfileRow, ...]]
    sensitivity: tuple[SensitivityWarning, ...]
    dialogs: tuple[DialogSpan, ...]
    confl_share: dict[str, float]
    sections: tuple[SectionRow, ...]
    lsa: LsaSummary
