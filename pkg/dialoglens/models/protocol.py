from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from dialoglens.models.scheme import Code, CodingScheme


class CodedEpisode(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=1)
    start_ms: int = Field(ge=0)
    end_ms: int = Field(ge=0)
    speaker: str
    code: Code
    text: Optional[str] = None

    @model_validator(mode="after")
    def _ordered_times(self):
        if self.end_ms < self.start_ms:
            raise ValueError(f"episode {self.id} ends before it starts")
        return self

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


class Protocol(BaseModel):
    """One meeting's coded transcript; episode ids run 1..N in file order"""
    model_config = ConfigDict(frozen=True)

    meeting_id: str
    participants: tuple[str, ...]
    episodes: tuple[CodedEpisode, ...] = ()
    scheme: CodingScheme

    @model_validator(mode="after")
    def _check_invariants(self):
        # imported here: dialoglens.scheme depends on the models package
        from dialoglens.scheme import validate_code

        if len(set(self.participants)) != len(self.participants):
            raise ValueError("participants listed twice")
        speakers = set(self.participants)
        previous_start = 0
        for index, episode in enumerate(self.episodes, start=1):
            if episode.id != index:
                raise ValueError(f"episode ids must run 1..N, found {episode.id} at position {index}")
            if episode.start_ms < previous_start:
                raise ValueError(f"episode {episode.id} starts before its predecessor")
            previous_start = episode.start_ms
            if episode.speaker not in speakers:
                raise ValueError(f"episode {episode.id}: unknown speaker {episode.speaker!r}")
            violations = validate_code(episode.code, self.scheme)
            if violations:
                raise ValueError(f"episode {episode.id}: {violations[0].detail}")
        return self

    def episode(self, episode_id: int) -> CodedEpisode:
        return self.episodes[episode_id - 1]

    def __len__(self) -> int:
        return len(self.episodes)


class ProtocolIssueKind(str, Enum):
    FORMAT_ERROR = "FormatError"
    CODE_ERROR = "CodeError"
    NON_MONOTONIC_TIME = "NonMonotonicTime"
    DUPLICATE_ID = "DuplicateId"
    ENCODING_ERROR = "EncodingError"


class ProtocolIssue(BaseModel):
    model_config = ConfigDict(frozen=True)

    line: int
    kind: ProtocolIssueKind
    detail: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.kind.value}: {self.detail}"


class IntegrityKind(str, Enum):
    FORWARD_REFERENCE = "ForwardReference"
    KIND_MISMATCH = "KindMismatch"


class IntegrityViolation(BaseModel):
    model_config = ConfigDict(frozen=True)

    episode_id: int
    kind: IntegrityKind
    detail: str


class IntegrityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    violations: tuple[IntegrityViolation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


class SegmentationWarning(BaseModel):
    """Adjacent episodes that the decomposition rule would have merged"""
    model_config = ConfigDict(frozen=True)

    kind: str = "MergeCandidate"
    first_id: int
    second_id: int
    speaker: str
    code: str
