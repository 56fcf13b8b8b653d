"""
Coded meeting transcripts: loading, integrity checks and segmentation lint
"""
import logging
from pathlib import Path
from typing import Optional, Union

from dialoglens.core.exceptions import ProtocolLoadError
from dialoglens.models.protocol import (
    IntegrityKind,
    IntegrityReport,
    IntegrityViolation,
    Protocol,
    ProtocolIssue,
    ProtocolIssueKind,
    SegmentationWarning,
)
from dialoglens.models.scheme import ActivityGroup, CodingScheme, MessageRef
from dialoglens.scheme import builtin_trm_scheme, format_code, message_kind_of
from dialoglens.utils.protocol_file import read_protocol

logger = logging.getLogger(__name__)


def load_protocol(path: Union[str, Path], scheme: Optional[CodingScheme] = None) -> Protocol:
    """
    Load and validate a protocol file

    Raises ProtocolLoadError carrying every problem found.
    """
    path = Path(path)
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        issue = ProtocolIssue(
            line=data[:e.start].count(b"\n") + 1,
            kind=ProtocolIssueKind.ENCODING_ERROR,
            detail=f"not UTF-8: byte 0x{data[e.start]:02x} at offset {e.start}",
        )
        raise ProtocolLoadError([issue], source=str(path)) from e
    return read_protocol(text, scheme or builtin_trm_scheme(), source=str(path))


def parse_protocol(text: str, scheme: Optional[CodingScheme] = None, source: Optional[str] = None) -> Protocol:
    return read_protocol(text, scheme or builtin_trm_scheme(), source=source)


def check_referential_integrity(protocol: Protocol) -> IntegrityReport:
    """
    Check every message reference

    A label m must name an earlier episode whose discussion verb produces
    the referenced message kind.
    """
    violations: list[IntegrityViolation] = []
    for episode in protocol.episodes:
        entity = episode.code.entity
        if not isinstance(entity, MessageRef):
            continue
        label = entity.label
        if label >= episode.id:
            violations.append(IntegrityViolation(
                episode_id=episode.id,
                kind=IntegrityKind.FORWARD_REFERENCE,
                detail=f"{entity.message_kind.value}-{label} refers to a later or the same episode",
            ))
            continue
        producer = protocol.episode(label)
        produced = message_kind_of(producer.code.verb) if producer.code.group == ActivityGroup.DISCUSS else None
        if produced != entity.message_kind:
            what = produced.value if produced else f"no message ({producer.code.activity.token})"
            violations.append(IntegrityViolation(
                episode_id=episode.id,
                kind=IntegrityKind.KIND_MISMATCH,
                detail=f"episode {label} produced {what}, referenced as {entity.message_kind.value}",
            ))
    if violations:
        logger.info(f"{protocol.meeting_id}: {len(violations)} referential integrity violation(s)")
    return IntegrityReport(violations=tuple(violations))


def lint_segmentation(protocol: Protocol) -> list[SegmentationWarning]:
    """Adjacent episodes by one speaker under one canonical code"""
    warnings: list[SegmentationWarning] = []
    codes = [format_code(e.code) for e in protocol.episodes]
    for i in range(1, len(codes)):
        previous, current = protocol.episodes[i - 1], protocol.episodes[i]
        if previous.speaker == current.speaker and codes[i - 1] == codes[i]:
            warnings.append(SegmentationWarning(
                first_id=previous.id,
                second_id=current.id,
                speaker=current.speaker,
                code=codes[i],
            ))
    return warnings


def total_coded_duration(protocol: Protocol) -> int:
    """Sum of episode lengths in ms; overlapping speech counts once per episode"""
    return sum(e.duration_ms for e in protocol.episodes)
