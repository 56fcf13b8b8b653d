"""
Reader for tab-separated protocol files

    protocol-tsv v1 <meeting_id>
    participants:<TAB>P1<TAB>P2 ...
    id<TAB>start_s<TAB>end_s<TAB>speaker<TAB>code[<TAB>text]
"""
import logging
import re
from typing import Optional

from dialoglens.core.exceptions import CodeParseError, ProtocolLoadError
from dialoglens.models.protocol import CodedEpisode, Protocol, ProtocolIssue, ProtocolIssueKind as K
from dialoglens.models.scheme import CodingScheme
from dialoglens.scheme import validate_code
from dialoglens.utils import code_grammar
from dialoglens.utils.timecode import format_seconds, parse_seconds

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"^protocol-tsv\s+v1\s+(\S.*)$")
_ID = re.compile(r"^[0-9]+$")
PARTICIPANTS = "participants:"


def read_protocol(text: str, scheme: CodingScheme, source: Optional[str] = None) -> Protocol:
    """
    Parse protocol text, collecting every problem before giving up

    Raises ProtocolLoadError listing all issues in line order.
    """
    issues: list[ProtocolIssue] = []

    def issue(line: int, kind: K, detail: str):
        issues.append(ProtocolIssue(line=line, kind=kind, detail=detail))

    rows = [
        (n, raw) for n, raw in enumerate(text.splitlines(), start=1)
        if raw.strip() and not raw.lstrip().startswith("#")
    ]

    meeting_id = ""
    participants: Optional[tuple[str, ...]] = None
    if rows:
        n, raw = rows.pop(0)
        header = _HEADER.match(raw.strip())
        if header:
            meeting_id = header.group(1).strip()
        else:
            issue(n, K.FORMAT_ERROR, "expected 'protocol-tsv v1 <meeting_id>'")
    else:
        issue(1, K.FORMAT_ERROR, "empty protocol file")

    if rows and rows[0][1].startswith(PARTICIPANTS):
        n, raw = rows.pop(0)
        fields = [f.strip() for f in raw[len(PARTICIPANTS):].split("\t")]
        participants = tuple(f for f in fields if f)
        if len(set(participants)) != len(participants):
            issue(n, K.FORMAT_ERROR, "participant listed twice")
    elif meeting_id:
        issue(rows[0][0] if rows else 2, K.FORMAT_ERROR, "missing 'participants:' line")

    episodes: list[CodedEpisode] = []
    seen_ids: set[int] = set()
    last_id = 0
    last_start = 0

    for n, raw in rows:
        cols = raw.split("\t")
        if len(cols) not in (5, 6):
            issue(n, K.FORMAT_ERROR, f"expected 5 or 6 tab-separated columns, got {len(cols)}")
            continue
        id_text, start_text, end_text, speaker, code_text = (c.strip() for c in cols[:5])
        excerpt = cols[5] if len(cols) == 6 and cols[5] != "" else None

        if not _ID.match(id_text):
            issue(n, K.FORMAT_ERROR, f"bad episode id {id_text!r}")
            continue
        episode_id = int(id_text)
        if episode_id in seen_ids:
            issue(n, K.DUPLICATE_ID, f"episode id {episode_id} already used")
        elif episode_id != last_id + 1:
            issue(n, K.FORMAT_ERROR, f"expected episode id {last_id + 1}, got {episode_id}")
        seen_ids.add(episode_id)
        last_id = max(last_id, episode_id)

        try:
            start_ms = parse_seconds(start_text)
            end_ms = parse_seconds(end_text)
        except ValueError as e:
            issue(n, K.FORMAT_ERROR, str(e))
            continue
        if end_ms < start_ms:
            issue(n, K.FORMAT_ERROR, f"end {end_text} before start {start_text}")
        if start_ms < last_start:
            issue(n, K.NON_MONOTONIC_TIME, f"start {start_text} precedes previous start {format_seconds(last_start)}")
        last_start = max(last_start, start_ms)

        if not speaker:
            issue(n, K.FORMAT_ERROR, "empty speaker")
        elif participants is not None and speaker not in participants:
            issue(n, K.FORMAT_ERROR, f"speaker {speaker!r} is not a participant")

        try:
            code = code_grammar.parse(code_text, scheme)
        except CodeParseError as e:
            issue(n, K.CODE_ERROR, e.detail)
            continue
        violations = validate_code(code, scheme)
        for violation in violations:
            issue(n, K.CODE_ERROR, f"{violation.kind.value}: {violation.detail}")

        if not issues:
            episodes.append(CodedEpisode(
                id=episode_id, start_ms=start_ms, end_ms=end_ms,
                speaker=speaker, code=code, text=excerpt,
            ))

    if issues:
        logger.info(f"Rejected protocol {source or meeting_id}: {len(issues)} problem(s)")
        raise ProtocolLoadError(issues, source)

    protocol = Protocol(
        meeting_id=meeting_id,
        participants=participants or (),
        episodes=tuple(episodes),
        scheme=scheme,
    )
    logger.info(f"Loaded protocol {meeting_id}: {len(episodes)} episodes")
    return protocol
