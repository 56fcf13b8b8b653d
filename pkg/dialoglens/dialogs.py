"""
Dialog detection

An episode stream is cut into top-level REV, ALT, SYNC and MNG spans by a
plurality vote over a sliding window; conflict resolution (CONFL) is found
afterwards as a sub-span of its host.
"""
import logging
from collections import Counter
from fractions import Fraction
from itertools import accumulate, groupby
from typing import Optional, Sequence

from dialoglens.analysis import build_distribution
from dialoglens.core.exceptions import SpanMismatch
from dialoglens.models.dialog import (
    TOP_LEVEL_TYPES,
    DialogRules,
    DialogSpan,
    DialogType,
    EpisodeVote,
)
from dialoglens.models.distribution import Basis, Distribution
from dialoglens.models.protocol import CodedEpisode, Protocol
from dialoglens.models.scheme import ActivityGroup, ArtifactRef, DiscussVerb

logger = logging.getLogger(__name__)

_MARKERS: dict[DiscussVerb, DialogType] = {
    DiscussVerb.EVALUATE: DialogType.REV,
    DiscussVerb.JUSTIFY: DialogType.REV,
    DiscussVerb.ACCEPT: DialogType.REV,
    DiscussVerb.DEVELOP: DialogType.ALT,
    DiscussVerb.INFORM: DialogType.SYNC,
    DiscussVerb.HYPOTHESIZE: DialogType.SYNC,
    DiscussVerb.EXPLAIN: DialogType.SYNC,
}
_CONFLICT_VERBS = frozenset({DiscussVerb.REJECT, DiscussVerb.EVALUATE, DiscussVerb.JUSTIFY})


def marker_of(episode: CodedEpisode) -> Optional[DialogType]:
    """Dialog type an episode votes for; None for read, reject and manage"""
    code = episode.code
    if code.group == ActivityGroup.REQUEST:
        return DialogType.SYNC
    if code.group == ActivityGroup.DISCUSS:
        return _MARKERS.get(code.verb)
    return None


def _stretches(protocol: Protocol) -> list[tuple[bool, list[CodedEpisode]]]:
    """Maximal runs of manage / non-manage episodes, in order"""
    return [
        (is_manage, list(run))
        for is_manage, run in groupby(protocol.episodes, key=lambda e: e.code.group == ActivityGroup.MANAGE)
    ]


def _vote_stretch(episodes: list[CodedEpisode], rules: DialogRules) -> tuple[list[EpisodeVote], bool]:
    markers = [marker_of(e) for e in episodes]
    if not any(markers):
        votes = [EpisodeVote(episode_id=e.id, marker=None, label=DialogType.SYNC) for e in episodes]
        return votes, True

    before, after = (rules.window - 1) // 2, rules.window // 2
    labels: list[Optional[DialogType]] = []
    tied: list[bool] = []
    for i, marker in enumerate(markers):
        if marker is None:
            labels.append(None)
            tied.append(False)
            continue
        window = Counter(m for m in markers[max(0, i - before): i + after + 1] if m is not None)
        top = max(window.values())
        leaders = [t for t in rules.tie_priority if window.get(t) == top]
        labels.append(leaders[0])
        tied.append(len(leaders) > 1)

    # neutral episodes join the next labelled episode, trailing ones the previous
    following: Optional[DialogType] = None
    for i in reversed(range(len(labels))):
        if labels[i] is None:
            labels[i] = following
        else:
            following = labels[i]
    last = None
    for i, label in enumerate(labels):
        if label is None:
            labels[i] = last
        last = labels[i]

    votes = [
        EpisodeVote(episode_id=e.id, marker=m, label=label, tied=t)
        for e, m, label, t in zip(episodes, markers, labels, tied)
    ]
    return votes, False


def vote_labels(protocol: Protocol, rules: Optional[DialogRules] = None) -> list[EpisodeVote]:
    """Per-episode marker, window label and tie flag"""
    rules = rules or DialogRules()
    votes: list[EpisodeVote] = []
    for is_manage, episodes in _stretches(protocol):
        if is_manage:
            votes.extend(EpisodeVote(episode_id=e.id, marker=None, label=DialogType.MNG) for e in episodes)
        else:
            votes.extend(_vote_stretch(episodes, rules)[0])
    return votes


def _section_scope(protocol: Protocol) -> dict[int, int]:
    """Section index in scope at each episode id; 0 before the first section read"""
    scope: dict[int, int] = {}
    current = 0
    for episode in protocol.episodes:
        entity = episode.code.entity
        if episode.code.group == ActivityGroup.READ and isinstance(entity, ArtifactRef) and entity.section:
            current = entity.section
        scope[episode.id] = current
    return scope


def _conflicts(episodes: Sequence[CodedEpisode], confl_break: int, section: Optional[int]) -> tuple[DialogSpan, ...]:
    """
    CONFL sub-spans inside one host

    A reject opens a span; an accept closes it (inclusive). `confl_break`
    consecutive episodes outside reject/evaluate/justify, or the end of the
    host, close it at its last conflict episode.
    """
    spans: list[DialogSpan] = []
    first = last_conflict = None
    quiet = 0
    for episode in episodes:
        verb = episode.code.verb if episode.code.group == ActivityGroup.DISCUSS else None
        if first is None:
            if verb == DiscussVerb.REJECT:
                first = last_conflict = episode.id
                quiet = 0
            continue
        if verb == DiscussVerb.ACCEPT:
            spans.append(DialogSpan(type=DialogType.CONFL, first_id=first, last_id=episode.id, section=section))
            first = None
        elif verb in _CONFLICT_VERBS:
            last_conflict = episode.id
            quiet = 0
        else:
            quiet += 1
            if quiet >= confl_break:
                spans.append(DialogSpan(type=DialogType.CONFL, first_id=first, last_id=last_conflict, section=section))
                first = None
    if first is not None:
        spans.append(DialogSpan(type=DialogType.CONFL, first_id=first, last_id=last_conflict, section=section))
    return tuple(spans)


def detect_dialogs(protocol: Protocol, rules: Optional[DialogRules] = None) -> list[DialogSpan]:
    """
    Segment a protocol into dialogs

    Manage runs become MNG spans. Every other stretch is labelled episode by
    episode with the plurality marker inside a window of `rules.window`
    episodes; runs of one label form a span. A stretch without any voting
    episode becomes a single SYNC span flagged degenerate.
    """
    rules = rules or DialogRules()
    scope = _section_scope(protocol)
    by_id = {e.id: e for e in protocol.episodes}
    spans: list[DialogSpan] = []

    for is_manage, episodes in _stretches(protocol):
        if is_manage:
            first_id = episodes[0].id
            spans.append(DialogSpan(
                type=DialogType.MNG,
                first_id=first_id,
                last_id=episodes[-1].id,
                section=scope[first_id] or None,
            ))
            continue
        votes, degenerate = _vote_stretch(episodes, rules)
        for label, run in groupby(votes, key=lambda v: v.label):
            run = list(run)
            first_id, last_id = run[0].episode_id, run[-1].episode_id
            section = scope[first_id] or None
            hosted = [by_id[v.episode_id] for v in run]
            spans.append(DialogSpan(
                type=label,
                first_id=first_id,
                last_id=last_id,
                section=section,
                nested=_conflicts(hosted, rules.confl_break, section),
                degenerate=degenerate,
            ))

    logger.info(
        f"{protocol.meeting_id}: {len(spans)} dialog span(s), "
        f"{sum(len(s.nested) for s in spans)} nested conflict(s)"
    )
    return spans


def check_partition(protocol: Protocol, spans: Sequence[DialogSpan]):
    """Raise SpanMismatch unless spans cover episode ids 1..N once, in order"""
    expected = 1
    for span in spans:
        if span.type not in TOP_LEVEL_TYPES:
            raise SpanMismatch(f"{span.type.value} cannot be a top-level span")
        if span.first_id != expected or span.last_id < span.first_id:
            raise SpanMismatch(f"span {span.first_id}-{span.last_id} does not start at episode {expected}")
        for inner in span.nested:
            if inner.first_id < span.first_id or inner.last_id > span.last_id:
                raise SpanMismatch(f"nested span {inner.first_id}-{inner.last_id} leaves its host")
        expected = span.last_id + 1
    if expected != len(protocol) + 1:
        raise SpanMismatch(f"spans cover {expected - 1} of {len(protocol)} episodes")


class _Durations:
    """Prefix sums over episode durations, addressable by id range"""

    def __init__(self, protocol: Protocol):
        self._sums = [0, *accumulate(e.duration_ms for e in protocol.episodes)]

    def between(self, first_id: int, last_id: int) -> int:
        return self._sums[last_id] - self._sums[first_id - 1]

    @property
    def total(self) -> int:
        return self._sums[-1]


def dialog_time_distribution(protocol: Protocol, spans: Sequence[DialogSpan]) -> Distribution:
    """Share of coded time per top-level dialog type; CONFL time stays with its host"""
    check_partition(protocol, spans)
    durations = _Durations(protocol)
    items = ((s.type.value, durations.between(s.first_id, s.last_id)) for s in spans)
    distribution = build_distribution(items, [t.value for t in TOP_LEVEL_TYPES], Basis.TIME)
    return distribution.model_copy(update={"population": len(protocol)})


def confl_share_within(protocol: Protocol, spans: Sequence[DialogSpan]) -> dict[str, float]:
    """
    Fraction of each host type's time spent in nested conflict resolution

    Keys are the top-level type names plus `overall`, which relates all
    conflict time to the total coded time.
    """
    check_partition(protocol, spans)
    durations = _Durations(protocol)
    host = dict.fromkeys(TOP_LEVEL_TYPES, 0)
    confl = dict.fromkeys(TOP_LEVEL_TYPES, 0)
    for span in spans:
        host[span.type] += durations.between(span.first_id, span.last_id)
        confl[span.type] += sum(durations.between(n.first_id, n.last_id) for n in span.nested)

    shares = {t.value: float(Fraction(confl[t], host[t])) if host[t] else 0.0 for t in TOP_LEVEL_TYPES}
    total_confl = sum(confl.values())
    shares["overall"] = float(Fraction(total_confl, durations.total)) if durations.total else 0.0
    return shares


def section_dialog_durations(protocol: Protocol, spans: Sequence[DialogSpan]) -> dict[int, dict[DialogType, int]]:
    """
    Milliseconds per dialog type for each section of the reviewed document

    A READ/SECTION-n episode opens section n; earlier episodes count as
    section 0. Rows appear only for sections that hold at least one episode.
    """
    check_partition(protocol, spans)
    scope = _section_scope(protocol)
    type_of: dict[int, DialogType] = {}
    for span in spans:
        for episode_id in range(span.first_id, span.last_id + 1):
            type_of[episode_id] = span.type

    table: dict[int, dict[DialogType, int]] = {}
    for episode in protocol.episodes:
        row = table.setdefault(scope[episode.id], dict.fromkeys(TOP_LEVEL_TYPES, 0))
        row[type_of[episode.id]] += episode.duration_ms
    return dict(sorted(table.items()))
