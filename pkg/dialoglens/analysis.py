"""
Descriptive statistics: frequency and time distributions over categories
and over discussion objects
"""
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from dialoglens.models.dialog import DialogSpan, DialogType
from dialoglens.models.distribution import (
    Basis,
    Distribution,
    DistributionEntry,
    Level,
    ObjectClass,
    ObjectRule,
    ObjectRules,
    ProfileRow,
    SensitivityWarning,
)
from dialoglens.models.protocol import CodedEpisode, Protocol
from dialoglens.models.scheme import ActivityGroup, Code, DiscussVerb, EntityKind, MessageRef
from dialoglens.scheme import abbreviation

TOP_BUCKETS: tuple[str, ...] = ("MNG", "READ", "RQST", "DCSS")
DISCUSS_BUCKETS: tuple[str, ...] = tuple(sorted(v.value.lower() for v in DiscussVerb))
OBJECT_BUCKETS: tuple[str, ...] = tuple(c.value for c in ObjectClass)

_TOP = {
    ActivityGroup.MANAGE: "MNG",
    ActivityGroup.READ: "READ",
    ActivityGroup.REQUEST: "RQST",
    ActivityGroup.DISCUSS: "DCSS",
}


def buckets(level: Level) -> tuple[str, ...]:
    return TOP_BUCKETS if Level(level) == Level.TOP else DISCUSS_BUCKETS


def bucket_of(code: Code, level: Level) -> Optional[str]:
    """Bucket label of a code at `level`; None when it does not take part"""
    if Level(level) == Level.TOP:
        return _TOP[code.group]
    return code.verb.value.lower() if code.verb else None


def build_distribution(
    items: Iterable[tuple[str, int]],
    bucket_order: Sequence[str],
    basis: Basis,
) -> Distribution:
    """
    Tally (bucket, duration_ms) pairs

    Shares are exact fractions converted to float once, so they add up to 1
    up to float representation.
    """
    counts = dict.fromkeys(bucket_order, 0)
    durations = dict.fromkeys(bucket_order, 0)
    population = 0
    for bucket, duration in items:
        counts[bucket] += 1
        durations[bucket] += duration
        population += 1

    weights = counts if basis == Basis.FREQUENCY else durations
    total = sum(weights.values())
    entries = tuple(
        DistributionEntry(
            bucket=bucket,
            count=counts[bucket],
            duration_ms=durations[bucket],
            proportion=float(Fraction(weights[bucket], total)) if total else 0.0,
        )
        for bucket in bucket_order
    )
    return Distribution(entries=entries, basis=basis, population=population)


def _tally(protocol: Protocol, level: Level):
    for episode in protocol.episodes:
        bucket = bucket_of(episode.code, level)
        if bucket is not None:
            yield bucket, episode.duration_ms


def frequency_distribution(protocol: Protocol, level: Level = Level.TOP) -> Distribution:
    return build_distribution(_tally(protocol, level), buckets(level), Basis.FREQUENCY)


def time_distribution(protocol: Protocol, level: Level = Level.TOP) -> Distribution:
    return build_distribution(_tally(protocol, level), buckets(level), Basis.TIME)


def _alt_episode_ids(dialogs: Optional[Sequence[DialogSpan]]) -> set[int]:
    ids: set[int] = set()
    for span in dialogs or ():
        if span.type == DialogType.ALT:
            ids.update(range(span.first_id, span.last_id + 1))
    return ids


def classify_object(
    episode: CodedEpisode,
    rules: ObjectRules,
    alt_ids: frozenset[int] = frozenset(),
) -> ObjectClass:
    code = episode.code
    if code.group != ActivityGroup.DISCUSS:
        return ObjectClass.OTH
    entity = code.entity
    for rule in rules.order:
        if rule == ObjectRule.ARTIFACT and code.entity_kind == EntityKind.ARTIFACT:
            return ObjectClass.INI_SOL
        if rule == ObjectRule.ALTERNATIVE and isinstance(entity, MessageRef):
            if entity.message_kind in rules.alt_kinds or entity.label in alt_ids:
                return ObjectClass.ALT_SOL
        if rule == ObjectRule.CRITERION and isinstance(entity, MessageRef) and code.criterion:
            return ObjectClass.CRIT
    return ObjectClass.OTH


def object_time_distribution(
    protocol: Protocol,
    dialogs: Optional[Sequence[DialogSpan]] = None,
    rules: Optional[ObjectRules] = None,
) -> Distribution:
    """
    Time spent per discussion object (initial solution, alternatives,
    criteria, other). Without dialogs, alternatives are recognised by
    message kind alone.
    """
    rules = rules or ObjectRules()
    alt_ids = frozenset(_alt_episode_ids(dialogs) if rules.use_dialogs else ())
    items = ((classify_object(e, rules, alt_ids).value, e.duration_ms) for e in protocol.episodes)
    return build_distribution(items, OBJECT_BUCKETS, Basis.TIME)


def category_profile(protocol: Protocol, level: Level = Level.TOP) -> list[ProfileRow]:
    """Frequency share, time share and mean duration per bucket"""
    freq = frequency_distribution(protocol, level)
    time = time_distribution(protocol, level)
    rows = []
    for f, t in zip(freq.entries, time.entries):
        rows.append(ProfileRow(
            bucket=f.bucket,
            abbreviation=abbreviation(f.bucket) if level == Level.DISCUSS else f.bucket,
            count=f.count,
            duration_ms=f.duration_ms,
            frequency_share=f.proportion,
            time_share=t.proportion,
            mean_duration_ms=f.duration_ms / f.count if f.count else 0.0,
        ))
    return rows


def sensitivity_warnings(distribution: Distribution, threshold: float = 0.5) -> list[SensitivityWarning]:
    """
    Buckets holding more than `threshold` of the distribution

    A strongly dominant category means the scheme barely discriminates that
    activity and the category is a candidate for refinement.
    """
    return [
        SensitivityWarning(
            bucket=e.bucket,
            proportion=e.proportion,
            threshold=threshold,
            detail=f"{e.bucket} holds {e.proportion:.1%} of {distribution.basis.value}; consider refining it",
        )
        for e in distribution.entries
        if e.proportion > threshold
    ]
