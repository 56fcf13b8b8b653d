"""
The full analysis bundle of one protocol
"""
import logging

from dialoglens import __version__
from dialoglens.analysis import (
    category_profile,
    frequency_distribution,
    object_time_distribution,
    sensitivity_warnings,
    time_distribution,
)
from dialoglens.core.config import RunConfig
from dialoglens.corpus import check_referential_integrity, lint_segmentation, total_coded_duration
from dialoglens.dialogs import (
    confl_share_within,
    detect_dialogs,
    dialog_time_distribution,
    section_dialog_durations,
)
from dialoglens.models.distribution import Level
from dialoglens.models.lag import SequenceLevel
from dialoglens.models.protocol import Protocol
from dialoglens.models.report import LsaSummary, Report, SectionRow
from dialoglens.seqstats import extract_sequence, lsa, pattern_graph, permutation_tests

logger = logging.getLogger(__name__)


def run_lsa(protocol: Protocol, config: RunConfig, spans) -> LsaSummary:
    """LSA at the configured level, plus a permutation check of each significant pair"""
    level = SequenceLevel(config.level.value)
    seq = extract_sequence(protocol, level, spans)
    summary = dict(level=level, lag=config.lag, alpha=config.alpha, length=len(seq))
    if config.lag >= len(seq):
        logger.warning(f"LSA skipped: {len(seq)} {level.value} label(s) for lag {config.lag}")
        return LsaSummary(**summary, skipped=f"sequence of {len(seq)} is too short for lag {config.lag}")

    findings = lsa(seq, config.lag, config.alpha, include_self=config.include_self)
    oracle = ()
    if config.oracle_iterations:
        oracle = tuple(permutation_tests(
            seq,
            [(f.given, f.target) for f in findings if f.significant],
            config.lag,
            iterations=config.oracle_iterations,
            seed=config.seed,
            exact_limit=config.exact_limit,
        ))
    return LsaSummary(**summary, findings=tuple(findings), pattern=pattern_graph(findings), oracle=oracle)


def build_report(protocol: Protocol, config: RunConfig) -> Report:
    spans = detect_dialogs(protocol, config.dialog_rules)
    top_frequency = frequency_distribution(protocol, Level.TOP)
    discuss_frequency = frequency_distribution(protocol, Level.DISCUSS)

    sections = tuple(
        SectionRow(section=section, **{t.value: ms for t, ms in row.items()})
        for section, row in section_dialog_durations(protocol, spans).items()
    )

    report = Report(
        tool="dialoglens",
        version=__version__,
        config=config,
        meeting_id=protocol.meeting_id,
        episodes=len(protocol),
        total_duration_ms=total_coded_duration(protocol),
        integrity=check_referential_integrity(protocol),
        segmentation=tuple(lint_segmentation(protocol)),
        distributions={
            "top_frequency": top_frequency,
            "top_time": time_distribution(protocol, Level.TOP),
            "discuss_frequency": discuss_frequency,
            "discuss_time": time_distribution(protocol, Level.DISCUSS),
            "objects_time": object_time_distribution(protocol, spans, config.object_rules),
            "dialog_time": dialog_time_distribution(protocol, spans),
        },
        profiles={
            "top": tuple(category_profile(protocol, Level.TOP)),
            "discuss": tuple(category_profile(protocol, Level.DISCUSS)),
        },
        sensitivity=(*sensitivity_warnings(top_frequency), *sensitivity_warnings(discuss_frequency)),
        dialogs=tuple(spans),
        confl_share=confl_share_within(protocol, spans),
        sections=sections,
        lsa=run_lsa(protocol, config, spans),
    )
    logger.info(f"Report for {protocol.meeting_id}: {len(protocol)} episodes, {len(spans)} dialogs")
    return report
