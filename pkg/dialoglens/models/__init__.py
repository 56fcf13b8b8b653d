"""
Data Models
"""
from .dialog import DialogRules, DialogSpan, DialogType, EpisodeVote
from .distribution import Basis, Distribution, DistributionEntry, Level, ObjectClass, ObjectRules
from .lag import CategorySequence, LagTable, LsaFinding, PatternGraph, PermutationResult, SequenceLevel
from .protocol import CodedEpisode, IntegrityReport, Protocol, SegmentationWarning
from .scheme import ActivityGroup, Code, CodingScheme, DiscussVerb, EntityKind, MessageKind

__all__ = [
    "ActivityGroup",
    "Basis",
    "CategorySequence",
    "Code",
    "CodedEpisode",
    "CodingScheme",
    "DialogRules",
    "DialogSpan",
    "DialogType",
    "DiscussVerb",
    "Distribution",
    "DistributionEntry",
    "EntityKind",
    "EpisodeVote",
    "IntegrityReport",
    "LagTable",
    "Level",
    "LsaFinding",
    "MessageKind",
    "ObjectClass",
    "ObjectRules",
    "PatternGraph",
    "PermutationResult",
    "Protocol",
    "SegmentationWarning",
    "SequenceLevel",
]
