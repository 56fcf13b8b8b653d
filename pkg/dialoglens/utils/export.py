"""
TSV and JSON writers
"""
import csv
import io
import json
from typing import Any, Iterable, Mapping, Sequence

from pydantic_core import to_jsonable_python

from dialoglens.models.dialog import TOP_LEVEL_TYPES, DialogSpan, DialogType
from dialoglens.models.distribution import Distribution, ProfileRow
from dialoglens.models.lag import LagTable, LsaFinding, PermutationResult
from dialoglens.models.protocol import IntegrityReport, SegmentationWarning
from dialoglens.models.report import Report


def dump_json(data: Any) -> str:
    """Pretty JSON for models, lists and dicts of models; ends with a newline"""
    return json.dumps(to_jsonable_python(data), indent=2, ensure_ascii=False) + "\n"


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, DialogType):
        return value.value
    return str(value)


def write_tsv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    output = io.StringIO()
    writer = csv.writer(output, delimiter="\t", lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return output.getvalue()


def distribution_tsv(distribution: Distribution) -> str:
    return write_tsv(
        ["bucket", "count", "duration_ms", "proportion"],
        ((e.bucket, e.count, e.duration_ms, e.proportion) for e in distribution.entries),
    )


def profile_tsv(rows: Sequence[ProfileRow]) -> str:
    return write_tsv(
        ["bucket", "abbreviation", "count", "duration_ms", "frequency_share", "time_share", "mean_duration_ms"],
        ((r.bucket, r.abbreviation, r.count, r.duration_ms, r.frequency_share, r.time_share, r.mean_duration_ms)
         for r in rows),
    )


def dialog_tsv(distribution: Distribution, confl_share: Mapping[str, float]) -> str:
    """Dialog time shares next to the conflict share inside each dialog type"""
    rows = [
        (e.bucket, e.count, e.duration_ms, e.proportion, confl_share[e.bucket])
        for e in distribution.entries
    ]
    rows.append(("overall", sum(e.count for e in distribution.entries), sum(e.duration_ms for e in distribution.entries),
                 1.0 if any(e.duration_ms for e in distribution.entries) else 0.0, confl_share["overall"]))
    return write_tsv(["dialog", "spans", "duration_ms", "proportion", "confl_share"], rows)


def spans_tsv(spans: Sequence[DialogSpan]) -> str:
    rows = []
    for span in spans:
        rows.append((span.type, span.first_id, span.last_id, span.section, "", "yes" if span.degenerate else ""))
        for inner in span.nested:
            rows.append((inner.type, inner.first_id, inner.last_id, inner.section, span.type, ""))
    return write_tsv(["type", "first_id", "last_id", "section", "host", "degenerate"], rows)


def sections_tsv(table: Mapping[int, Mapping[DialogType, int]]) -> str:
    return write_tsv(
        ["section", *(t.value for t in TOP_LEVEL_TYPES)],
        ((section, *(row[t] for t in TOP_LEVEL_TYPES)) for section, row in table.items()),
    )


def findings_tsv(findings: Sequence[LsaFinding], oracle: Sequence[PermutationResult] = ()) -> str:
    p_values = {(r.given, r.target): r.p_value for r in oracle}
    header = ["given", "target", "lag", "observed", "expected", "z", "significant", "degenerate", "sparse"]
    if oracle:
        header.append("permutation_p")
    rows = []
    for f in findings:
        row = [f.given, f.target, f.lag, f.observed, f.expected, f.z,
               "yes" if f.significant else "no", "yes" if f.degenerate else "no",
               "yes" if f.sparse else "no"]
        if oracle:
            row.append(p_values.get((f.given, f.target)))
        rows.append(row)
    return write_tsv(header, rows)


def lag_table_tsv(table: LagTable) -> str:
    """Observed counts as a matrix, givens down and targets across"""
    return write_tsv(
        ["given\\target", *table.alphabet],
        ((given, *table.observed[i]) for i, given in enumerate(table.alphabet)),
    )


def integrity_tsv(report: IntegrityReport) -> str:
    return write_tsv(
        ["episode_id", "kind", "detail"],
        ((v.episode_id, v.kind.value, v.detail) for v in report.violations),
    )


def segmentation_tsv(warnings: Sequence[SegmentationWarning]) -> str:
    return write_tsv(
        ["kind", "first_id", "second_id", "speaker", "code"],
        ((w.kind, w.first_id, w.second_id, w.speaker, w.code) for w in warnings),
    )


def report_tsv(report: Report) -> str:
    """Every report table, each under a `# name` line, separated by blank lines"""
    sections = [
        ("summary", write_tsv(
            ["meeting_id", "episodes", "total_duration_ms", "tool", "version"],
            [(report.meeting_id, report.episodes, report.total_duration_ms, report.tool, report.version)],
        )),
    ]
    for name, distribution in report.distributions.items():
        sections.append((name, distribution_tsv(distribution)))
    for name, rows in report.profiles.items():
        sections.append((f"profile_{name}", profile_tsv(rows)))
    sections.append(("confl_share", write_tsv(["host", "proportion"], report.confl_share.items())))
    sections.append(("dialogs", spans_tsv(report.dialogs)))
    sections.append(("sections", write_tsv(
        ["section", *(t.value for t in TOP_LEVEL_TYPES)],
        ((r.section, r.REV, r.ALT, r.SYNC, r.MNG) for r in report.sections),
    )))
    sections.append(("lsa", findings_tsv(report.lsa.findings, report.lsa.oracle)))
    sections.append(("patterns", write_tsv(["chain"], ((" -> ".join(c),) for c in report.lsa.pattern.chains))))
    sections.append(("integrity", integrity_tsv(report.integrity)))
    sections.append(("segmentation", segmentation_tsv(report.segmentation)))
    sections.append(("sensitivity", write_tsv(
        ["bucket", "proportion", "threshold"],
        ((w.bucket, w.proportion, w.threshold) for w in report.sensitivity),
    )))
    return "\n".join(f"# {name}\n{body}" for name, body in sections)
