"""
Excel export of a report
"""
import io
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

from openpyxl import Workbook
from openpyxl.styles import Alignment, Font

from dialoglens.models.dialog import TOP_LEVEL_TYPES
from dialoglens.models.report import Report
from dialoglens.utils.timecode import format_duration


def _add_sheet(wb: Workbook, title: str, headers: Sequence[str], rows: Iterable[Sequence[Any]]):
    ws = wb.create_sheet(title=title)
    ws.append(list(headers))

    # Style headers
    for cell in ws[1]:
        cell.font = Font(bold=True)
        cell.alignment = Alignment(horizontal='center')

    for row in rows:
        ws.append([v.value if hasattr(v, "value") else v for v in row])

    # Auto-adjust column widths
    for column in ws.columns:
        column_letter = column[0].column_letter
        max_length = max(len(str(cell.value)) if cell.value is not None else 0 for cell in column)
        ws.column_dimensions[column_letter].width = min(max_length + 2, 50)


def build_workbook(report: Report) -> Workbook:
    """One sheet per report table"""
    wb = Workbook()
    wb.remove(wb.active)

    _add_sheet(wb, "Summary", ["Meeting", "Episodes", "Coded time (ms)", "Coded time", "Version"],
               [(report.meeting_id, report.episodes, report.total_duration_ms,
                 format_duration(report.total_duration_ms), report.version)])
    for name, distribution in report.distributions.items():
        _add_sheet(wb, name, ["Bucket", "Count", "Duration (ms)", "Proportion"],
                   ((e.bucket, e.count, e.duration_ms, e.proportion) for e in distribution.entries))
    _add_sheet(wb, "confl_share", ["Host", "Proportion"], report.confl_share.items())
    _add_sheet(wb, "dialogs", ["Type", "First", "Last", "Section", "Host"],
               [row for span in report.dialogs
                for row in [(span.type, span.first_id, span.last_id, span.section, None)]
                + [(n.type, n.first_id, n.last_id, n.section, span.type) for n in span.nested]])
    _add_sheet(wb, "sections", ["Section", *(t.value for t in TOP_LEVEL_TYPES)],
               ((r.section, r.REV, r.ALT, r.SYNC, r.MNG) for r in report.sections))
    _add_sheet(wb, "lsa", ["Given", "Target", "Lag", "Observed", "Expected", "z", "Significant", "Sparse"],
               ((f.given, f.target, f.lag, f.observed, f.expected, f.z, f.significant, f.sparse)
                for f in report.lsa.findings))
    _add_sheet(wb, "integrity", ["Episode", "Kind", "Detail"],
               ((v.episode_id, v.kind, v.detail) for v in report.integrity.violations))
    return wb


def export_report_to_excel(report: Report, path: Union[str, Path]) -> Path:
    """Write the report workbook to `path` and return it"""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    build_workbook(report).save(path)
    return path


def report_excel_bytes(report: Report) -> bytes:
    output = io.BytesIO()
    build_workbook(report).save(output)
    return output.getvalue()
