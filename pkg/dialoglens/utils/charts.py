"""
SVG charts with pygal

pygal stamps every chart with a random uuid; it is replaced with an id
derived from the chart title so identical input renders identical bytes.
"""
import re
from typing import Mapping, Sequence

import pygal
from pygal.style import CleanStyle

from dialoglens.models.dialog import TOP_LEVEL_TYPES
from dialoglens.models.distribution import Distribution
from dialoglens.models.lag import LsaFinding
from dialoglens.models.report import Report, SectionRow
from dialoglens.scheme import abbreviation

WIDTH = 800
HEIGHT = 400

_UUID = re.compile(r"[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}")


def _options(title: str, **extra) -> dict:
    return dict(
        title=title,
        width=WIDTH,
        height=HEIGHT,
        style=CleanStyle,
        disable_xml_declaration=True,
        js=[],  # no script fetched from the network
        print_values=False,
        **extra,
    )


def _slug(title: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", title.lower()).strip("-") or "chart"


def render_svg(chart) -> str:
    return _UUID.sub(_slug(chart.config.title or ""), chart.render(is_unicode=True))


def _percent(value: float) -> float:
    return round(value * 100, 2)


def distribution_chart(distribution: Distribution, title: str) -> str:
    """Bar chart of bucket shares in percent"""
    chart = pygal.Bar(**_options(title, show_legend=False, y_title="%"))
    chart.x_labels = [abbreviation(b) for b in distribution.buckets]
    chart.add(distribution.basis.value, [_percent(e.proportion) for e in distribution.entries])
    return render_svg(chart)


def dialog_pie(distribution: Distribution, title: str = "Relative time of the dialogs") -> str:
    chart = pygal.Pie(**_options(title))
    for entry in distribution.entries:
        chart.add(entry.bucket, _percent(entry.proportion))
    return render_svg(chart)


def confl_chart(shares: Mapping[str, float], title: str = "Conflict resolution within dialogs") -> str:
    chart = pygal.Bar(**_options(title, show_legend=False, y_title="%"))
    chart.x_labels = list(shares)
    chart.add("CONFL", [_percent(v) for v in shares.values()])
    return render_svg(chart)


def sections_chart(rows: Sequence[SectionRow], title: str = "Dialog time per section") -> str:
    """Stacked seconds of each dialog type per document section"""
    chart = pygal.StackedBar(**_options(title, y_title="s"))
    chart.x_labels = [str(r.section) for r in rows]
    for dialog_type in TOP_LEVEL_TYPES:
        chart.add(dialog_type.value, [getattr(r, dialog_type.value) / 1000 for r in rows])
    return render_svg(chart)


def findings_chart(findings: Sequence[LsaFinding], title: str = "Adjusted residuals") -> str:
    """Residuals of the non-degenerate pairs, significant ones in their own series"""
    shown = [f for f in findings if not f.degenerate]
    chart = pygal.Bar(**_options(title, y_title="z"))
    chart.x_labels = [f"{abbreviation(f.given)}>{abbreviation(f.target)}" for f in shown]
    chart.add("significant", [round(f.z, 3) if f.significant else None for f in shown])
    chart.add("other", [None if f.significant else round(f.z, 3) for f in shown])
    return render_svg(chart)


def compose(charts: Sequence[str]) -> str:
    """Stack rendered charts vertically inside one outer svg document"""
    total = HEIGHT * len(charts)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" '
        f'width="{WIDTH}" height="{total}" viewBox="0 0 {WIDTH} {total}">'
    ]
    for i, svg in enumerate(charts):
        parts.append(svg.replace("<svg ", f'<svg x="0" y="{i * HEIGHT}" width="{WIDTH}" height="{HEIGHT}" ', 1))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def report_svg(report: Report) -> str:
    d = report.distributions
    charts = [
        distribution_chart(d["top_frequency"], "Activity frequency"),
        distribution_chart(d["top_time"], "Activity time"),
        distribution_chart(d["discuss_frequency"], "Discussion frequency"),
        distribution_chart(d["discuss_time"], "Discussion time"),
        distribution_chart(d["objects_time"], "Time per discussion object"),
        dialog_pie(d["dialog_time"]),
        confl_chart(report.confl_share),
        sections_chart(report.sections),
    ]
    if report.lsa.findings:
        charts.append(findings_chart(report.lsa.findings))
    return compose(charts)
