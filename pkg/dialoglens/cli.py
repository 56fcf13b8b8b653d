"""
Command-line entry point

    python -m dialoglens <command> [options] PROTOCOL

Data goes to stdout, diagnostics to stderr. Exit status is 0 on success,
1 when the data fails validation or integrity checks and 2 on usage,
configuration or file errors.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from dialoglens import __version__
from dialoglens.analysis import (
    category_profile,
    frequency_distribution,
    object_time_distribution,
    sensitivity_warnings,
    time_distribution,
)
from dialoglens.core.config import RunConfig, build_run_config
from dialoglens.core.exceptions import ConfigError, DialogLensError, ProtocolLoadError, SchemeFileError
from dialoglens.core.logging import setup_logging
from dialoglens.corpus import check_referential_integrity, lint_segmentation, load_protocol
from dialoglens.dialogs import (
    confl_share_within,
    detect_dialogs,
    dialog_time_distribution,
    section_dialog_durations,
)
from dialoglens.models.distribution import Level
from dialoglens.models.lag import SequenceLevel
from dialoglens.models.protocol import Protocol
from dialoglens.models.report import SectionRow
from dialoglens.report import build_report, run_lsa
from dialoglens.scheme import builtin_trm_scheme, load_scheme
from dialoglens.seqstats import extract_sequence, transition_counts
from dialoglens.utils import charts, export
from dialoglens.utils.excel import export_report_to_excel

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2


CHART_INVOCATIONS: tuple[tuple[str, str], ...] = (
    ("activity frequency", "stats PROTOCOL --level top --basis freq --format svg"),
    ("activity time", "stats PROTOCOL --level top --basis time --format svg"),
    ("discussion verb frequency", "stats PROTOCOL --level discuss --basis freq --format svg"),
    ("discussion verb time", "stats PROTOCOL --level discuss --basis time --format svg"),
    ("time per discussion object", "stats PROTOCOL --objects --format svg"),
    ("dialog time and conflict share", "dialogs PROTOCOL --format svg"),
    ("dialog time per section", "dialogs PROTOCOL --sections --format svg"),
    ("succession patterns", "lsa PROTOCOL --format svg"),
    ("all of the above", "report PROTOCOL --format svg"),
)

CHARTS_HELP = "charts:\n" + "\n".join(f"  {name:<32}{command}" for name, command in CHART_INVOCATIONS)


class UsageError(DialogLensError):
    """Bad flag combination found after argparse accepted the arguments"""


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("protocol", help="protocol TSV file")
    common.add_argument("--scheme", help="coding scheme file (default: $DIALOG_LENS_SCHEME or built-in TRM)")
    common.add_argument("--config", help="key=value file overriding dialog, object and LSA rules")
    common.add_argument("--log-level", help="debug, info, warning or error (default: $LOG_LEVEL)")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", choices=["tsv", "json", "svg"], default="tsv")

    parser = argparse.ArgumentParser(
        prog="dialoglens",
        description="Validate and analyse coded meeting transcripts.",
        epilog=CHARTS_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    commands.add_parser(
        "validate", parents=[common],
        help="check format, codes and message references",
        description="Load a protocol, check every code against the scheme and every message "
                    "reference against earlier episodes. Prints 'N episodes OK' on success.",
    )

    lint = commands.add_parser(
        "lint", parents=[common, output],
        help="report merge candidates and broken references",
        description="List adjacent same-speaker episodes under one code (merge candidates) and "
                    "referential integrity violations. Exit 1 when any is found.",
    )
    lint.add_argument("--sensitivity", type=float, metavar="THRESHOLD",
                      help="also note categories holding more than THRESHOLD of all episodes")

    stats = commands.add_parser(
        "stats", parents=[common, output],
        help="category frequency and time distributions",
        description="Distribution of episodes over categories. --level top gives the activity "
                    "chart (manage, read, request, discuss); --level discuss the discussion verb "
                    "chart. --basis chooses counts or time. --objects gives the time spent on each "
                    "discussion object (initial solution, alternatives, criteria, other).",
    )
    stats.add_argument("--level", choices=["top", "discuss"], default="top")
    stats.add_argument("--basis", choices=["freq", "time"], default="freq")
    mode = stats.add_mutually_exclusive_group()
    mode.add_argument("--objects", action="store_true", help="time per discussion object")
    mode.add_argument("--profile", action="store_true", help="frequency and time side by side")

    dialogs = commands.add_parser(
        "dialogs", parents=[common, output],
        help="dialog segmentation and dialog time",
        description="Detect review, alternative, synchronisation and management dialogs with "
                    "nested conflict resolution. Default output is the relative time of each "
                    "dialog (pie chart) with the share of conflict resolution inside it (bar "
                    "chart); --sections gives dialog time per document section (stacked bars).",
    )
    view = dialogs.add_mutually_exclusive_group()
    view.add_argument("--sections", action="store_true", help="dialog time per document section")
    view.add_argument("--spans", action="store_true", help="list the detected spans")

    lsa = commands.add_parser(
        "lsa", parents=[common, output],
        help="lag sequential analysis",
        description="Test which categories follow one another at a given lag more often than "
                    "chance, using adjusted residuals, and draw the significant successions as "
                    "chains (residual chart). --oracle checks each significant pair with a "
                    "permutation test.",
    )
    lsa.add_argument("--level", choices=["top", "discuss", "dialog"], default="discuss")
    lsa.add_argument("--lag", type=int)
    lsa.add_argument("--alpha", type=float)
    lsa.add_argument("--oracle", type=int, metavar="ITER", help="permutation iterations when sampling")
    lsa.add_argument("--seed", type=int, default=0)
    lsa.add_argument("--no-self", action="store_true", help="leave out a->a transitions")
    lsa.add_argument("--table", action="store_true", help="print the observed transition matrix")

    report = commands.add_parser(
        "report", parents=[common],
        help="every table and chart in one bundle",
        description="All distributions, dialogs, section times, LSA findings and checks. "
                    "SVG output stacks every chart; xlsx writes one sheet per table.",
    )
    report.add_argument("--format", choices=["tsv", "json", "svg", "xlsx"], default="json")
    report.add_argument("--output", help="write to this file instead of stdout (required for xlsx)")
    report.add_argument("--level", choices=["top", "discuss", "dialog"], default="discuss",
                        help="category level for the LSA part")
    report.add_argument("--lag", type=int)
    report.add_argument("--alpha", type=float)
    report.add_argument("--oracle", type=int, metavar="ITER")
    report.add_argument("--seed", type=int, default=0)
    report.add_argument("--no-self", action="store_true")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    level = getattr(args, "level", None)
    if args.command in ("lsa", "report"):
        level = SequenceLevel(level)
    elif level is not None:
        level = Level(level)
    return build_run_config(
        args.command,
        config_path=args.config,
        protocol_path=args.protocol,
        scheme_path=args.scheme,
        format=getattr(args, "format", None),
        level=level,
        lag=getattr(args, "lag", None),
        alpha=getattr(args, "alpha", None),
        seed=getattr(args, "seed", None),
        oracle_iterations=getattr(args, "oracle", None),
        include_self=False if getattr(args, "no_self", False) else None,
    )


def _load(config: RunConfig) -> Protocol:
    scheme = builtin_trm_scheme()
    if config.scheme_path:
        if not Path(config.scheme_path).is_file():
            raise ConfigError(f"scheme file not found: {config.scheme_path}")
        try:
            scheme = load_scheme(config.scheme_path)
        except SchemeFileError as e:
            raise ConfigError(f"{config.scheme_path}: {e.detail}") from e
    if not Path(config.protocol_path).is_file():
        raise ConfigError(f"protocol file not found: {config.protocol_path}")
    return load_protocol(config.protocol_path, scheme)


def _emit(text: str):
    sys.stdout.write(text)


def _cmd_validate(protocol: Protocol, config: RunConfig) -> int:
    integrity = check_referential_integrity(protocol)
    if not integrity.ok:
        for v in integrity.violations:
            print(f"episode {v.episode_id}: {v.kind.value}: {v.detail}", file=sys.stderr)
        return EXIT_DATA
    _emit(f"{len(protocol)} episodes OK\n")
    return EXIT_OK


def _cmd_lint(protocol: Protocol, config: RunConfig, threshold: Optional[float]) -> int:
    if config.format == "svg":
        raise UsageError("lint has no chart output")
    integrity = check_referential_integrity(protocol)
    merges = lint_segmentation(protocol)
    notes = []
    if threshold is not None:
        notes = sensitivity_warnings(frequency_distribution(protocol, Level.TOP), threshold)
        notes += sensitivity_warnings(frequency_distribution(protocol, Level.DISCUSS), threshold)

    if config.format == "json":
        _emit(export.dump_json({"integrity": integrity, "segmentation": merges, "sensitivity": notes}))
    else:
        rows = [(v.kind.value, v.episode_id, "", v.detail) for v in integrity.violations]
        rows += [(w.kind, w.first_id, w.second_id, f"{w.speaker}: {w.code}") for w in merges]
        rows += [("Dominance", "", "", n.detail) for n in notes]
        _emit(export.write_tsv(["kind", "first_id", "second_id", "detail"], rows))
    return EXIT_OK if integrity.ok and not merges else EXIT_DATA


def _cmd_stats(protocol: Protocol, config: RunConfig, args: argparse.Namespace) -> int:
    if args.objects:
        spans = detect_dialogs(protocol, config.dialog_rules)
        distribution = object_time_distribution(protocol, spans, config.object_rules)
        title = "Time per discussion object"
    elif args.profile:
        rows = category_profile(protocol, config.level)
        if config.format == "svg":
            raise UsageError("--profile has no chart output; use --basis with --format svg")
        _emit(export.dump_json(rows) if config.format == "json" else export.profile_tsv(rows))
        return EXIT_OK
    else:
        build = frequency_distribution if args.basis == "freq" else time_distribution
        distribution = build(protocol, config.level)
        what = "Activity" if config.level == Level.TOP else "Discussion"
        title = f"{what} {'frequency' if args.basis == 'freq' else 'time'}"

    if config.format == "json":
        _emit(export.dump_json(distribution))
    elif config.format == "svg":
        _emit(charts.distribution_chart(distribution, title))
    else:
        _emit(export.distribution_tsv(distribution))
    return EXIT_OK


def _cmd_dialogs(protocol: Protocol, config: RunConfig, args: argparse.Namespace) -> int:
    spans = detect_dialogs(protocol, config.dialog_rules)
    if args.spans:
        if config.format == "svg":
            raise UsageError("--spans has no chart output")
        _emit(export.dump_json(spans) if config.format == "json" else export.spans_tsv(spans))
    elif args.sections:
        table = section_dialog_durations(protocol, spans)
        rows = [SectionRow(section=s, **{t.value: ms for t, ms in row.items()}) for s, row in table.items()]
        if config.format == "json":
            _emit(export.dump_json(rows))
        elif config.format == "svg":
            _emit(charts.sections_chart(rows))
        else:
            _emit(export.sections_tsv(table))
    else:
        distribution = dialog_time_distribution(protocol, spans)
        shares = confl_share_within(protocol, spans)
        if config.format == "json":
            _emit(export.dump_json({"distribution": distribution, "confl_share": shares}))
        elif config.format == "svg":
            _emit(charts.compose([charts.dialog_pie(distribution), charts.confl_chart(shares)]))
        else:
            _emit(export.dialog_tsv(distribution, shares))
    return EXIT_OK


def _cmd_lsa(protocol: Protocol, config: RunConfig, args: argparse.Namespace) -> int:
    spans = detect_dialogs(protocol, config.dialog_rules) if config.level == SequenceLevel.DIALOG else None
    summary = run_lsa(protocol, config, spans)
    if summary.skipped:
        print(f"error: {summary.skipped}", file=sys.stderr)
        return EXIT_DATA
    if args.table:
        seq = extract_sequence(protocol, config.level, spans)
        _emit(export.lag_table_tsv(transition_counts(seq, config.lag)))
    elif config.format == "json":
        _emit(export.dump_json(summary))
    elif config.format == "svg":
        _emit(charts.findings_chart(summary.findings))
    else:
        _emit(export.findings_tsv(summary.findings, summary.oracle))
        for chain in summary.pattern.chains:
            print(f"pattern: {' -> '.join(chain)}", file=sys.stderr)
    return EXIT_OK


def _cmd_report(protocol: Protocol, config: RunConfig, output: Optional[str]) -> int:
    if config.format == "xlsx" and not output:
        raise UsageError("--format xlsx needs --output FILE")
    report = build_report(protocol, config)
    if config.format == "xlsx":
        export_report_to_excel(report, output)
        print(f"wrote {output}", file=sys.stderr)
        return EXIT_OK
    render = {"json": export.dump_json, "tsv": export.report_tsv, "svg": charts.report_svg}[config.format]
    text = render(report)
    if output:
        Path(output).write_text(text, encoding="utf-8")
        print(f"wrote {output}", file=sys.stderr)
    else:
        _emit(text)
    return EXIT_OK


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the exit status instead of exiting"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        setup_logging(level=args.log_level)
        config = _run_config(args)
        protocol = _load(config)
        if args.command == "validate":
            return _cmd_validate(protocol, config)
        if args.command == "lint":
            return _cmd_lint(protocol, config, args.sensitivity)
        if args.command == "stats":
            return _cmd_stats(protocol, config, args)
        if args.command == "dialogs":
            return _cmd_dialogs(protocol, config, args)
        if args.command == "lsa":
            return _cmd_lsa(protocol, config, args)
        return _cmd_report(protocol, config, args.output)
    except (ConfigError, UsageError) as e:
        print(f"error: {e.detail}", file=sys.stderr)
        return EXIT_USAGE
    except ProtocolLoadError as e:
        for issue in e.issues:
            print(str(issue), file=sys.stderr)
        print(f"error: {e.detail}", file=sys.stderr)
        return EXIT_DATA
    except DialogLensError as e:
        print(f"error: {e.detail}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())
