"""
Tests for the command-line interface
"""
import json

import pytest
from openpyxl import load_workbook

from dialoglens import __version__
from dialoglens.cli import CHART_INVOCATIONS, EXIT_DATA, EXIT_OK, EXIT_USAGE, run
from tests.conftest import fixture_path

TRM = str(fixture_path("trm-sample.tsv"))


@pytest.fixture(autouse=True)
def no_env_config(clean_env):
    """Keep developer environment settings out of CLI runs"""
    return clean_env


def test_validate_ok(capsys):
    """Test a valid protocol prints its episode count"""
    assert run(["validate", TRM]) == EXIT_OK
    assert capsys.readouterr().out == "256 episodes OK\n"


def test_validate_broken_code(capsys):
    """Test a bad code exits 1 with one CodeError line"""
    assert run(["validate", str(fixture_path("broken.tsv"))]) == EXIT_DATA
    captured = capsys.readouterr()
    assert captured.out == ""
    lines = [line for line in captured.err.splitlines() if "CodeError" in line]
    assert len(lines) == 1
    assert lines[0].startswith("line 6:")


def test_validate_integrity_violation(capsys):
    """Test a forward reference fails validation"""
    assert run(["validate", str(fixture_path("forward-reference.tsv"))]) == EXIT_DATA
    assert "ForwardReference" in capsys.readouterr().err


def test_validate_non_utf8_protocol(capsys, tmp_path):
    """Test undecodable bytes in a protocol are a data error, not a usage error"""
    path = tmp_path / "latin1.tsv"
    path.write_bytes(b"protocol-tsv v1 x\nparticipants:\tP1\n1\t0.000\t10.000\tP1\tREAD/SECTION-1\tnote \xff\n")
    assert run(["validate", str(path)]) == EXIT_DATA
    err = capsys.readouterr().err
    assert "line 3: EncodingError: not UTF-8: byte 0xff" in err
    assert str(path) in err


def test_non_utf8_scheme_and_config(capsys, tmp_path):
    """Test undecodable scheme and config files are usage errors with a message"""
    scheme = tmp_path / "scheme.txt"
    scheme.write_bytes(b"scheme v1 X\xff\n")
    assert run(["validate", TRM, "--scheme", str(scheme)]) == EXIT_USAGE
    assert "EncodingError" in capsys.readouterr().err

    config = tmp_path / "rules.conf"
    config.write_bytes(b"dialog.window=\xff\n")
    assert run(["stats", TRM, "--config", str(config)]) == EXIT_USAGE
    assert "not UTF-8" in capsys.readouterr().err


def test_validate_with_custom_scheme():
    """Test the TRM sample is valid under a wider scheme"""
    assert run(["validate", TRM, "--scheme", str(fixture_path("style-scheme.txt"))]) == EXIT_OK


def test_bad_scheme_file(capsys):
    """Test a broken scheme file is a usage error"""
    assert run(["validate", TRM, "--scheme", str(fixture_path("empty-discuss-scheme.txt"))]) == EXIT_USAGE
    assert "EmptyActivitySet" in capsys.readouterr().err


def test_missing_protocol(capsys):
    """Test a missing file is a usage error"""
    assert run(["validate", "no-such-file.tsv"]) == EXIT_USAGE
    assert "not found" in capsys.readouterr().err


def test_unknown_config_key(capsys):
    """Test an unknown config key exits 2"""
    assert run(["stats", TRM, "--config", str(fixture_path("unknown-key.conf"))]) == EXIT_USAGE
    assert "dialog.speed" in capsys.readouterr().err


def test_bad_arguments():
    """Test argparse errors map to exit 2 and --version to 0"""
    assert run(["stats", TRM, "--level", "bogus"]) == EXIT_USAGE
    assert run([]) == EXIT_USAGE
    assert run(["--version"]) == EXIT_OK
    assert run(["lsa", TRM, "--alpha", "1.5"]) == EXIT_USAGE


def test_version_string(capsys):
    """Test the version flag prints the package version"""
    run(["--version"])
    assert __version__ in capsys.readouterr().out


def test_help_lists_chart_invocations(capsys):
    """Test --help names a command for every chart and each command parses"""
    assert run(["--help"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "charts:" in out
    for name, command in CHART_INVOCATIONS:
        assert name in out
        assert command in out
    for _, command in CHART_INVOCATIONS:
        argv = command.replace("PROTOCOL", TRM).split()
        assert run(argv) == EXIT_OK
    capsys.readouterr()


def test_lint(capsys):
    """Test merge candidates fail lint"""
    assert run(["lint", str(fixture_path("merge-candidate.tsv"))]) == EXIT_DATA
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "kind\tfirst_id\tsecond_id\tdetail"
    assert out[1] == "MergeCandidate\t2\t3\tP2: INFORM/SECTION-1"

    assert run(["lint", TRM]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["kind\tfirst_id\tsecond_id\tdetail"]


def test_lint_sensitivity(capsys):
    """Test dominance notes do not fail lint"""
    assert run(["lint", TRM, "--sensitivity", "0.5", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert [w["bucket"] for w in data["sensitivity"]] == ["DCSS"]
    assert data["segmentation"] == []


def test_stats_time_json(capsys):
    """Test read takes more than 15% of the synthetic meeting"""
    assert run(["stats", TRM, "--basis", "time", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    shares = {e["bucket"]: e["proportion"] for e in data["entries"]}
    assert shares["READ"] > 0.15
    assert data["basis"] == "time"


def test_stats_tsv(capsys):
    """Test TSV output of the discussion verb distribution"""
    assert run(["stats", TRM, "--level", "discuss"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "bucket\tcount\tduration_ms\tproportion"
    assert lines[1] == "accept\t36\t60000\t0.157895"
    assert len(lines) == 9


def test_stats_objects(capsys):
    """Test time per discussion object"""
    assert run(["stats", TRM, "--objects"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[1:] == [
        "INI_SOL\t48\t252000\t0.168000",
        "ALT_SOL\t48\t336000\t0.224000",
        "CRIT\t60\t288000\t0.192000",
        "OTH\t100\t624000\t0.416000",
    ]


def test_stats_profile_has_no_chart(capsys):
    """Test an output format a view does not support is a usage error"""
    assert run(["stats", TRM, "--profile", "--format", "svg"]) == EXIT_USAGE
    assert run(["stats", TRM, "--profile"]) == EXIT_OK


def test_dialogs_default(capsys):
    """Test dialog time with conflict shares"""
    assert run(["dialogs", TRM]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "dialog\tspans\tduration_ms\tproportion\tconfl_share"
    assert lines[1] == "REV\t12\t372000\t0.248000\t0.564516"
    assert lines[-1] == "overall\t38\t1500000\t1.000000\t0.204000"


def test_dialogs_spans_and_sections(capsys):
    """Test span listing and per-section output"""
    assert run(["dialogs", TRM, "--spans"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == "MNG\t1\t2\t\t\t"
    assert lines[2] == "SYNC\t3\t11\t1\t\t"
    assert lines[3] == "CONFL\t6\t7\t1\tSYNC\t"

    assert run(["dialogs", TRM, "--sections"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "section\tREV\tALT\tSYNC\tMNG"
    assert lines[1] == "0\t0\t0\t0\t6000"
    assert lines[-1] == "12\t31000\t31000\t62000\t6000"


def test_dialogs_config_file(capsys):
    """Test a config file changes the detector"""
    assert run(["dialogs", TRM, "--spans", "--format", "json",
                "--config", str(fixture_path("rules.conf"))]) == EXIT_OK
    spans = json.loads(capsys.readouterr().out)
    assert spans[0]["type"] == "MNG"


def test_svg_is_deterministic(capsys):
    """Test identical input renders identical SVG bytes"""
    assert run(["dialogs", TRM, "--format", "svg"]) == EXIT_OK
    first = capsys.readouterr().out
    assert run(["dialogs", TRM, "--format", "svg"]) == EXIT_OK
    second = capsys.readouterr().out
    assert first == second
    assert first.startswith("<svg")
    assert first.count("<svg") >= 3


def test_lsa_tsv(capsys):
    """Test LSA findings on the discussion verbs"""
    assert run(["lsa", TRM]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "given\ttarget\tlag\tobserved\texpected\tz\tsignificant\tdegenerate\tsparse"
    assert len(lines) == 1 + 64


def test_lsa_table_and_no_self(capsys):
    """Test the transition matrix and the no-self option"""
    assert run(["lsa", TRM, "--level", "top", "--table"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "given\\target\tMNG\tREAD\tRQST\tDCSS"
    assert lines[1] == "MNG\t2\t1\t0\t0"

    assert run(["lsa", TRM, "--level", "dialog", "--no-self", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["length"] == 38
    assert all(f["given"] != f["target"] for f in data["findings"])


def test_lsa_oracle(capsys):
    """Test permutation p-values are added for significant pairs"""
    assert run(["lsa", TRM, "--level", "dialog", "--oracle", "500", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    significant = [(f["given"], f["target"]) for f in data["findings"] if f["significant"]]
    assert [(r["given"], r["target"]) for r in data["oracle"]] == significant
    assert all(0.0 <= r["p_value"] <= 1.0 for r in data["oracle"])


def test_lsa_lag_too_large(capsys):
    """Test a lag beyond the sequence is a data error"""
    assert run(["lsa", TRM, "--lag", "300"]) == EXIT_DATA
    assert "too short" in capsys.readouterr().err


def test_report_json(capsys):
    """Test the JSON bundle"""
    assert run(["report", TRM]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["tool"] == "dialoglens"
    assert data["version"] == __version__
    assert data["episodes"] == 256
    assert data["total_duration_ms"] == 1_500_000
    assert set(data["distributions"]) == {
        "top_frequency", "top_time", "discuss_frequency", "discuss_time", "objects_time", "dialog_time",
    }
    assert data["confl_share"]["overall"] == pytest.approx(0.204)
    assert len(data["dialogs"]) == 38
    assert data["config"]["lag"] == 1
    assert data["lsa"]["level"] == "discuss"


def test_report_tsv_and_svg(capsys, tmp_path):
    """Test the text bundles"""
    assert run(["report", TRM, "--format", "tsv"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("# summary\n")
    assert "# dialog_time\n" in out

    target = tmp_path / "report.svg"
    assert run(["report", TRM, "--format", "svg", "--output", str(target)]) == EXIT_OK
    assert target.read_text().startswith("<svg")


def test_report_xlsx(tmp_path):
    """Test the workbook export"""
    target = tmp_path / "out" / "report.xlsx"
    assert run(["report", TRM, "--format", "xlsx", "--output", str(target)]) == EXIT_OK
    workbook = load_workbook(target)
    assert workbook.sheetnames[0] == "Summary"
    assert "dialog_time" in workbook.sheetnames
    assert workbook["Summary"]["B2"].value == 256
    assert workbook["Summary"]["D2"].value == "00:25:00"


def test_report_xlsx_needs_output(capsys):
    """Test xlsx without --output is a usage error"""
    assert run(["report", TRM, "--format", "xlsx"]) == EXIT_USAGE
    assert "--output" in capsys.readouterr().err
