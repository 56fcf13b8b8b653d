"""
Tests for scheme file reading
"""
import pytest

from dialoglens.core.exceptions import SchemeErrorKind, SchemeFileError
from dialoglens.models.scheme import ActivityGroup, DiscussVerb, EntityKind
from dialoglens.scheme import load_scheme
from dialoglens.utils.scheme_file import read_scheme
from tests.conftest import fixture_path

MINIMAL = """\
scheme v1 MINI
activities: MANAGE, DISCUSS
discuss: INFORM, ACCEPT
tasks: MEETING
rule: MANAGE -> TASK
rule: DISCUSS -> ARTIFACT, MESSAGE [criterion]
"""


def test_read_minimal_scheme():
    """Test a small custom scheme"""
    scheme = read_scheme(MINIMAL)
    assert scheme.name == "MINI"
    assert scheme.groups == {ActivityGroup.MANAGE, ActivityGroup.DISCUSS}
    assert scheme.discuss_verbs == {DiscussVerb.INFORM, DiscussVerb.ACCEPT}
    assert scheme.criteria == frozenset()
    assert scheme.legality[ActivityGroup.DISCUSS].entity_kinds == {EntityKind.ARTIFACT, EntityKind.MESSAGE}


def test_continuation_line():
    """Test a list may continue on the line after its key"""
    scheme = load_scheme(fixture_path("style-scheme.txt"))
    assert scheme.name == "TRM-STYLE"
    assert len(scheme.discuss_verbs) == 8
    assert "STYLE" in scheme.criteria


def test_comments_and_blank_lines_ignored():
    """Test comments are stripped"""
    text = "# heading\n\n" + MINIMAL.replace("tasks: MEETING", "tasks: MEETING  # only one")
    assert read_scheme(text).tasks == {"MEETING"}


def test_empty_discuss_list():
    """Test DISCUSS without verbs is rejected on the discuss line"""
    with pytest.raises(SchemeFileError) as exc:
        load_scheme(fixture_path("empty-discuss-scheme.txt"))
    assert exc.value.kind == SchemeErrorKind.EMPTY_ACTIVITY_SET
    assert exc.value.line == 4


@pytest.mark.parametrize("text, kind", [
    ("", SchemeErrorKind.SYNTAX_ERROR),
    ("scheme v2 X\nactivities: MANAGE\nrule: MANAGE -> TASK\n", SchemeErrorKind.SYNTAX_ERROR),
    (MINIMAL.replace("INFORM, ACCEPT", "INFORM, INFORM"), SchemeErrorKind.DUPLICATE_DECLARATION),
    (MINIMAL + "rule: MANAGE -> TASK\n", SchemeErrorKind.DUPLICATE_DECLARATION),
    (MINIMAL + "tasks: PROJECT\n", SchemeErrorKind.DUPLICATE_DECLARATION),
    (MINIMAL.replace("rule: MANAGE -> TASK\n", ""), SchemeErrorKind.INCOMPLETE_LEGALITY),
    (MINIMAL.replace("activities: MANAGE, DISCUSS", "activities:"), SchemeErrorKind.EMPTY_ACTIVITY_SET),
    ("scheme v1 X\ntasks: MEETING\n", SchemeErrorKind.EMPTY_ACTIVITY_SET),
    (MINIMAL.replace("INFORM, ACCEPT", "INFORM, PONDER"), SchemeErrorKind.SYNTAX_ERROR),
    (MINIMAL + "colour: RED\n", SchemeErrorKind.SYNTAX_ERROR),
    (MINIMAL + "rule: READ -> ARTIFACT\n", SchemeErrorKind.SYNTAX_ERROR),
])
def test_scheme_errors(text, kind):
    """Test malformed scheme files raise the matching error kind"""
    with pytest.raises(SchemeFileError) as exc:
        read_scheme(text)
    assert exc.value.kind == kind
    assert exc.value.line >= 1


def test_digits_in_declared_tokens():
    """Test tokens a code could never spell are refused"""
    with pytest.raises(SchemeFileError) as exc:
        read_scheme(MINIMAL.replace("tasks: MEETING", "tasks: MEETING2"))
    assert exc.value.kind == SchemeErrorKind.SYNTAX_ERROR
    assert exc.value.line == 4


def test_non_utf8_scheme(tmp_path):
    """Test an undecodable scheme file names the line"""
    path = tmp_path / "scheme.txt"
    path.write_bytes(MINIMAL.replace("MEETING", "MEET\xc9").encode("latin-1"))
    with pytest.raises(SchemeFileError) as exc:
        load_scheme(path)
    assert exc.value.kind == SchemeErrorKind.ENCODING_ERROR
    assert exc.value.line == 4
