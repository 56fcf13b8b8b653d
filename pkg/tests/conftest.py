"""
Pytest configuration and fixtures
"""
from pathlib import Path

import pytest

from dialoglens.corpus import load_protocol
from dialoglens.models.protocol import CodedEpisode, Protocol
from dialoglens.scheme import builtin_trm_scheme, parse_code

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def make_protocol(codes, durations=None, speakers=None, meeting_id="test") -> Protocol:
    """Build a protocol from code strings; episodes are 10 s long unless durations are given"""
    scheme = builtin_trm_scheme()
    durations = durations or [10_000] * len(codes)
    speakers = speakers or ["P1", "P2"]
    episodes = []
    start = 0
    for i, (text, duration) in enumerate(zip(codes, durations), start=1):
        episodes.append(CodedEpisode(
            id=i,
            start_ms=start,
            end_ms=start + duration,
            speaker=speakers[(i - 1) % len(speakers)],
            code=parse_code(text, scheme),
        ))
        start += duration
    return Protocol(
        meeting_id=meeting_id,
        participants=tuple(dict.fromkeys(speakers)),
        episodes=tuple(episodes),
        scheme=scheme,
    )


@pytest.fixture
def trm_scheme():
    return builtin_trm_scheme()


@pytest.fixture(scope="session")
def trm_sample():
    """Synthetic 256-episode review meeting over 12 sections"""
    return load_protocol(fixture_path("trm-sample.tsv"))


@pytest.fixture(scope="session")
def dialog_sample():
    """Hand-labelled 60-episode protocol with known dialog spans"""
    return load_protocol(fixture_path("dialog-sample.tsv"))


@pytest.fixture
def clean_env(monkeypatch):
    """Unset every variable Settings reads"""
    for name in (
        "DIALOG_LENS_SCHEME", "DIALOG_LENS_CONFIG", "LOG_LEVEL", "LOG_FILE",
        "LOG_MAX_SIZE", "LOG_BACKUP_COUNT", "DIALOG_WINDOW", "DIALOG_CONFL_BREAK",
        "DIALOG_TIE_PRIORITY", "LSA_LAG", "LSA_ALPHA", "ORACLE_EXACT_LIMIT",
    ):
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


@pytest.fixture
def client():
    """Create test client"""
    from fastapi.testclient import TestClient
    from dialoglens.main import app

    with TestClient(app) as test_client:
        yield test_client
