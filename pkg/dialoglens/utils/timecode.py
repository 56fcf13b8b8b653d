"""
Time code helpers

Protocol files carry decimal seconds with exactly three fraction digits;
everything internal is integer milliseconds.
"""
import re

_SECONDS = re.compile(r"^([0-9]+)\.([0-9]{3})$")


def parse_seconds(text: str) -> int:
    """
    Parse '12.345' into 12345 milliseconds

    Raises ValueError for anything but <digits>.<3 digits>
    """
    m = _SECONDS.match(text.strip())
    if not m:
        raise ValueError(f"expected seconds with 3 decimals, got {text!r}")
    return int(m.group(1)) * 1000 + int(m.group(2))


def format_seconds(ms: int) -> str:
    return f"{ms // 1000}.{ms % 1000:03d}"


def format_duration(ms: int) -> str:
    """
    Format duration as HH:MM:SS
    """
    seconds = ms // 1000
    hours = seconds // 3600
    minutes = (seconds % 3600) // 60
    secs = seconds % 60
    return f"{hours:02d}:{minutes:02d}:{secs:02d}"
