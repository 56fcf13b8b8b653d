"""
Application Configuration
Settings come from environment variables (and a .env file when present);
analysis overrides come from an optional key=value config file.
"""
import os
from pathlib import Path
from typing import Literal, Optional, Union

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from dialoglens.core.exceptions import ConfigError
from dialoglens.models.dialog import DialogRules, DialogType
from dialoglens.models.distribution import Level, ObjectRule, ObjectRules
from dialoglens.models.lag import SequenceLevel
from dialoglens.models.scheme import MessageKind

load_dotenv()


def _env(name: str, default: str = ""):
    return Field(default_factory=lambda: os.getenv(name, default))


def _env_int(name: str, default: int):
    return Field(default_factory=lambda: int(os.getenv(name, str(default))))


class Settings(BaseModel):
    # ==================== Scheme ====================
    DIALOG_LENS_SCHEME: str = _env("DIALOG_LENS_SCHEME")  # empty = built-in TRM scheme
    DIALOG_LENS_CONFIG: str = _env("DIALOG_LENS_CONFIG")

    # ==================== Logging ====================
    LOG_LEVEL: str = _env("LOG_LEVEL", "warning")
    LOG_FILE: str = _env("LOG_FILE")
    LOG_MAX_SIZE: int = _env_int("LOG_MAX_SIZE", 10485760)  # 10MB
    LOG_BACKUP_COUNT: int = _env_int("LOG_BACKUP_COUNT", 5)

    # ==================== Dialog detection ====================
    DIALOG_WINDOW: int = _env_int("DIALOG_WINDOW", 5)
    DIALOG_CONFL_BREAK: int = _env_int("DIALOG_CONFL_BREAK", 2)
    DIALOG_TIE_PRIORITY: str = _env("DIALOG_TIE_PRIORITY", "REV,ALT,SYNC")

    # ==================== Sequence statistics ====================
    LSA_LAG: int = _env_int("LSA_LAG", 1)
    LSA_ALPHA: float = Field(default_factory=lambda: float(os.getenv("LSA_ALPHA", "0.05")))
    ORACLE_EXACT_LIMIT: int = _env_int("ORACLE_EXACT_LIMIT", 10000)

    # ==================== API ====================
    API_PREFIX: str = _env("API_PREFIX", "/api")
    MAX_UPLOAD_SIZE: int = _env_int("MAX_UPLOAD_SIZE", 5242880)  # 5MB


def get_settings() -> Settings:
    """Read the environment now; module-level `settings` is read once at import"""
    try:
        return Settings()
    except (ValueError, ValidationError) as e:
        raise ConfigError(f"bad environment setting: {e}") from e


settings = Settings()


class FileOverrides(BaseModel):
    """Values accepted from a config file; None means not set"""
    model_config = ConfigDict(frozen=True)

    window: Optional[int] = Field(default=None, ge=1)
    confl_break: Optional[int] = Field(default=None, ge=1)
    tie_priority: Optional[tuple[DialogType, ...]] = None
    object_order: Optional[tuple[ObjectRule, ...]] = None
    alt_kinds: Optional[frozenset[MessageKind]] = None
    use_dialogs: Optional[bool] = None
    include_self: Optional[bool] = None


_FILE_KEYS = {
    "dialog.window": "window",
    "dialog.confl_break": "confl_break",
    "dialog.tie_priority": "tie_priority",
    "objects.order": "object_order",
    "objects.alt_kinds": "alt_kinds",
    "objects.use_dialogs": "use_dialogs",
    "lsa.include_self": "include_self",
}
_LIST_KEYS = {"tie_priority", "object_order", "alt_kinds"}


def _split(value: str) -> list[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def read_config_file(path: Union[str, Path]) -> FileOverrides:
    """
    Parse a key=value config file

    Raises ConfigError for a missing file, an unknown key or a bad value.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = dotenv_values(path, encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ConfigError(f"{path}: not UTF-8: byte 0x{e.object[e.start]:02x}") from e
    values = {}
    for key, value in raw.items():
        if key not in _FILE_KEYS:
            raise ConfigError(f"{path}: unknown config key {key!r}")
        field = _FILE_KEYS[key]
        value = value or ""
        if field in _LIST_KEYS:
            values[field] = [v.upper() if field != "object_order" else v.lower() for v in _split(value)]
        else:
            values[field] = value.strip()
    try:
        return FileOverrides(**values)
    except ValidationError as e:
        raise ConfigError(f"{path}: {e.errors()[0]['msg']} ({e.errors()[0]['loc'][0]})") from e


class RunConfig(BaseModel):
    """Everything one CLI run or API request resolved to; echoed in reports"""
    model_config = ConfigDict(frozen=True)

    command: str
    protocol_path: Optional[str] = None
    scheme_path: Optional[str] = None
    config_path: Optional[str] = None
    format: Literal["tsv", "json", "svg", "xlsx"] = "tsv"
    level: Union[Level, SequenceLevel] = Level.TOP
    lag: int = Field(default=1, ge=1)
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    seed: int = 0
    oracle_iterations: Optional[int] = Field(default=None, ge=1)
    exact_limit: int = Field(default=10000, ge=1)
    include_self: bool = True
    dialog_rules: DialogRules = DialogRules()
    object_rules: ObjectRules = ObjectRules()


def build_run_config(
    command: str,
    current: Optional[Settings] = None,
    config_path: Optional[str] = None,
    **flags,
) -> RunConfig:
    """
    Merge settings, config file and explicit flags, later ones winning

    Flags left as None are ignored. Raises ConfigError on any invalid value.
    """
    current = current or get_settings()
    config_path = config_path or current.DIALOG_LENS_CONFIG or None
    overrides = read_config_file(config_path) if config_path else FileOverrides()

    try:
        dialog_rules = DialogRules(
            window=overrides.window or current.DIALOG_WINDOW,
            confl_break=overrides.confl_break or current.DIALOG_CONFL_BREAK,
            tie_priority=overrides.tie_priority or tuple(
                DialogType(t.upper()) for t in _split(current.DIALOG_TIE_PRIORITY)
            ),
        )
        object_defaults = ObjectRules()
        object_rules = ObjectRules(
            order=overrides.object_order or object_defaults.order,
            alt_kinds=overrides.alt_kinds or object_defaults.alt_kinds,
            use_dialogs=object_defaults.use_dialogs if overrides.use_dialogs is None else overrides.use_dialogs,
        )
        values = dict(
            command=command,
            config_path=config_path,
            scheme_path=current.DIALOG_LENS_SCHEME or None,
            lag=current.LSA_LAG,
            alpha=current.LSA_ALPHA,
            exact_limit=current.ORACLE_EXACT_LIMIT,
            include_self=True if overrides.include_self is None else overrides.include_self,
            dialog_rules=dialog_rules,
            object_rules=object_rules,
        )
        values.update({k: v for k, v in flags.items() if v is not None})
        return RunConfig(**values)
    except ValidationError as e:
        error = e.errors()[0]
        where = ".".join(str(p) for p in error["loc"])
        raise ConfigError(f"invalid setting {where}: {error['msg']}") from e
    except ValueError as e:
        raise ConfigError(str(e)) from e
