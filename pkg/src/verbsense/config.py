"""Pipeline configuration: a flat ``key = value`` file with dotted
namespaces, parsed into typed dataclasses and hashed for artifact
provenance checks."""

import hashlib
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .corpus import SpaceConfig
from .regression import RegressionConfig
from .senses import ClusterConfig


class ConfigError(Exception):
    """Malformed, unknown, or inconsistent configuration input."""


@dataclass(frozen=True)
class PathsConfig:
    corpus: str = "corpus.txt"
    stop_list: str = ""
    relations: str = ""
    artifacts: str = "artifacts"
    supervised_dataset: str = ""
    similarity_dataset: str = ""
    wordsim_dataset: str = ""


@dataclass(frozen=True)
class HolisticConfig:
    min_phrase_count: int = 100
    svd_dim: int = 0          # 0: inherit space.svd_dim

    def __post_init__(self):
        if self.min_phrase_count < 1:
            raise ValueError("min_phrase_count must be >= 1")
        if self.svd_dim < 0:
            raise ValueError("svd_dim must be >= 0")


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    paths: PathsConfig = field(default_factory=PathsConfig)
    space: SpaceConfig = field(default_factory=SpaceConfig)
    holistic: HolisticConfig = field(default_factory=HolisticConfig)
    regression: RegressionConfig = field(default_factory=RegressionConfig)
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    base_dir: Path = field(default_factory=Path.cwd, compare=False)

    def resolve(self, relative: str) -> Path:
        """Interpret a configured path relative to the config file's
        directory; absolute paths pass through."""
        p = Path(relative)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def holistic_svd_dim(self) -> int:
        return self.holistic.svd_dim or self.space.svd_dim


# config-key → (section, dataclass field, converter) table; "lambda" is
# accepted for the ridge penalty because "lam" reads poorly in a file
_SECTIONS = {
    "paths": (PathsConfig, "paths"),
    "space": (SpaceConfig, "space"),
    "holistic": (HolisticConfig, "holistic"),
    "regression": (RegressionConfig, "regression"),
    "cluster": (ClusterConfig, "cluster"),
}
_FIELD_ALIASES = {("regression", "lambda"): "lam"}


def _convert(value: str, target_type, key: str):
    if target_type is bool:
        low = value.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {value!r}")
    if target_type is int:
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
    if target_type is float:
        if value.lower() == "e":
            return math.e
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {value!r}")
    return value


def parse_config_text(text: str, base_dir: Path | str = ".") -> PipelineConfig:
    """Parse ``key = value`` lines; '#' starts a comment, blank lines are
    skipped, unknown keys are errors."""
    sections: dict[str, dict] = {name: {} for name in _SECTIONS}
    top: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key == "seed":
            top["seed"] = _convert(value, int, key)
            continue
        if "." not in key:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        section, _, name = key.partition(".")
        if section not in _SECTIONS:
            raise ConfigError(f"line {lineno}: unknown section {section!r}")
        cls, _attr = _SECTIONS[section]
        name = _FIELD_ALIASES.get((section, name), name)
        by_name = {f.name: f for f in fields(cls)}
        if name not in by_name:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        ftype = by_name[name].type
        target = {"int": int, "float": float, "bool": bool, "str": str}.get(
            ftype if isinstance(ftype, str) else ftype.__name__, str)
        if sections[section].get(name) is not None:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        sections[section][name] = _convert(value, target, key)

    kwargs = dict(top)
    for section, (cls, attr) in _SECTIONS.items():
        try:
            kwargs[attr] = cls(**sections[section])
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"section {section!r}: {exc}") from exc
    return PipelineConfig(base_dir=Path(base_dir), **kwargs)


def load_config(path) -> PipelineConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return parse_config_text(text, base_dir=p.resolve().parent)


def config_hash(cfg: PipelineConfig) -> str:
    """Stable digest of the seed and every model setting; file locations are
    excluded so moving inputs around does not invalidate artifacts."""
    items: list[str] = [f"seed = {cfg.seed}"]
    for section, (cls, attr) in sorted(_SECTIONS.items()):
        if section == "paths":
            continue
        obj = getattr(cfg, attr)
        for f in sorted(fields(cls), key=lambda f: f.name):
            value = getattr(obj, f.name)
            if isinstance(value, float):
                value = format(value, ".17g")
            items.append(f"{section}.{f.name} = {value}")
    canon = "\n".join(items) + "\n"
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]
