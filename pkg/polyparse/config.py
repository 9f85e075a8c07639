"""
Run Configuration
=================

One RunConfig describes a training or parsing run: resource paths, feature
switches, dimensions and optimizer settings. Values are resolved as
dataclass defaults <- preset <- JSON config file <- command-line flags.

Config files are flat JSON objects whose keys are the flag names with "-"
replaced by "_" (see config/default_config.json).
"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from .errors import ConfigError
from .lexicon.language import LanguageVectorMode

logger = logging.getLogger(__name__)

INJECTION_POINTS = ("token", "action", "state")


class BlockDropoutVariant(Enum):
    VERBATIM = "verbatim"        # (1 - b) / mu * e
    NORMALIZED = "normalized"    # (1 - b) / (1 - mu) * e, expectation preserving


@dataclass
class RunConfig:
    """Configuration of one run"""

    # resources
    train: Dict[str, str] = field(default_factory=dict)
    dev: Dict[str, str] = field(default_factory=dict)
    langs: Tuple[str, ...] = ()
    embeddings: Optional[str] = None
    clusters: Optional[str] = None
    wals: Optional[str] = None
    dictionary: Optional[str] = None
    model: Optional[str] = None

    # features
    lexical: bool = False
    language_vector: LanguageVectorMode = LanguageVectorMode.NONE
    language_injection: Tuple[str, ...] = INJECTION_POINTS
    fine_pos: bool = False
    joint_tagging: bool = False
    block_dropout: BlockDropoutVariant = BlockDropoutVariant.VERBATIM

    # dimensions
    word_dim: int = 50
    upos_dim: int = 12
    xpos_dim: int = 12
    cluster_dim: int = 12
    lang_dim: int = 12
    lstm_dim: int = 100
    lstm_layers: int = 2
    action_dim: int = 16
    relation_dim: int = 20
    state_dim: int = 100
    tagger_input_dim: int = 60
    tagger_hidden_dim: int = 60

    # optimization
    eta0: float = 0.1
    eta_decay: float = 0.1
    clip: float = 5.0
    patience: int = 5
    max_epochs: int = 30
    unk_replace: float = 0.25
    fine_pos_dropout: float = 0.5
    dev_sentences: int = 300
    seed: int = 1
    workers: int = 1
    precision: str = "float32"

    @property
    def uses_language_vectors(self) -> bool:
        return self.language_vector is not LanguageVectorMode.NONE

    def injects(self, point: str) -> bool:
        return self.uses_language_vectors and point in self.language_injection

    def validate(self, check_files: bool = True) -> "RunConfig":
        """
        Check switch consistency, value ranges and (optionally) that files exist.

        Raises:
            ConfigError: first problem found
        """
        if self.lexical and not self.embeddings:
            raise ConfigError("lexical features need an embeddings file (--embeddings)")
        if self.language_vector.uses_wals and not self.wals:
            raise ConfigError(f"language-vector mode '{self.language_vector.value}' needs a WALS table (--wals)")
        if self.joint_tagging and not self.lexical:
            raise ConfigError("joint tagging reads pretrained embeddings; enable --lexical")
        unknown = set(self.language_injection) - set(INJECTION_POINTS)
        if unknown:
            raise ConfigError(f"unknown language-injection points {sorted(unknown)}; choose from {INJECTION_POINTS}")

        for name in ("word_dim", "upos_dim", "xpos_dim", "cluster_dim", "lang_dim", "lstm_dim", "lstm_layers",
                     "action_dim", "relation_dim", "state_dim", "tagger_input_dim", "tagger_hidden_dim",
                     "max_epochs", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.patience < 1:
            raise ConfigError(f"patience must be at least 1, got {self.patience}")
        if self.dev_sentences < 0:
            raise ConfigError("dev_sentences cannot be negative")
        if self.eta0 <= 0:
            raise ConfigError(f"eta0 must be positive, got {self.eta0}")
        if self.clip < 0 or self.eta_decay < 0:
            raise ConfigError("clip and eta_decay cannot be negative")
        for name in ("unk_replace", "fine_pos_dropout"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {getattr(self, name)}")
        if self.precision not in ("float32", "float64"):
            raise ConfigError(f"precision must be float32 or float64, got {self.precision}")

        if check_files:
            paths = [("embeddings", self.embeddings), ("clusters", self.clusters),
                     ("wals", self.wals), ("dictionary", self.dictionary)]
            paths += [(f"train[{lang}]", p) for lang, p in self.train.items()]
            paths += [(f"dev[{lang}]", p) for lang, p in self.dev.items()]
            for name, path in paths:
                if path and not Path(path).is_file():
                    raise ConfigError(f"{name}: file not found: {path}")
        return self

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["language_vector"] = self.language_vector.value
        data["block_dropout"] = self.block_dropout.value
        data["langs"] = list(self.langs)
        data["language_injection"] = list(self.language_injection)
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunConfig":
        return _apply(cls(), data, source="dict")


PRESETS: Dict[str, Dict[str, Any]] = {
    "delexicalized": {"lexical": False, "language_vector": "none", "fine_pos": False},
    "lexical": {"lexical": True, "language_vector": "none", "fine_pos": False},
    "language-id": {"lexical": True, "language_vector": "lang-id", "fine_pos": False},
    "fine-pos": {"lexical": True, "language_vector": "lang-id", "fine_pos": True},
}


def _coerce(name: str, value: Any, default: Any) -> Any:
    if name == "language_vector":
        try:
            return LanguageVectorMode(value) if not isinstance(value, LanguageVectorMode) else value
        except ValueError:
            raise ConfigError(f"unknown language-vector mode '{value}'") from None
    if name == "block_dropout":
        try:
            return BlockDropoutVariant(value) if not isinstance(value, BlockDropoutVariant) else value
        except ValueError:
            raise ConfigError(f"unknown block-dropout variant '{value}'") from None
    if name in ("langs", "language_injection"):
        if isinstance(value, str):
            value = [v for v in value.split(",") if v]
        return tuple(value)
    if name in ("train", "dev"):
        if not isinstance(value, Mapping):
            raise ConfigError(f"{name} must map languages to files")
        return {str(k): str(v) for k, v in value.items()}
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{name} must be true or false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name} must be an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number, got {value!r}")
        return float(value)
    return None if value is None else str(value)


def _apply(config: RunConfig, values: Mapping[str, Any], source: str) -> RunConfig:
    known = {f.name: f for f in fields(RunConfig)}
    changes = {}
    for key, value in values.items():
        name = key.replace("-", "_")
        if name not in known:
            raise ConfigError(f"{source}: unknown setting '{key}'")
        changes[name] = _coerce(name, value, getattr(config, name))
    return replace(config, **changes)


def load_run_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    preset: Optional[str] = None,
) -> RunConfig:
    """
    Resolve a RunConfig.

    Args:
        path: Flat JSON config file
        overrides: Flag values; None entries are ignored
        preset: One of PRESETS

    Raises:
        ConfigError: unreadable file, unknown key or preset, bad value
    """
    config = RunConfig()
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}'; choose from {', '.join(PRESETS)}")
        config = _apply(config, PRESETS[preset], f"preset {preset}")

    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        config = _apply(config, data, str(path))
        logger.info(f"Configuration loaded from {path}")

    if overrides:
        config = _apply(config, {k: v for k, v in overrides.items() if v is not None}, "flags")
    return config
