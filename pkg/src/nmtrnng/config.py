"""Run configuration: dataclasses loaded from a JSON file plus overrides."""
import json
import os
from dataclasses import asdict, dataclass, field, fields

from .exceptions import ConfigError

CONFIG_VERSION = "1.0"

ABLATION_FLAGS = ("without_buffer", "without_action", "without_stack")
VARIANTS = ("nmt+rnng", "nmt")
DTYPES = ("float64", "float32")


def _check_positive(owner, **values):
    for key, value in values.items():
        if value is None or value <= 0:
            raise ConfigError(f"{owner}.{key} must be positive, got {value}")


@dataclass(frozen=True)
class ModelConfig:
    source_vocab_size: int
    target_vocab_size: int
    num_labels: int
    word_dim: int = 256
    action_dim: int = 128
    hidden_dim: int = 256
    variant: str = "nmt+rnng"
    ablation: tuple = ()
    tie_target_embeddings: bool = True
    unk_id: int = 0
    eos_id: int = 1
    dtype: str = "float64"

    def __post_init__(self):
        _check_positive('model', source_vocab_size=self.source_vocab_size,
                        target_vocab_size=self.target_vocab_size, word_dim=self.word_dim,
                        action_dim=self.action_dim, hidden_dim=self.hidden_dim)
        if self.num_labels < 0:
            raise ConfigError(f"model.num_labels must be non-negative, got {self.num_labels}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"Unknown model variant '{self.variant}', expected one of {VARIANTS}")
        if self.dtype not in DTYPES:
            raise ConfigError(f"Unknown dtype '{self.dtype}', expected one of {DTYPES}")
        unknown = [flag for flag in self.ablation if flag not in ABLATION_FLAGS]
        if unknown:
            raise ConfigError(f"Unknown ablation flag(s) {unknown}, expected a subset of {ABLATION_FLAGS}")
        object.__setattr__(self, 'ablation', tuple(sorted(set(self.ablation))))

    @property
    def has_rnng(self):
        return self.variant == "nmt+rnng"

    @property
    def num_actions(self):
        return 2 * self.num_labels + 1

    def to_dict(self):
        data = asdict(self)
        data['ablation'] = list(self.ablation)
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data['ablation'] = tuple(data.get('ablation', ()))
        return cls(**data)


@dataclass
class PreprocessConfig:
    source_min_frequency: int = 1
    target_min_frequency: int = 1
    max_length: int = 50


@dataclass
class TrainConfig:
    word_dim: int = 256
    action_dim: int = 128
    hidden_dim: int = 256
    variant: str = "nmt+rnng"
    ablation: list = field(default_factory=list)
    tie_target_embeddings: bool = True
    learning_rate: float = 1.0
    clip_threshold: float = None
    batch_size: int = 128
    max_epochs: int = 10
    seed: int = 1234
    dtype: str = "float64"

    def __post_init__(self):
        _check_positive('train', word_dim=self.word_dim, action_dim=self.action_dim,
                        hidden_dim=self.hidden_dim, batch_size=self.batch_size,
                        max_epochs=self.max_epochs)
        if self.learning_rate < 0:
            raise ConfigError(f"train.learning_rate must be non-negative, got {self.learning_rate}")
        if self.clip_threshold is not None and self.clip_threshold <= 0:
            raise ConfigError(f"train.clip_threshold must be positive, got {self.clip_threshold}")

    @property
    def effective_clip_threshold(self):
        """3.0 for the joint model, 2.0 for the plain translator, unless set"""
        if self.clip_threshold is not None:
            return self.clip_threshold
        return 3.0 if self.variant == "nmt+rnng" else 2.0

    def model_config(self, source_vocab_size, target_vocab_size, num_labels):
        return ModelConfig(
            source_vocab_size=source_vocab_size,
            target_vocab_size=target_vocab_size,
            num_labels=num_labels,
            word_dim=self.word_dim,
            action_dim=self.action_dim,
            hidden_dim=self.hidden_dim,
            variant=self.variant,
            ablation=tuple(self.ablation),
            tie_target_embeddings=self.tie_target_embeddings,
            dtype=self.dtype,
        )


@dataclass
class DecodeConfig:
    beam_width: int = 5
    max_length: int = None
    joint: bool = False
    parse_beam: bool = False
    length_normalize: bool = False
    max_actions: int = None
    workers: int = 1

    def __post_init__(self):
        _check_positive('decode', beam_width=self.beam_width, workers=self.workers)
        if self.joint and self.parse_beam:
            raise ConfigError("decode.joint and decode.parse_beam are alternatives; set at most one")

    def max_length_for(self, source_length):
        """Default bound: twice the source length plus ten"""
        if self.max_length is not None:
            return self.max_length
        return 2 * source_length + 10


@dataclass
class EvalConfig:
    metrics: list = field(default_factory=lambda: ["bleu", "ribes"])
    bootstrap_resamples: int = 1000
    seed: int = 0

    def __post_init__(self):
        unknown = [m for m in self.metrics if m not in ("bleu", "ribes")]
        if unknown:
            raise ConfigError(f"Unknown metric(s) {unknown}")
        _check_positive('eval', bootstrap_resamples=self.bootstrap_resamples)


@dataclass
class PathsConfig:
    train_source: str = None
    train_target: str = None
    train_parses: str = None
    dev_source: str = None
    dev_target: str = None
    dev_parses: str = None
    data_dir: str = None
    output_dir: str = "output"
    checkpoint: str = None
    input: str = None
    output: str = None
    parse_output: str = None

    def require(self, *names):
        """
        Check that the named input paths are set and exist

        Raises:
            ConfigError: If a path is missing
        """
        for name in names:
            path = getattr(self, name)
            if not path:
                raise ConfigError(f"paths.{name} is required")
            if not os.path.exists(path):
                raise ConfigError(f"paths.{name} does not exist: {path}")


_SECTIONS = {
    'paths': PathsConfig,
    'preprocess': PreprocessConfig,
    'train': TrainConfig,
    'decode': DecodeConfig,
    'eval': EvalConfig,
}


@dataclass
class RunConfig:
    paths: PathsConfig = field(default_factory=PathsConfig)
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    decode: DecodeConfig = field(default_factory=DecodeConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)

    def to_dict(self):
        data = {"version": CONFIG_VERSION}
        for name in _SECTIONS:
            data[name] = asdict(getattr(self, name))
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data.pop("version", None)
        unknown = sorted(set(data) - set(_SECTIONS))
        if unknown:
            raise ConfigError(f"Unknown config section(s) {unknown}")
        sections = {}
        for name, section_cls in _SECTIONS.items():
            values = data.get(name, {})
            allowed = {f.name for f in fields(section_cls)}
            extra = sorted(set(values) - allowed)
            if extra:
                raise ConfigError(f"Unknown key(s) {extra} in config section '{name}'")
            try:
                sections[name] = section_cls(**values)
            except TypeError as e:
                raise ConfigError(f"Invalid config section '{name}': {e}") from e
        return cls(**sections)

    def with_overrides(self, overrides):
        """
        Apply dotted overrides such as 'train.learning_rate=0.5'

        Values are parsed as JSON when possible and kept as strings otherwise.
        """
        data = self.to_dict()
        for item in overrides:
            if '=' not in item:
                raise ConfigError(f"Override must look like section.key=value, got '{item}'")
            key, raw = item.split('=', 1)
            if '.' not in key:
                raise ConfigError(f"Override key must be section.key, got '{key}'")
            section, name = key.split('.', 1)
            if section not in _SECTIONS:
                raise ConfigError(f"Unknown config section '{section}'")
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw
            data[section][name] = value
        return RunConfig.from_dict(data)

    def save(self, path):
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        temp_file = path + ".temp"
        with open(temp_file, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write('\n')
        os.replace(temp_file, path)


def load_config(path=None, overrides=()):
    """
    Read a RunConfig from a JSON file (or defaults) and apply overrides

    Raises:
        ConfigError: If the file is unreadable or has unknown keys
    """
    if path is None:
        config = RunConfig()
    else:
        try:
            with open(path, 'r', encoding='utf-8') as f:
                config = RunConfig.from_dict(json.load(f))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Failed to read config {path}: {e}") from e
    return config.with_overrides(overrides) if overrides else config


