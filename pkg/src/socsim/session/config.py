"""Session configuration: model choice plus drive, pacing, and sonification
settings. Loadable from flat key=value text (with # comments) and
serializable to JSON for the .slog header."""

from dataclasses import asdict, dataclass, field

from ..errors import ConfigError

MODELS = ("sandpile", "oslo", "springblock")

_INT_FIELDS = {"size", "z_c", "seed", "stats_every", "stats_s_min", "max_ticks"}
_FLOAT_FIELDS = {"alpha", "tick_seconds", "drive_rate", "drive_gain",
                 "rate_scale", "residual_sigma"}
_STR_FIELDS = {"model", "corpus"}


@dataclass
class SessionConfig:
    model: str = "springblock"
    size: int = 5
    z_c: int = 4
    alpha: float = 0.25
    tick_seconds: float = 0.05
    seed: int = 0
    drive_rate: float = 1.0       # grains per tick for the piles
    drive_gain: float = 10.0      # |drive vector| -> grains per tick (piles)
    rate_scale: float = 0.001     # |drive vector| -> plate rate (spring-block)
    residual_sigma: float = 0.0
    stats_every: int = 50
    stats_s_min: int = 1
    max_ticks: int | None = None
    corpus: str | None = None     # WAV path, or "synthetic" for the built-in crackle
    mapping: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        if not 0.005 <= self.tick_seconds <= 1.0:
            raise ConfigError(f"tick_seconds must be in [0.005, 1], got {self.tick_seconds}")
        min_size = 2 if self.model == "springblock" else 1
        if self.size < min_size:
            raise ConfigError(f"size must be >= {min_size} for {self.model}, got {self.size}")
        if self.model == "springblock" and not 0.0 < self.alpha <= 0.25:
            raise ConfigError(f"alpha must be in (0, 0.25], got {self.alpha}")
        if self.drive_rate < 0 or self.drive_gain < 0 or self.rate_scale < 0:
            raise ConfigError("drive parameters must be >= 0")
        if self.stats_every < 1:
            raise ConfigError(f"stats_every must be >= 1, got {self.stats_every}")
        if self.max_ticks is not None and self.max_ticks < 0:
            raise ConfigError(f"max_ticks must be >= 0, got {self.max_ticks}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "SessionConfig":
        cfg = cls()
        for key, value in raw.items():
            if not hasattr(cfg, key):
                raise ConfigError(f"unknown session config key {key!r}")
            setattr(cfg, key, value)
        cfg.validate()
        return cfg

    @classmethod
    def from_kv(cls, pairs: dict) -> "SessionConfig":
        """Build from flat string key-value pairs (config files, flags).

        Mapping-config keys use a `mapping.` prefix, e.g. `mapping.gain = 2`.
        """
        raw: dict = {}
        mapping: dict = {}
        for key, value in pairs.items():
            if key.startswith("mapping."):
                mapping[key[len("mapping."):]] = value
                continue
            if key in _INT_FIELDS:
                raw[key] = int(value)
            elif key in _FLOAT_FIELDS:
                raw[key] = float(value)
            elif key in _STR_FIELDS:
                raw[key] = str(value)
            else:
                raise ConfigError(f"unknown session config key {key!r}")
        if mapping:
            raw["mapping"] = mapping
        return cls.from_dict(raw)


def parse_kv_text(text: str) -> dict:
    """Parse flat `key = value` lines; '#' starts a comment; blanks ignored."""
    pairs: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, value = body.split("=", 1)
        pairs[key.strip()] = value.strip()
    return pairs
