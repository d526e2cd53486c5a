"""Event-stream to grain-schedule mapping: the concatenative step.

Each event occupies one tick; its relaxation sweeps subdivide the tick.
Per sweep, the slip count sets how many grains fire (capped) and how loud
(logarithmic law, compressing heavy-tailed slip counts into audible range);
the selection target sweeps from a high to a low spectral centroid over the
event so larger cascades rumble downward.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..rng import Rng
from .corpus import GrainCorpus

DESCRIPTOR_NAMES = ("rms", "centroid", "flatness")


@dataclass
class MappingConfig:
    tick_seconds: float = 0.05
    density_cap: int = 16
    gain: float = 1.0
    centroid_hi: float = 2500.0
    centroid_lo: float = 300.0
    target_flatness: float = 0.5
    rms_scale: float = 1.0
    pitch_ratio: float = 1.0
    pitch_jitter: float = 0.0
    weights: dict = field(default_factory=lambda: {"rms": 1.0, "centroid": 1.0,
                                                   "flatness": 0.5})
    seed: int = 0

    def validate(self) -> None:
        if self.tick_seconds <= 0:
            raise ConfigError(f"tick_seconds must be > 0, got {self.tick_seconds}")
        if self.density_cap < 1:
            raise ConfigError(f"density_cap must be >= 1, got {self.density_cap}")
        if self.gain <= 0:
            raise ConfigError(f"gain must be > 0, got {self.gain}")
        if self.pitch_ratio <= 0:
            raise ConfigError(f"pitch_ratio must be > 0, got {self.pitch_ratio}")
        if not 0.0 <= self.pitch_jitter < 1.0:
            raise ConfigError(f"pitch_jitter must be in [0, 1), got {self.pitch_jitter}")


@dataclass
class GrainEntry:
    onset: float
    grain_index: int
    amplitude: float
    pitch_ratio: float


@dataclass
class GrainSchedule:
    entries: list
    total_duration: float

    def validate(self, corpus: GrainCorpus | None = None) -> None:
        onsets = [e.onset for e in self.entries]
        assert all(b >= a for a, b in zip(onsets, onsets[1:]))
        assert all(0.0 < e.amplitude <= 1.0 and e.pitch_ratio > 0.0
                   for e in self.entries)
        if corpus is not None:
            assert all(0 <= e.grain_index < len(corpus) for e in self.entries)


def select_grain(corpus: GrainCorpus, target: dict, weights: dict | None = None) -> int:
    """Index of the grain minimizing the weighted Euclidean distance to the
    target in z-score-normalized descriptor space; ties break low."""
    if len(corpus) == 0:
        raise ConfigError("empty corpus")
    rows = corpus.descriptor_rows()
    mu = rows.mean(axis=0)
    sigma = rows.std(axis=0)
    sigma[sigma == 0.0] = np.inf  # constant descriptor carries no information
    w = np.array([(weights or {}).get(name, 1.0) for name in DESCRIPTOR_NAMES])
    t = np.array([target.get(name, mu[i]) for i, name in enumerate(DESCRIPTOR_NAMES)])
    zs = (rows - mu) / sigma
    zt = (t - mu) / sigma
    dist2 = (w * (zs - zt) ** 2).sum(axis=1)
    return int(np.argmin(dist2))


def events_to_schedule(events, corpus: GrainCorpus, config: MappingConfig | None = None,
                       rng: Rng | None = None) -> GrainSchedule:
    """Map time-ordered events (one per tick) to a grain schedule.

    An explicit rng overrides the config seed; the session loop passes its
    own stream so per-tick calls stay reproducible.
    """
    cfg = config or MappingConfig()
    cfg.validate()
    if len(corpus) == 0:
        raise ConfigError("empty corpus")
    if rng is None:
        rng = Rng(cfg.seed)
    entries = []
    tick = cfg.tick_seconds
    end = len(events) * tick
    for pos, ev in enumerate(events):
        if ev.size == 0:
            continue
        t0 = pos * tick
        slot = tick / ev.duration
        for j, slips in enumerate(ev.step_sizes):
            if slips == 0:
                continue
            count = min(slips, cfg.density_cap)
            amplitude = min(1.0, cfg.gain * np.log10(1.0 + slips))
            if ev.duration > 1:
                frac = j / (ev.duration - 1)
            else:
                frac = 0.0
            target = {
                "rms": min(1.0, amplitude * cfg.rms_scale),
                "centroid": cfg.centroid_hi + (cfg.centroid_lo - cfg.centroid_hi) * frac,
                "flatness": cfg.target_flatness,
            }
            grain_index = select_grain(corpus, target, cfg.weights)
            for _ in range(count):
                onset = t0 + (j + rng.random()) * slot
                pitch = cfg.pitch_ratio * (1.0 + (2.0 * rng.random() - 1.0) * cfg.pitch_jitter)
                entries.append(GrainEntry(onset=onset, grain_index=grain_index,
                                          amplitude=amplitude, pitch_ratio=pitch))
                play_len = (corpus.lengths[grain_index] / pitch) / corpus.sample_rate
                end = max(end, onset + float(play_len))
    entries.sort(key=lambda e: e.onset)
    return GrainSchedule(entries=entries, total_duration=end)


def schedule_to_jsonl(schedule: GrainSchedule) -> str:
    import json
    lines = [json.dumps({"onset": e.onset, "grain": e.grain_index,
                         "amp": e.amplitude, "pitch": e.pitch_ratio},
                        sort_keys=True, separators=(",", ":"))
             for e in schedule.entries]
    return "\n".join(lines) + ("\n" if lines else "")


def mapping_config_from_dict(raw: dict) -> MappingConfig:
    """Build a MappingConfig from a flat key-value mapping (config files)."""
    cfg = MappingConfig()
    weights = dict(cfg.weights)
    for key, value in raw.items():
        if key.startswith("weight_"):
            name = key[len("weight_"):]
            if name not in DESCRIPTOR_NAMES:
                raise ConfigError(f"unknown descriptor weight {key!r}")
            weights[name] = float(value)
        elif key in ("density_cap", "seed"):
            setattr(cfg, key, int(value))
        elif hasattr(cfg, key) and key != "weights":
            setattr(cfg, key, float(value))
        else:
            raise ConfigError(f"unknown mapping config key {key!r}")
    cfg.weights = weights
    cfg.validate()
    return cfg
