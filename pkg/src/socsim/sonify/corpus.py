"""Grain corpus: sliding-window segmentation of a source recording plus
per-grain descriptors (RMS, spectral centroid, spectral flatness) used for
unit selection."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, IngestError
from ..rng import Rng


@dataclass
class GrainCorpus:
    """Immutable after ingestion; safe to share between renders."""

    sample_rate: int
    samples: np.ndarray
    offsets: np.ndarray
    lengths: np.ndarray
    rms: np.ndarray
    centroid: np.ndarray
    flatness: np.ndarray

    def __len__(self) -> int:
        return int(self.offsets.size)

    def grain(self, index: int) -> np.ndarray:
        off = int(self.offsets[index])
        return self.samples[off:off + int(self.lengths[index])]

    def descriptor_rows(self):
        """(n, 3) array in (rms, centroid, flatness) order."""
        return np.column_stack((self.rms, self.centroid, self.flatness))

    def validate(self) -> None:
        assert len(self) > 0
        ends = self.offsets + self.lengths
        assert (self.offsets >= 0).all() and (ends <= self.samples.size).all()
        for d in (self.rms, self.centroid, self.flatness):
            assert np.isfinite(d).all()


def ingest_corpus(samples, sample_rate: int, grain_ms: float = 80.0,
                  hop_ms: float = 20.0) -> GrainCorpus:
    """Segment a mono signal into overlapping grains and compute descriptors.

    RMS is computed on the raw (unwindowed) grain; centroid and flatness on
    the magnitude spectrum of the Hann-windowed grain.
    """
    if grain_ms < 5.0:
        raise ConfigError(f"grain length must be >= 5 ms, got {grain_ms}")
    if hop_ms <= 0.0:
        raise ConfigError(f"hop must be > 0 ms, got {hop_ms}")
    x = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    if x.ndim != 1:
        raise IngestError(f"expected mono 1-D signal, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise IngestError("signal contains non-finite samples")
    glen = max(1, int(round(grain_ms * sample_rate / 1000.0)))
    hop = max(1, int(round(hop_ms * sample_rate / 1000.0)))
    if x.size < glen:
        raise IngestError(f"signal of {x.size} samples is shorter than one "
                          f"{glen}-sample grain")

    n = 1 + (x.size - glen) // hop
    offsets = (np.arange(n) * hop).astype(np.int64)
    window = np.hanning(glen)
    freqs = np.fft.rfftfreq(glen, d=1.0 / sample_rate)

    rms = np.empty(n)
    centroid = np.empty(n)
    flatness = np.empty(n)
    for i, off in enumerate(offsets):
        g = x[off:off + glen]
        rms[i] = np.sqrt(np.mean(g * g))
        mag = np.abs(np.fft.rfft(g * window))
        total = mag.sum()
        if total <= 0.0:
            centroid[i] = 0.0
            flatness[i] = 1.0
            continue
        centroid[i] = float((freqs * mag).sum() / total)
        if (mag == 0.0).any():
            flatness[i] = 0.0
        else:
            flatness[i] = float(np.exp(np.mean(np.log(mag))) / np.mean(mag))
    return GrainCorpus(sample_rate=int(sample_rate), samples=x,
                       offsets=offsets,
                       lengths=np.full(n, glen, dtype=np.int64),
                       rms=rms, centroid=centroid, flatness=flatness)


def crackle_noise(duration_s: float = 2.0, sample_rate: int = 22050,
                  seed: int = 0, bursts_per_s: float = 60.0) -> np.ndarray:
    """Synthetic crackle: randomly placed exponentially decaying noise bursts.

    Ships with the repo so tests and demos need no external recording.
    """
    rng = Rng(seed)
    n = int(round(duration_s * sample_rate))
    out = np.zeros(n)
    n_bursts = int(round(bursts_per_s * duration_s))
    for _ in range(n_bursts):
        start = rng.randbelow(max(1, n))
        length = min(n - start, int(sample_rate * (0.004 + 0.05 * rng.random())))
        if length <= 0:
            continue
        amp = 0.15 + 0.8 * rng.random()
        decay = np.exp(-np.arange(length) / (0.12 * length + 1.0))
        burst = np.array([rng.random() * 2.0 - 1.0 for _ in range(length)])
        out[start:start + length] += amp * decay * burst
    peak = np.abs(out).max()
    if peak > 1.0:
        out /= peak
    return out
