"""Overlap-add grain rendering with a soft output limiter.

Pure function of (schedule, corpus, sample_rate): no randomness lives here,
so renders are bitwise reproducible.
"""

import math

import numpy as np

from .corpus import GrainCorpus
from .schedule import GrainSchedule

LIMITER_KNEE = 0.8


def soft_limit(x: np.ndarray, knee: float = LIMITER_KNEE) -> np.ndarray:
    """Identity below the knee, smooth tanh compression above, |y| < 1."""
    y = x.copy()
    over = np.abs(x) > knee
    if over.any():
        span = 1.0 - knee
        y[over] = np.sign(x[over]) * (knee + span * np.tanh((np.abs(x[over]) - knee) / span))
    return y


def render(schedule: GrainSchedule, corpus: GrainCorpus, sample_rate: int,
           knee: float = LIMITER_KNEE) -> np.ndarray:
    """Hann-window, scale, resample (linear interpolation) and overlap-add
    every scheduled grain, then soft-limit the mix."""
    n_out = int(math.ceil(schedule.total_duration * sample_rate))
    out = np.zeros(n_out)
    for e in schedule.entries:
        g = corpus.grain(e.grain_index)
        glen = g.size
        if glen == 0:
            continue
        shaped = g * np.hanning(glen) * e.amplitude
        # One source-index step per output sample: pitch plus rate conversion.
        step = e.pitch_ratio * corpus.sample_rate / sample_rate
        n_play = int(math.floor((glen - 1) / step)) + 1
        positions = np.arange(n_play) * step
        resampled = np.interp(positions, np.arange(glen), shaped)
        start = int(round(e.onset * sample_rate))
        stop = min(start + n_play, n_out)
        if stop > start:
            out[start:stop] += resampled[: stop - start]
    return soft_limit(out, knee)
