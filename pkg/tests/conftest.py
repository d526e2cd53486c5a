import copy

import numpy as np
import pytest

from socsim.sonify import ingest_corpus
from socsim.rng import Rng


def clone_state(state):
    """Deep copy of a model state (numpy arrays and RNG included)."""
    return copy.deepcopy(state)


@pytest.fixture(scope="session")
def small_corpus():
    """Deterministic broadband corpus: mixed tones + noise, 0.5 s at 22050."""
    sr = 22050
    t = np.arange(int(0.5 * sr)) / sr
    rng = Rng(99)
    noise = np.array([rng.random() * 2 - 1 for _ in range(t.size)])
    sig = (0.4 * np.sin(2 * np.pi * 330 * t)
           + 0.3 * np.sin(2 * np.pi * 1800 * t) * (t < 0.25)
           + 0.25 * noise * (t >= 0.25))
    return ingest_corpus(sig, sr, grain_ms=40, hop_ms=10)
