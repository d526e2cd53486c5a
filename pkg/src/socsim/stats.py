"""Avalanche/quake ensemble statistics: log-binned histograms, discrete
power-law MLE (Clauset-style continuity-corrected estimator), and a
machine-readable criticality report.

All operations are pure functions of immutable inputs.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EstimationError

MIN_TAIL = 50
MIN_REPORT_EVENTS = 10_000


@dataclass
class EventEnsemble:
    """Sizes/durations (and moments, for quakes) of the nonzero events of one
    run, plus enough provenance to reproduce it."""

    sizes: np.ndarray
    durations: np.ndarray
    moments: np.ndarray | None = None
    source: dict = field(default_factory=dict)

    @classmethod
    def from_events(cls, events, source: dict | None = None) -> "EventEnsemble":
        """Collect all size >= 1 events; empty events carry no statistics."""
        kept = [e for e in events if e.size >= 1]
        sizes = np.array([e.size for e in kept], dtype=np.int64)
        durations = np.array([e.duration for e in kept], dtype=np.int64)
        moments = None
        if kept and kept[0].moment is not None:
            moments = np.array([e.moment for e in kept], dtype=np.float64)
        return cls(sizes=sizes, durations=durations, moments=moments,
                   source=dict(source or {}))

    def __len__(self) -> int:
        return int(self.sizes.size)

    def validate(self) -> None:
        assert (self.sizes >= 1).all() and (self.durations >= 1).all()
        assert self.sizes.shape == self.durations.shape
        if self.moments is not None:
            assert self.moments.shape == self.sizes.shape


@dataclass
class PowerLawFit:
    tau_hat: float
    s_min: int
    n_tail: int
    stderr: float


def log_binned_histogram(sizes, bins_per_decade: int = 4) -> list:
    """Geometric-bin density histogram, anchored at the smallest sample.

    Returns (bin_center, density) pairs with empty bins omitted; density is
    normalized by bin width and total sample count, so sum(density * width)
    over all bins equals 1.
    """
    sizes = np.asarray(sizes, dtype=np.float64)
    if sizes.size == 0:
        raise DomainError("histogram needs at least one sample")
    if bins_per_decade < 1:
        raise DomainError(f"bins_per_decade must be >= 1, got {bins_per_decade}")
    if (sizes < 1).any():
        raise DomainError("sizes must be >= 1")
    lo = float(sizes.min())
    hi = float(sizes.max())
    n_bins = int(math.floor(math.log10(hi / lo) * bins_per_decade)) + 1
    edges = lo * 10.0 ** (np.arange(n_bins + 1) / bins_per_decade)
    while edges[-1] <= hi:  # float safety: the max must land strictly inside
        n_bins += 1
        edges = lo * 10.0 ** (np.arange(n_bins + 1) / bins_per_decade)
    counts, _ = np.histogram(sizes, bins=edges)
    widths = np.diff(edges)
    centers = np.sqrt(edges[:-1] * edges[1:])
    density = counts / (widths * sizes.size)
    return [(float(c), float(d)) for c, d, n in zip(centers, density, counts) if n > 0]


def fit_power_law(sizes, s_min: int) -> PowerLawFit:
    """Discrete MLE for P(s) ~ s^-tau on the tail s >= s_min:
    tau_hat = 1 + n / sum(ln(s_i / (s_min - 0.5))).
    """
    sizes = np.asarray(sizes)
    if s_min < 1:
        raise DomainError(f"s_min must be >= 1, got {s_min}")
    tail = sizes[sizes >= s_min].astype(np.float64)
    n = int(tail.size)
    if n < MIN_TAIL:
        raise EstimationError(f"need >= {MIN_TAIL} samples at or above s_min={s_min}, got {n}")
    if (tail == tail[0]).all():
        raise EstimationError(f"degenerate tail: all {n} samples equal {int(tail[0])}")
    denom = float(np.log(tail / (s_min - 0.5)).sum())
    tau_hat = 1.0 + n / denom
    stderr = (tau_hat - 1.0) / math.sqrt(n)
    return PowerLawFit(tau_hat=tau_hat, s_min=int(s_min), n_tail=n, stderr=stderr)


def decades_spanned(sizes) -> float:
    sizes = np.asarray(sizes, dtype=np.float64)
    return float(math.log10(sizes.max() / sizes.min()))


def histogram_is_decreasing(hist) -> bool:
    dens = [d for _, d in hist]
    return all(b < a for a, b in zip(dens, dens[1:]))


def criticality_report(ensemble: EventEnsemble, s_min: int = 1,
                       bins_per_decade: int = 4) -> dict:
    """Structured criticality diagnostics for a large ensemble."""
    n = len(ensemble)
    if n < MIN_REPORT_EVENTS:
        raise EstimationError(f"criticality report needs >= {MIN_REPORT_EVENTS} events, got {n}")
    hist = log_binned_histogram(ensemble.sizes, bins_per_decade)
    fit = fit_power_law(ensemble.sizes, s_min)
    return {
        "source": ensemble.source,
        "n_events": n,
        "decades": decades_spanned(ensemble.sizes),
        "size_min": int(ensemble.sizes.min()),
        "size_max": int(ensemble.sizes.max()),
        "s_min": fit.s_min,
        "tau_hat": fit.tau_hat,
        "stderr": fit.stderr,
        "n_tail": fit.n_tail,
        "bins_per_decade": bins_per_decade,
        "histogram": [[c, d] for c, d in hist],
        "histogram_decreasing": histogram_is_decreasing(hist),
        "mean_duration": float(ensemble.durations.mean()),
    }


def histogram_csv(hist) -> str:
    lines = ["bin_center,density"]
    lines += [f"{c!r},{d!r}" for c, d in hist]
    return "\n".join(lines) + "\n"
