"""Cascade event records shared by the sandpile, Oslo, and spring-block models."""

import math
from dataclasses import dataclass, field


@dataclass
class CascadeEvent:
    """One fully relaxed cascade triggered by a single drive increment.

    `steps` holds one list per parallel relaxation sweep; each entry is a
    (site, released) pair where site is a coordinate tuple ((row, col) on
    grids, (col,) on the 1-D pile) and released is the amount shed by that
    toppling/slip. Bulk statistics runs may skip recording steps, in which
    case `steps` is empty while size/area/duration stay exact and
    `steps_recorded` is False.
    """

    event_id: int
    trigger_site: tuple | None
    size: int
    area: int
    duration: int
    boundary_loss: float
    magnitude: float
    steps: list = field(default_factory=list)
    steps_recorded: bool = True
    step_sizes: list = field(default_factory=list)
    moment: float | None = None

    def validate(self) -> None:
        """Assert the structural invariants; used by tests."""
        assert self.size >= 0 and self.area >= 0 and self.duration >= 0
        assert self.area <= self.size
        assert self.duration == len(self.step_sizes)
        assert self.size == sum(self.step_sizes)
        if self.steps_recorded:
            assert self.duration == len(self.steps)
            assert self.size == sum(len(s) for s in self.steps)
            assert (self.size == 0) == (not self.steps)
        if self.moment is not None and self.size >= 1:
            assert self.moment > 0


def pile_magnitude(size: int) -> float:
    """Shared event magnitude for grain piles: log10 of the toppling count."""
    return math.log10(max(size, 1))


def quake_magnitude(moment: float, moment_0: float) -> float:
    """Seismic-style magnitude, 2/3 * log10(moment / moment_0); 0 for empty events."""
    if moment <= 0.0:
        return 0.0
    return (2.0 / 3.0) * math.log10(moment / moment_0)
