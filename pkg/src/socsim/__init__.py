"""socsim: deterministic self-organized-criticality simulators (2D sandpile,
1D slope pile, spring-block quake lattice) with avalanche statistics,
event-driven granular-synthesis sonification, and a replayable interactive
session protocol.
"""

from .errors import (ConfigError, DivergenceError, DomainError,
                     EstimationError, IngestError, ProtocolError, SocsimError,
                     WavFormatError)
from .events import CascadeEvent
from .rng import Rng
from .sandpile import (OsloPileState, SandpileState, add_grain,
                       add_grain_oslo, drive_oslo, drive_sandpile, new_oslo,
                       new_sandpile, relax, snapshot_oslo, snapshot_sandpile)
from .springblock import (SpringBlockState, drive_extremal, load_step,
                          new_springblock, set_plate_rate,
                          snapshot_springblock)
from .stats import (EventEnsemble, PowerLawFit, criticality_report,
                    fit_power_law, log_binned_histogram)

__version__ = "0.1.0"

__all__ = [
    "CascadeEvent", "ConfigError", "DivergenceError", "DomainError",
    "EstimationError", "EventEnsemble", "IngestError", "OsloPileState",
    "PowerLawFit", "ProtocolError", "Rng", "SandpileState", "SocsimError",
    "SpringBlockState", "WavFormatError", "add_grain", "add_grain_oslo",
    "criticality_report", "drive_extremal", "drive_oslo", "drive_sandpile",
    "fit_power_law", "load_step", "log_binned_histogram", "new_oslo",
    "new_sandpile", "new_springblock", "relax", "set_plate_rate",
    "snapshot_oslo", "snapshot_sandpile", "snapshot_springblock",
    "__version__",
]
