"""Subchannel scheduling simulator for C-V2X sidelink CAM broadcast.

A wrap-around freeway of vehicles broadcasts periodic awareness messages over
a grid of sidelink subchannels (1 ms subframes crossed with frequency
sub-bands).  Three allocation policies compete: two centralized schedulers
built on bipartite matching (minimum received power, maximum reuse distance)
and the distributed sensing-based semi-persistent baseline.  The headline
output is packet reception ratio versus transmitter-receiver distance.
"""

from .config import ConfigError, ResourceId, SimConfig, flat_index, from_flat, load_config, validate
from .engine import SimResult, run
from .metrics import AggregateResult, PrrAccumulator, aggregate
from .schedulers import SCHEDULER_NAMES

__all__ = [
    "AggregateResult",
    "ConfigError",
    "PrrAccumulator",
    "ResourceId",
    "SCHEDULER_NAMES",
    "SimConfig",
    "SimResult",
    "aggregate",
    "flat_index",
    "from_flat",
    "load_config",
    "run",
    "validate",
]

__version__ = "0.1.0"
