"""External-learner adapter for the alp-bridge/1 stdio protocol."""

from alp_bridge.protocol import PROTOCOL_VERSION
from alp_bridge.registry import ESTIMATORS, EstimatorEntry, subsample_rows
from alp_bridge.server import serve

__version__ = "0.1.0"

__all__ = [
    "PROTOCOL_VERSION",
    "ESTIMATORS",
    "EstimatorEntry",
    "subsample_rows",
    "serve",
]
