"""Client bindings for the two-bridge environment server.

Speaks the line-delimited JSON protocol (PROTOCOL.md in the server
package) over a subprocess's stdio or a TCP socket, and exposes episodes
through the standard reset/step environment API.
"""

from .checker import ConformanceFailure, check_env
from .client import TwoBridgeClient
from .errors import ActionRejected, ClientError, ConnectError, ServerError, WireError
from .sampling import random_legal_action
from .spec import (
    ActionDesc,
    ClientEnvSpec,
    ObservationDesc,
    PlaneSpec,
    ProfileSpec,
    VariantSpec,
)
from .wire import flat_action, structured_action

__all__ = [
    "ActionDesc",
    "ActionRejected",
    "ClientEnvSpec",
    "ClientError",
    "ConformanceFailure",
    "ConnectError",
    "ObservationDesc",
    "PlaneSpec",
    "ProfileSpec",
    "ServerError",
    "TwoBridgeClient",
    "VariantSpec",
    "WireError",
    "check_env",
    "flat_action",
    "random_legal_action",
    "structured_action",
]

__version__ = "0.1.0"
