"""Exception hierarchy shared across the package."""


class TwoBridgeError(Exception):
    """Base class for all package errors."""


class ConfigError(TwoBridgeError, ValueError):
    """Unknown variant/profile or otherwise malformed configuration."""


class LifecycleError(TwoBridgeError, RuntimeError):
    """Operation applied to an episode that is not in a legal state for it."""


class ImpassableStartError(TwoBridgeError, ValueError):
    """Pathfinding asked to start from an impassable or out-of-bounds point."""


class InvalidActionError(TwoBridgeError, ValueError):
    """An action violated its declared action space or mask."""


class InvalidVerbError(InvalidActionError):
    """Verb outside the space or masked out."""


class InvalidSelectionError(InvalidActionError):
    """Selection names an illegal slot or selects no live unit."""


class InvalidTargetError(InvalidActionError):
    """Attack target outside the space or masked out."""


class ProtocolError(TwoBridgeError, ValueError):
    """Malformed wire message."""


class ReplayMismatchError(TwoBridgeError):
    """Replaying a recorded episode diverged from the recording."""
