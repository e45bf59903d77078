"""Client-side exception hierarchy.

ServerError carries the server's error code and diagnostic verbatim;
ActionRejected is the code="invalid_action" case trainers want to catch
separately (the episode state is untouched and stepping may continue).
"""

from __future__ import annotations


class ClientError(Exception):
    """Base for everything this package raises."""


class ConnectError(ClientError):
    """Could not reach, launch, or handshake with a server."""


class WireError(ClientError):
    """Traffic that violates the wire format (unparseable line, wrong id)."""


class ServerError(ClientError):
    """The server answered with an error response."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class ActionRejected(ServerError):
    """A well-formed action the server's mask/space validation refused."""
