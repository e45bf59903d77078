"""The client environment: standard reset/step API over the wire.

reset returns (observation, info); step returns the 5-tuple
(observation, reward, terminated, truncated, info).  Timeout maps to
truncation, every other outcome to termination; the terminal reward
already encodes that a timeout is a loss.  info always carries the
reward breakdown, the outcome label, and the action mask.

One client speaks to one server session over one connection.  Clients
are not thread-safe; vectorized training uses one client per worker.
"""

from __future__ import annotations

import socket
import subprocess
import sys
from typing import Any, IO

import numpy as np

from .errors import ActionRejected, ClientError, ConnectError, ServerError, WireError
from .spec import ClientEnvSpec
from .wire import decode_planes, encode_request, flat_action, parse_response

_TRUNCATING_OUTCOME = "timeout_loss"


class _StdioTransport:
    """Owns a server subprocess and talks over its pipes."""

    def __init__(self, command: list[str]):
        try:
            self.proc = subprocess.Popen(
                command, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, bufsize=1
            )
        except OSError as e:
            raise ConnectError(f"could not launch {command[0]!r}: {e}") from None
        self._r: IO[str] = self.proc.stdout
        self._w: IO[str] = self.proc.stdin

    def send_line(self, line: str) -> None:
        try:
            self._w.write(line + "\n")
            self._w.flush()
        except (BrokenPipeError, OSError) as e:
            raise ConnectError(f"server process went away: {e}") from None

    def recv_line(self) -> str:
        line = self._r.readline()
        if not line:
            code = self.proc.poll()
            raise ConnectError(f"server closed the pipe (exit code {code})")
        return line

    def close(self) -> None:
        for stream in (self._w, self._r):
            try:
                stream.close()
            except OSError:
                pass
        try:
            self.proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            self.proc.wait()


class _TcpTransport:
    def __init__(self, host: str, port: int, timeout: float):
        try:
            self.sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as e:
            raise ConnectError(f"could not connect to {host}:{port}: {e}") from None
        self.sock.settimeout(timeout)
        self._f = self.sock.makefile("rw", encoding="utf-8", newline="\n")

    def send_line(self, line: str) -> None:
        try:
            self._f.write(line + "\n")
            self._f.flush()
        except OSError as e:
            raise ConnectError(f"connection lost: {e}") from None

    def recv_line(self) -> str:
        try:
            line = self._f.readline()
        except OSError as e:
            raise ConnectError(f"connection lost: {e}") from None
        if not line:
            raise ConnectError("server closed the connection")
        return line

    def close(self) -> None:
        try:
            self._f.close()
        finally:
            self.sock.close()


class TwoBridgeClient:
    """Environment client bound to one server session."""

    def __init__(self, transport, variant: str | None = None, profile: str | None = None):
        self._transport = transport
        self._next_id = 0
        self._closed = False
        payload = self._request("hello")
        try:
            self.spec = ClientEnvSpec(payload)
        except WireError:
            self._shutdown()
            raise ConnectError("handshake failed: server spec was malformed") from None
        self.variant = variant
        self.profile = profile

    # -- construction ------------------------------------------------------

    @classmethod
    def launch(
        cls,
        variant: str = "V2_Base",
        profile: str = "exp2",
        *,
        command: list[str] | None = None,
        seed_mode: str | None = None,
        base_seed: int | None = None,
    ) -> "TwoBridgeClient":
        """Start a server subprocess over stdio and handshake with it.

        The default command runs the server module of the installed
        `twobridge` package with this interpreter; pass `command` to use
        an explicit server binary.
        """
        if command is None:
            command = [sys.executable, "-m", "twobridge.server"]
            if seed_mode is not None:
                command += ["--seed-mode", seed_mode]
            if base_seed is not None:
                command += ["--seed", str(base_seed)]
        return cls(_StdioTransport(command), variant=variant, profile=profile)

    @classmethod
    def connect(
        cls,
        host: str = "127.0.0.1",
        port: int = 5861,
        *,
        variant: str = "V2_Base",
        profile: str = "exp2",
        timeout: float = 30.0,
    ) -> "TwoBridgeClient":
        """Connect to a running TCP server and handshake with it."""
        return cls(_TcpTransport(host, port, timeout), variant=variant, profile=profile)

    # -- environment API ---------------------------------------------------

    def reset(
        self, *, seed: int | None = None, options: dict | None = None
    ) -> tuple[dict, dict]:
        """Start an episode; returns (observation, info).

        `options` may override variant, profile, spatial,
        ticks_per_agent_step, or tick_limit for this and later episodes.
        """
        payload: dict[str, Any] = {}
        if self.variant is not None:
            payload["variant"] = self.variant
        if self.profile is not None:
            payload["profile"] = self.profile
        if options:
            payload.update(options)
        if seed is not None:
            payload["seed"] = seed
        result = self._request("reset", payload)
        self.variant = payload.get("variant", self.variant)
        self.profile = payload.get("profile", self.profile)
        return self._observation(result), self._info(result)

    def step(self, action) -> tuple[dict, float, bool, bool, dict]:
        """Advance one agent step; returns (obs, reward, terminated, truncated, info).

        `action` is the wire form: a dict from `structured_action`, or a
        sequence of per-unit codes for flat profiles.  A masked/illegal
        action raises ActionRejected with the server's diagnostic and
        leaves the episode unchanged.
        """
        if not isinstance(action, dict):
            action = flat_action(action)
        result = self._request("step", {"action": action})
        outcome = result["outcome"]
        terminated = result["done"] and outcome != _TRUNCATING_OUTCOME
        truncated = result["done"] and outcome == _TRUNCATING_OUTCOME
        reward = float(result["reward"]["total"])
        return self._observation(result), reward, terminated, truncated, self._info(result)

    def close(self) -> None:
        if self._closed:
            return
        try:
            self._request("close")
        except ClientError:
            pass  # best effort; the transport is going away regardless
        self._shutdown()

    def __enter__(self) -> "TwoBridgeClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- internals ---------------------------------------------------------

    def _shutdown(self) -> None:
        self._closed = True
        self._transport.close()

    def _request(self, kind: str, payload: dict | None = None) -> dict:
        if self._closed:
            raise ClientError("client is closed")
        self._next_id += 1
        msg_id = self._next_id
        self._transport.send_line(encode_request(kind, msg_id, payload))
        rkind, rid, rpayload = parse_response(self._transport.recv_line())
        if rid != msg_id:
            raise WireError(f"response id {rid} does not match request id {msg_id}")
        if rkind == "error":
            code = rpayload.get("code", "unknown")
            message = rpayload.get("message", "")
            if code == "invalid_action":
                raise ActionRejected(code, message)
            raise ServerError(code, message)
        return rpayload

    @staticmethod
    def _observation(result: dict) -> dict:
        obs_payload = result["observation"]
        obs = {"vector": np.asarray(obs_payload["vector"], dtype=np.float64)}
        if "screen" in obs_payload:
            obs["screen"] = decode_planes(obs_payload["screen"])
            obs["minimap"] = decode_planes(obs_payload["minimap"])
        return obs

    @staticmethod
    def _info(result: dict) -> dict:
        info = dict(result["info"])
        info["reward_breakdown"] = dict(result["reward"])
        info["outcome"] = result["outcome"]
        info["mask"] = result["mask"]
        return info
