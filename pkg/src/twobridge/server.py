"""Environment server: one protocol session per connection.

A session owns at most one environment, reconfigurable on every reset.
Requests are handled strictly in arrival order and every request gets
exactly one response with the matching id; malformed input produces an
error response (id -1 when the id itself could not be parsed) and leaves
the session usable.
"""

from __future__ import annotations

import argparse
import logging
import os
import socketserver
import sys
from dataclasses import dataclass, replace

import numpy as np

from .env import EnvConfig, PROFILES, TwoBridgeEnv
from .errors import (
    ConfigError,
    InvalidActionError,
    LifecycleError,
    ProtocolError,
    TwoBridgeError,
)
from .protocol import (
    action_from_wire,
    encode_message,
    parse_message,
    spec_payload,
    step_result_payload,
)
from .spawn import variant_catalog

SEED_MODES = ("fixed", "sequential", "random")

LOG_LEVEL_ENV = "TWOBRIDGE_LOG"

log = logging.getLogger("twobridge.server")


@dataclass(frozen=True)
class ServerDefaults:
    variant: str = "V2_Base"
    profile: str = "exp2"
    seed_mode: str = "sequential"
    base_seed: int = 0


class EnvSession:
    """Protocol state machine for one connection."""

    def __init__(self, defaults: ServerDefaults = ServerDefaults()):
        if defaults.seed_mode not in SEED_MODES:
            raise ConfigError(f"unknown seed mode {defaults.seed_mode!r}")
        self.defaults = defaults
        self.env: TwoBridgeEnv | None = None
        self._episode = 0

    def _next_seed(self, payload: dict) -> int:
        if "seed" in payload:
            seed = payload["seed"]
            if not isinstance(seed, int) or isinstance(seed, bool):
                raise ProtocolError("'seed' must be an integer")
            return seed
        mode = self.defaults.seed_mode
        if mode == "fixed":
            return self.defaults.base_seed
        if mode == "sequential":
            return self.defaults.base_seed + self._episode
        return int(np.random.SeedSequence().entropy & 0x7FFFFFFF)

    def _handle_reset(self, payload: dict):
        variant = payload.get("variant", self.defaults.variant)
        profile = payload.get("profile", self.defaults.profile)
        if not isinstance(variant, str) or not isinstance(profile, str):
            raise ProtocolError("'variant' and 'profile' must be strings")
        seed = self._next_seed(payload)
        kwargs = {}
        if "spatial" in payload:
            if not isinstance(payload["spatial"], bool):
                raise ProtocolError("'spatial' must be a boolean")
            kwargs["spatial"] = payload["spatial"]
        if "ticks_per_agent_step" in payload:
            k = payload["ticks_per_agent_step"]
            if not isinstance(k, int) or isinstance(k, bool):
                raise ProtocolError("'ticks_per_agent_step' must be an integer")
            kwargs["ticks_per_agent_step"] = k
        if "tick_limit" in payload:
            tl = payload["tick_limit"]
            if not isinstance(tl, int) or isinstance(tl, bool):
                raise ProtocolError("'tick_limit' must be an integer")
            kwargs["tick_limit"] = tl
        config = EnvConfig(variant=variant, profile=profile, seed=seed, **kwargs)
        if (
            self.env is None
            or replace(self.env.config, seed=seed) != config
        ):
            self.env = TwoBridgeEnv(config)
        else:
            self.env.config = config
        self._episode += 1
        return self.env.reset(seed=seed)

    def _handle_step(self, payload: dict):
        if self.env is None or self.env._world is None:
            raise LifecycleError("no episode; send reset first")
        action = action_from_wire(payload.get("action"), self.env.structured)
        return self.env.step(action)

    def handle_line(self, line: str) -> tuple[str, bool]:
        """Process one request line; returns (response line, keep_open)."""
        try:
            kind, msg_id, payload = parse_message(line)
        except ProtocolError as e:
            return encode_message("error", -1, {"code": "parse_error", "message": str(e)}), True
        try:
            if kind == "hello":
                return encode_message("spec", msg_id, spec_payload()), True
            if kind == "close":
                return encode_message("close", msg_id, {}), False
            if kind == "reset":
                result = self._handle_reset(payload)
                return encode_message("result", msg_id, step_result_payload(result)), True
            if kind == "step":
                result = self._handle_step(payload)
                return encode_message("result", msg_id, step_result_payload(result)), True
            return (
                encode_message(
                    "error", msg_id, {"code": "bad_request", "message": f"unknown kind {kind!r}"}
                ),
                True,
            )
        except TwoBridgeError as e:
            if isinstance(e, ProtocolError):
                code = "bad_request"
            elif isinstance(e, InvalidActionError):
                code = "invalid_action"
            elif isinstance(e, LifecycleError):
                code = "lifecycle"
            elif isinstance(e, ConfigError):
                code = "config"
            else:
                code = "internal"
            return (
                encode_message("error", msg_id, {"code": code, "message": str(e)}),
                True,
            )


def serve_stdio(defaults: ServerDefaults = ServerDefaults(), stdin=None, stdout=None) -> None:
    """Blocking line loop over stdio; returns at EOF or close."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    session = EnvSession(defaults)
    for line in stdin:
        if not line.strip():
            continue
        response, keep_open = session.handle_line(line)
        stdout.write(response + "\n")
        stdout.flush()
        if not keep_open:
            break


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        log.info("connection from %s", self.client_address)
        session = EnvSession(self.server.defaults)  # type: ignore[attr-defined]
        while True:
            line = self.rfile.readline()
            if not line:
                break
            line = line.decode("utf-8", errors="replace")
            if not line.strip():
                continue
            response, keep_open = session.handle_line(line)
            self.wfile.write(response.encode("utf-8") + b"\n")
            if not keep_open:
                break
        log.info("connection from %s closed", self.client_address)


class TcpServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, defaults: ServerDefaults):
        super().__init__(address, _Handler)
        self.defaults = defaults


def make_tcp_server(
    defaults: ServerDefaults = ServerDefaults(), host: str = "127.0.0.1", port: int = 0
) -> TcpServer:
    """Bound but not yet serving; port 0 picks a free port."""
    return TcpServer((host, port), defaults)


def serve_tcp(
    defaults: ServerDefaults = ServerDefaults(), host: str = "127.0.0.1", port: int = 5861
) -> None:
    """Blocking TCP server; one session per connection."""
    with make_tcp_server(defaults, host, port) as server:
        log.info("listening on %s:%d", *server.server_address)
        server.serve_forever()


def add_serve_args(parser: argparse.ArgumentParser) -> None:
    """Serve flags, shared between `python -m twobridge.server` and the
    `twobridge serve` subcommand."""
    parser.add_argument(
        "--transport", choices=("stdio", "tcp"), default="stdio",
        help="request/response transport (default: stdio)",
    )
    parser.add_argument("--host", default="127.0.0.1", help="TCP bind address")
    parser.add_argument("--port", type=int, default=5861, help="TCP port (0 picks a free one)")
    parser.add_argument(
        "--variant", choices=[v.id for v in variant_catalog()], default="V2_Base",
        help="default variant when reset does not name one",
    )
    parser.add_argument(
        "--profile", choices=list(PROFILES), default="exp2",
        help="default profile when reset does not name one",
    )
    parser.add_argument(
        "--seed-mode", choices=SEED_MODES, default="sequential",
        help="seed policy for resets without an explicit seed",
    )
    parser.add_argument("--seed", type=int, default=0, help="base seed for fixed/sequential modes")


def serve_from_args(args: argparse.Namespace) -> None:
    # verbosity comes from the environment, not a flag; stderr only so the
    # stdio transport stays clean
    level = os.environ.get(LOG_LEVEL_ENV, "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)
    defaults = ServerDefaults(
        variant=args.variant,
        profile=args.profile,
        seed_mode=args.seed_mode,
        base_seed=args.seed,
    )
    try:
        if args.transport == "tcp":
            serve_tcp(defaults, args.host, args.port)
        else:
            serve_stdio(defaults)
    except KeyboardInterrupt:
        log.info("interrupted")
    except BrokenPipeError:
        log.info("client closed the pipe")


def _build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m twobridge.server",
        description="Serve environments over newline-delimited JSON "
        "(stdio or TCP); see PROTOCOL.md for the wire format.",
    )
    add_serve_args(parser)
    return parser


def main(argv: list[str] | None = None) -> int:
    serve_from_args(_build_arg_parser().parse_args(argv))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
