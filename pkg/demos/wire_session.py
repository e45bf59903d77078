"""Drive the environment over its wire protocol, no library imports client-side.

Starts the TCP server in-process, then talks to it through a plain socket
using newline-delimited JSON only -- exactly what a trainer in another
language would do.  Prints the handshake, steps a few random legal
actions, and decodes one spatial plane payload by hand.

    python demos/wire_session.py
"""

from __future__ import annotations

import base64
import json
import socket
import threading

import numpy as np

from twobridge.server import ServerDefaults, make_tcp_server


def rpc(f, kind: str, msg_id: int, payload: dict | None = None) -> dict:
    f.write(json.dumps({"kind": kind, "id": msg_id, "payload": payload or {}}) + "\n")
    f.flush()
    reply = json.loads(f.readline())
    assert reply["id"] == msg_id, (reply["id"], msg_id)
    return reply


def main() -> None:
    server = make_tcp_server(ServerDefaults(seed_mode="fixed", base_seed=1))
    host, port = server.server_address
    threading.Thread(target=server.serve_forever, daemon=True).start()

    sock = socket.create_connection((host, port))
    f = sock.makefile("rw", encoding="utf-8", newline="\n")

    spec = rpc(f, "hello", 1)["payload"]
    print(f"protocol {spec['protocol']}, suite {spec['suite']!r}, "
          f"{len(spec['variants'])} variants, {len(spec['profiles'])} profiles")
    v2 = next(v for v in spec["variants"] if v["id"] == "V2_Base")
    print(f"V2_Base: {v2['enemy_count']} enemies, vector length {v2['vector_length']}")

    result = rpc(f, "reset", 2, {"variant": "V2_Base", "profile": "exp2"})["payload"]
    print(f"reset: seed {result['info']['seed']}, spawn {result['info']['spawn']}")

    rng = np.random.default_rng(0)
    for i in range(3, 8):
        mask = result["mask"]["verb"]  # exp2 masks at the verb level
        verb = rng.choice([v for v, ok in zip(("noop", "move", "attack"), mask) if ok])
        action = {"verb": str(verb), "who": [True] * 5,
                  "direction": int(rng.integers(8)) if verb == "move" else None,
                  "enemy": int(rng.integers(v2["enemy_count"])) if verb == "attack" else None}
        result = rpc(f, "step", i, {"action": action})["payload"]
        print(f"step {result['info']['step']}: {verb:6s} reward {result['reward']['total']:+8.4f} "
              f"alive {result['info']['friendly_alive']}v{result['info']['enemy_alive']}")

    planes = result["observation"]["screen"]
    raw = np.frombuffer(base64.b64decode(planes["data"]), dtype=np.uint8)
    screen = raw.reshape(planes["shape"])
    print(f"screen payload: shape {planes['shape']}, "
          f"{np.count_nonzero(screen[0])} passable-terrain pixels in view")

    rpc(f, "close", 99)
    sock.close()
    server.shutdown()
    server.server_close()


if __name__ == "__main__":
    main()
