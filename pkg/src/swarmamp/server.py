"""WebSocket pump around the session core, plus optional static UI hosting.

One simulation loop per process; inbound commands from any number of clients
queue into the core in arrival order, outbound snapshots fan out to all
connected clients every tick period. With no clients connected for a grace
period the session auto-pauses.
"""

from __future__ import annotations

import asyncio
import functools
import http.server
import logging
import os
import threading
from pathlib import Path

import websockets

from .bridge import BridgeProtocolError, SessionCore, decode_command, encode_error, encode_snapshot
from .harness import ExperimentConfig

log = logging.getLogger(__name__)

DEFAULT_PORT = 8765
PORT_ENV_VAR = "SWARM_BRIDGE_PORT"


def resolve_port(port: int | None) -> int:
    if port is not None:
        return port
    env = os.environ.get(PORT_ENV_VAR)
    return int(env) if env else DEFAULT_PORT


class BridgeServer:
    def __init__(
        self,
        config: ExperimentConfig,
        seed: int | None = None,
        tick_rate: float = 20.0,
        grace_ticks: int = 60,
    ):
        self.core = SessionCore(config, seed=seed)
        self.tick_rate = tick_rate
        self.grace_ticks = grace_ticks
        self.clients: set = set()
        self._ticks_without_clients = 0
        self._auto_paused = False

    async def handle_client(self, websocket) -> None:
        self.clients.add(websocket)
        if self._auto_paused:
            self.core.paused = False
            self._auto_paused = False
        try:
            async for text in websocket:
                try:
                    message = decode_command(text)
                except BridgeProtocolError as exc:
                    await websocket.send(encode_error(self.core.tick_count, str(exc)))
                    continue
                reply = self.core.submit(message)
                await websocket.send(reply)
        except websockets.ConnectionClosed:
            pass
        finally:
            self.clients.discard(websocket)

    async def tick_loop(self) -> None:
        period = 1.0 / self.tick_rate
        while True:
            started = asyncio.get_event_loop().time()
            snapshot = self.core.tick()
            frame = encode_snapshot(snapshot)
            if self.clients:
                self._ticks_without_clients = 0
                websockets.broadcast(self.clients, frame)
            else:
                self._ticks_without_clients += 1
                if self._ticks_without_clients == self.grace_ticks and not self.core.paused:
                    log.info("no clients for %d ticks; pausing session", self.grace_ticks)
                    self.core.paused = True
                    self._auto_paused = True
            elapsed = asyncio.get_event_loop().time() - started
            await asyncio.sleep(max(0.0, period - elapsed))

    async def run(self, port: int) -> None:
        async with websockets.serve(self.handle_client, "127.0.0.1", port):
            log.info("bridge listening on ws://127.0.0.1:%d", port)
            await self.tick_loop()


def _serve_static(ui_dir: str, port: int) -> threading.Thread:
    handler = functools.partial(http.server.SimpleHTTPRequestHandler, directory=ui_dir)
    httpd = http.server.ThreadingHTTPServer(("127.0.0.1", port), handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    log.info("ui served from %s at http://127.0.0.1:%d", ui_dir, port)
    return thread


def serve_forever(
    config: ExperimentConfig,
    port: int | None = None,
    tick_rate: float = 20.0,
    seed: int | None = None,
    ui_dir: str | None = None,
    ui_port: int | None = None,
) -> None:
    ws_port = resolve_port(port)
    if ui_dir is not None:
        if not Path(ui_dir).is_dir():
            raise FileNotFoundError(f"ui dir {ui_dir!r} does not exist")
        _serve_static(ui_dir, ui_port if ui_port is not None else ws_port + 1)
    server = BridgeServer(config, seed=seed, tick_rate=tick_rate)
    print(f"bridge: ws://127.0.0.1:{ws_port}  tick_rate={tick_rate}/s  seed={server.core.seed}")
    try:
        asyncio.run(server.run(ws_port))
    except KeyboardInterrupt:
        pass
