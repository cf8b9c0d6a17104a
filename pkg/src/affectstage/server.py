"""Live control endpoint for the rehearsal console.

JSON messages over a WebSocket at /ws.  Inbound messages are input events
(plus the snapshot/restore control pair); outbound messages are scene-graph
updates, mood snapshots, cue state, observer reports and digests, each
stamped with the tick that produced them.

The tick thread is the only writer of engine state.  Socket handlers parse
and enqueue; malformed input earns an error reply and never reaches the
engine, so a misbehaving client cannot alter digests or crash the service.
"""

from __future__ import annotations

import asyncio
import json
import logging
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from queue import Empty, Queue

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .canvas import scene_graph
from .engine import Engine, EngineError, InputEvent, event_from_json

log = logging.getLogger(__name__)

CONTROL_KINDS = ("restore", "hello")


class ProtocolError(ValueError):
    """Raised for messages that violate the wire protocol."""


def decode_client_message(text: str):
    """Parse one inbound frame into ("event", InputEvent) or ("restore", id).

    This is the single ingress gate: anything that raises ProtocolError is
    answered with an error message and dropped before it can touch the engine.
    """
    if not isinstance(text, str):
        raise ProtocolError("frames must be text")
    if len(text) > 1_000_000:
        raise ProtocolError("message too large")
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, RecursionError) as exc:
        raise ProtocolError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("message must be a JSON object")
    kind = obj.get("kind")
    if kind == "restore":
        payload = obj.get("payload", {})
        snapshot_id = payload.get("id") if isinstance(payload, dict) else None
        if not isinstance(snapshot_id, int) or isinstance(snapshot_id, bool):
            raise ProtocolError("restore payload needs an integer snapshot id")
        return ("restore", snapshot_id)
    try:
        return ("event", event_from_json(obj))
    except EngineError as exc:
        raise ProtocolError(str(exc)) from exc


@dataclass
class _Client:
    id: int
    loop: asyncio.AbstractEventLoop
    queue: asyncio.Queue
    hello_sent: bool = False


@dataclass
class EngineServer:
    """Owns the tick thread and fans engine outputs out to every client."""

    engine: Engine
    tick_rate: float | None = None
    _inbound: Queue = field(default_factory=Queue)
    _clients: dict = field(default_factory=dict)
    _clients_lock: threading.Lock = field(default_factory=threading.Lock)
    _stop: threading.Event = field(default_factory=threading.Event)
    _thread: threading.Thread | None = None
    _next_client: int = 0

    def start(self) -> None:
        self._stop.clear()
        self._thread = threading.Thread(target=self._tick_loop, name="engine-tick", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None

    # -- client bookkeeping (called from the event loop) ---------------------

    def register(self, loop: asyncio.AbstractEventLoop) -> _Client:
        with self._clients_lock:
            self._next_client += 1
            client = _Client(id=self._next_client, loop=loop, queue=asyncio.Queue())
            self._clients[client.id] = client
        self._inbound.put(("hello", client.id))
        return client

    def unregister(self, client: _Client) -> None:
        with self._clients_lock:
            self._clients.pop(client.id, None)

    def submit(self, item) -> None:
        self._inbound.put(item)

    # -- tick thread ----------------------------------------------------------

    def _send_to(self, client: _Client, message: dict) -> None:
        try:
            client.loop.call_soon_threadsafe(client.queue.put_nowait, json.dumps(message))
        except RuntimeError:
            pass  # client loop already gone

    def _broadcast(self, messages) -> None:
        with self._clients_lock:
            clients = list(self._clients.values())
        for message in messages:
            for client in clients:
                self._send_to(client, message)

    def _full_refresh(self) -> list[dict]:
        engine = self.engine
        tick = engine.tick_count
        return [
            {"tick": tick, "kind": "scene", "payload": scene_graph(engine.scene)},
            {"tick": tick, "kind": "moods", "payload": engine.moods_payload()},
            {"tick": tick, "kind": "cue", "payload": engine.cue_payload()},
            {"tick": tick, "kind": "state", "payload": engine.state_payload()},
            {"tick": tick, "kind": "observer", "payload": engine.observer_payload()},
        ]

    def _tick_loop(self) -> None:
        period = 1.0 / (self.tick_rate or self.engine.config.tick_rate)
        next_deadline = time.monotonic()
        while not self._stop.is_set():
            events: list[InputEvent] = []
            while True:
                try:
                    item = self._inbound.get_nowait()
                except Empty:
                    break
                kind = item[0]
                if kind == "event":
                    events.append(item[1])
                elif kind == "hello":
                    with self._clients_lock:
                        client = self._clients.get(item[1])
                    if client is not None:
                        self._send_to(
                            client,
                            {
                                "tick": self.engine.tick_count,
                                "kind": "hello",
                                "payload": self.engine.hello_payload(),
                            },
                        )
                elif kind == "restore":
                    snapshot_id, client_id = item[1], item[2]
                    # events queued ahead of the restore belong to the branch
                    # being abandoned; they must not leak into the new one
                    events.clear()
                    try:
                        self.engine.restore(snapshot_id)
                    except EngineError as exc:
                        with self._clients_lock:
                            client = self._clients.get(client_id)
                        if client is not None:
                            self._send_to(
                                client,
                                {
                                    "tick": self.engine.tick_count,
                                    "kind": "error",
                                    "payload": {"reason": str(exc)},
                                },
                            )
                        continue
                    self._broadcast(
                        [
                            {
                                "tick": self.engine.tick_count,
                                "kind": "restored",
                                "payload": {"id": snapshot_id},
                            }
                        ]
                        + self._full_refresh()
                    )
            outputs = self.engine.process_tick(events)
            if outputs:
                self._broadcast(outputs)
            next_deadline += period
            delay = next_deadline - time.monotonic()
            if delay > 0:
                self._stop.wait(delay)
            else:
                next_deadline = time.monotonic()


def create_app(engine: Engine, log_path: Path | None = None, static_dir: Path | None = None) -> FastAPI:
    """FastAPI app exposing /ws; optionally serves the console as static files."""
    from contextlib import asynccontextmanager

    server = EngineServer(engine=engine)

    @asynccontextmanager
    async def lifespan(_app):
        server.start()
        yield
        server.stop()
        if log_path is not None:
            engine.session_log.write(log_path)

    app = FastAPI(title="affectstage engine", lifespan=lifespan)
    app.state.server = server

    @app.websocket("/ws")
    async def websocket_endpoint(ws: WebSocket):
        await ws.accept()
        client = server.register(asyncio.get_running_loop())

        async def reader():
            while True:
                text = await ws.receive_text()
                try:
                    decoded = decode_client_message(text)
                except ProtocolError as exc:
                    await client.queue.put(
                        json.dumps(
                            {
                                "tick": engine.tick_count,
                                "kind": "error",
                                "payload": {"reason": str(exc)},
                            }
                        )
                    )
                    continue
                except Exception as exc:  # never let a weird frame kill the service
                    log.warning("unexpected decode failure: %s", exc)
                    await client.queue.put(
                        json.dumps(
                            {
                                "tick": engine.tick_count,
                                "kind": "error",
                                "payload": {"reason": "undecodable message"},
                            }
                        )
                    )
                    continue
                if decoded[0] == "restore":
                    server.submit(("restore", decoded[1], client.id))
                else:
                    server.submit(("event", decoded[1]))

        async def writer():
            while True:
                message = await client.queue.get()
                await ws.send_text(message)

        reader_task = asyncio.create_task(reader())
        writer_task = asyncio.create_task(writer())
        try:
            done, pending = await asyncio.wait(
                {reader_task, writer_task}, return_when=asyncio.FIRST_COMPLETED
            )
            for task in pending:
                task.cancel()
            for task in done:
                exc = task.exception()
                if exc is not None and not isinstance(exc, WebSocketDisconnect):
                    log.warning("websocket task ended: %s", exc)
        finally:
            server.unregister(client)

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")
    return app
