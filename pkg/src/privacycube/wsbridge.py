"""WebSocket bridge for browser UIs.

Bridges the `privacycube/state` topic out to any number of clients and
accepts tap events back on the same connection. Messages travel in a
`{"topic": ..., "payload": ..., "seq": ...}` envelope; the latest state
snapshot is replayed to every new client.
"""
from __future__ import annotations

import asyncio
import json
import threading

from websockets.asyncio.server import serve

from .bus import Bus, Message, TOPIC_STATE, TOPIC_TAPS


def encode_envelope(msg: Message) -> str:
    return json.dumps(
        {"topic": msg.topic, "payload": json.loads(msg.payload), "seq": msg.seq},
        sort_keys=True, separators=(",", ":"))


def parse_tap_payload(text: str) -> dict:
    """Accept a bare tap object or a tap envelope; returns the tap payload."""
    obj = json.loads(text)
    if not isinstance(obj, dict):
        raise ValueError("tap message must be an object")
    if "topic" in obj:
        if obj["topic"] != TOPIC_TAPS:
            raise ValueError(f"client may only publish to {TOPIC_TAPS}")
        obj = obj.get("payload")
        if not isinstance(obj, dict):
            raise ValueError("tap envelope missing payload object")
    for key in ("room", "slot", "ts"):
        if key not in obj:
            raise ValueError(f"tap payload missing {key!r}")
    return {"room": str(obj["room"]), "slot": int(obj["slot"]), "ts": float(obj["ts"])}


class StateStreamServer:
    """Runs a websockets server on a background thread."""

    def __init__(self, bus: Bus, host: str = "127.0.0.1", port: int = 0):
        self.bus = bus
        self.host = host
        self.port = port
        self._loop: asyncio.AbstractEventLoop | None = None
        self._clients: set[asyncio.Queue] = set()
        self._thread: threading.Thread | None = None
        self._pump: threading.Thread | None = None
        self._started = threading.Event()
        self._stop: asyncio.Event | None = None
        self._tap_seq = 0
        self._tap_lock = threading.Lock()

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> tuple[str, int]:
        self._thread = threading.Thread(target=self._run, name="ws-bridge", daemon=True)
        self._thread.start()
        if not self._started.wait(timeout=10):
            raise RuntimeError("websocket bridge failed to start")
        return self.host, self.port

    def stop(self) -> None:
        if self._loop is not None and self._stop is not None:
            self._loop.call_soon_threadsafe(self._stop.set)
        if self._thread is not None:
            self._thread.join(timeout=10)

    def _run(self) -> None:
        asyncio.run(self._main())

    async def _main(self) -> None:
        self._loop = asyncio.get_running_loop()
        self._stop = asyncio.Event()
        async with serve(self._handler, self.host, self.port) as server:
            self.port = server.sockets[0].getsockname()[1]
            self._start_pump()
            self._started.set()
            await self._stop.wait()

    def _start_pump(self) -> None:
        sub = self.bus.subscribe(TOPIC_STATE)
        loop = self._loop

        def pump():
            while True:
                try:
                    msg = sub.get(timeout=0.2)
                except Exception:
                    if self._stop is not None and self._stop.is_set():
                        return
                    continue
                loop.call_soon_threadsafe(self._broadcast, msg)

        self._pump = threading.Thread(target=pump, name="ws-pump", daemon=True)
        self._pump.start()

    def _broadcast(self, msg: Message) -> None:
        text = encode_envelope(msg)
        for q in list(self._clients):
            q.put_nowait(text)

    # -- per-connection ------------------------------------------------------

    async def _handler(self, connection) -> None:
        queue: asyncio.Queue = asyncio.Queue()
        self._clients.add(queue)
        try:
            retained = self.bus.retained(TOPIC_STATE)
            if retained is not None:
                await connection.send(encode_envelope(retained))
            sender = asyncio.create_task(self._send_loop(connection, queue))
            try:
                async for raw in connection:
                    try:
                        payload = parse_tap_payload(raw)
                    except (ValueError, json.JSONDecodeError) as exc:
                        await connection.send(json.dumps({"error": str(exc)}))
                        continue
                    with self._tap_lock:
                        self._tap_seq += 1
                        seq = self._tap_seq
                    self.bus.publish(
                        TOPIC_TAPS,
                        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode(),
                        seq)
            finally:
                sender.cancel()
        finally:
            self._clients.discard(queue)

    @staticmethod
    async def _send_loop(connection, queue: asyncio.Queue) -> None:
        while True:
            text = await queue.get()
            await connection.send(text)
