"""Embedded pub/sub bus.

Default transport so the gateway runs with zero external services; an
MQTT-compatible broker can mirror the same topics (see mqtt module).
Only the three gateway topics are accepted.
"""
from __future__ import annotations

import queue
import threading
from dataclasses import dataclass

TOPIC_NOTIFICATIONS = "privacycube/notifications"
TOPIC_STATE = "privacycube/state"
TOPIC_TAPS = "privacycube/ui/taps"

TOPICS = frozenset({TOPIC_NOTIFICATIONS, TOPIC_STATE, TOPIC_TAPS})


@dataclass(frozen=True)
class Message:
    topic: str
    payload: bytes
    seq: int


class Subscription:
    def __init__(self):
        self._queue: queue.Queue[Message] = queue.Queue()

    def get(self, timeout: float | None = None) -> Message:
        return self._queue.get(timeout=timeout)

    def try_get(self) -> Message | None:
        try:
            return self._queue.get_nowait()
        except queue.Empty:
            return None

    def drain(self) -> list[Message]:
        out = []
        while True:
            msg = self.try_get()
            if msg is None:
                return out
            out.append(msg)


class Bus:
    """Thread-safe fan-out; messages are immutable values."""

    def __init__(self):
        self._lock = threading.Lock()
        self._subs: dict[str, list[Subscription]] = {t: [] for t in TOPICS}
        self._retained: dict[str, Message] = {}

    def subscribe(self, topic: str, *, replay_retained: bool = False) -> Subscription:
        self._check_topic(topic)
        sub = Subscription()
        with self._lock:
            self._subs[topic].append(sub)
            retained = self._retained.get(topic)
        if replay_retained and retained is not None:
            sub._queue.put(retained)
        return sub

    def publish(self, topic: str, payload: bytes, seq: int) -> None:
        self._check_topic(topic)
        msg = Message(topic, payload, seq)
        with self._lock:
            self._retained[topic] = msg
            subs = list(self._subs[topic])
        for sub in subs:
            sub._queue.put(msg)

    def retained(self, topic: str) -> Message | None:
        self._check_topic(topic)
        with self._lock:
            return self._retained.get(topic)

    @staticmethod
    def _check_topic(topic: str) -> None:
        if topic not in TOPICS:
            raise ValueError(f"unknown topic {topic!r}; allowed: {sorted(TOPICS)}")
