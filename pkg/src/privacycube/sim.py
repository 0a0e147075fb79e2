"""Deterministic device-activity simulator.

Reproduces the field-study mode: each device fires at a regular interval
(plus seeded jitter), optionally gated by a room rotation that moves the
cube through the home. Generation is a pure function of the schedule, so
replays are bit-reproducible.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .flows import Direction, FlowRecord, Protocol
from .policy import PolicyCorpus, RoomId

SIM_LOCAL_PORT_BASE = 49152
SIM_REMOTE_PORT = 443
SIM_BYTE_COUNT = 600


class ScheduleError(ValueError):
    pass


class UnknownScheduleDevice(ScheduleError):
    def __init__(self, device_id: str):
        super().__init__(f"schedule references unknown device {device_id!r}")
        self.device_id = device_id


@dataclass(frozen=True)
class SimEntry:
    device_id: str
    interval_seconds: float
    jitter_seconds: float
    remote_ip: str


@dataclass(frozen=True)
class SimSchedule:
    seed: int
    entries: tuple[SimEntry, ...]
    rotation: tuple[tuple[RoomId, float], ...] | None   # (room, duration in days)
    time_scale: float                                   # seconds per day
    duration_seconds: float | None = None


@dataclass(frozen=True)
class SimEvent:
    timestamp: float
    device_id: str
    flow: FlowRecord


def load_schedule(document: str, corpus: PolicyCorpus) -> SimSchedule:
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ScheduleError(f"not valid JSON: {exc}")
    if not isinstance(obj, dict):
        raise ScheduleError("top level must be an object")
    try:
        seed = int(obj["seed"])
        time_scale = float(obj.get("time_scale", 86400.0))
        entries_raw = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ScheduleError(f"bad schedule fields: {exc}")
    if time_scale <= 0:
        raise ScheduleError("time_scale must be positive")

    rotation = None
    if obj.get("rotation") is not None:
        rotation = []
        for i, pair in enumerate(obj["rotation"]):
            try:
                room, days = pair
                room = RoomId(room)
                days = float(days)
            except (ValueError, TypeError):
                raise ScheduleError(f"rotation[{i}]: expected [room, days]")
            if days <= 0:
                raise ScheduleError(f"rotation[{i}]: duration must be positive")
            rotation.append((room, days))
        rotation = tuple(rotation)

    if not isinstance(entries_raw, list) or not entries_raw:
        raise ScheduleError("entries must be a non-empty array")
    entries = []
    for i, raw in enumerate(entries_raw):
        try:
            entry = SimEntry(
                device_id=raw["device_id"],
                interval_seconds=float(raw["interval_seconds"]),
                jitter_seconds=float(raw.get("jitter_seconds", 0.0)),
                remote_ip=str(raw["remote_ip"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScheduleError(f"entries[{i}]: {exc}")
        if entry.interval_seconds <= 0:
            raise ScheduleError(f"entries[{i}]: interval must be positive")
        if entry.jitter_seconds < 0:
            raise ScheduleError(f"entries[{i}]: jitter must be non-negative")
        if entry.device_id not in corpus.profiles:
            raise UnknownScheduleDevice(entry.device_id)
        entries.append(entry)

    duration = obj.get("duration_seconds")
    return SimSchedule(seed=seed, entries=tuple(entries), rotation=rotation,
                       time_scale=time_scale,
                       duration_seconds=float(duration) if duration is not None else None)


def rotation_windows(schedule: SimSchedule) -> list[tuple[RoomId, float, float]]:
    """(room, start, end) windows in simulation seconds."""
    if schedule.rotation is None:
        return []
    windows = []
    t = 0.0
    for room, days in schedule.rotation:
        end = t + days * schedule.time_scale
        windows.append((room, t, end))
        t = end
    return windows


def rotation_end(schedule: SimSchedule) -> float | None:
    windows = rotation_windows(schedule)
    return windows[-1][2] if windows else None


def room_at(schedule: SimSchedule, t: float) -> RoomId | None:
    for room, start, end in rotation_windows(schedule):
        if start <= t < end:
            return room
    return None


def _jitter(seed: int, device_id: str, k: int, jitter_seconds: float) -> float:
    if jitter_seconds <= 0:
        return 0.0
    # seeding with a string hashes via sha512: stable across runs/platforms
    rng = random.Random(f"{seed}:{device_id}:{k}")
    return rng.uniform(0.0, jitter_seconds)


def _local_endpoint(corpus: PolicyCorpus, device_id: str, index: int) -> str:
    profile = corpus.profiles[device_id]
    if profile.ip_bindings:
        return min(profile.ip_bindings)
    # devices bound only by MAC get a stable placeholder in the local range
    return f"10.250.0.{(index % 250) + 1}"


def generate(schedule: SimSchedule, corpus: PolicyCorpus, t_end: float) -> list[SimEvent]:
    """Pure event generation: same (schedule, corpus, t_end) -> same list."""
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    events = []
    for index, entry in enumerate(sorted(schedule.entries, key=lambda e: e.device_id)):
        profile = corpus.profiles[entry.device_id]
        local_ip = _local_endpoint(corpus, entry.device_id, index)
        k = 1
        while k * entry.interval_seconds <= t_end:
            t = k * entry.interval_seconds + _jitter(
                schedule.seed, entry.device_id, k, entry.jitter_seconds)
            k += 1
            if t > t_end:
                continue
            if schedule.rotation is not None:
                room = room_at(schedule, t)
                if room is None or room not in profile.rooms:
                    continue
            flow = FlowRecord(
                timestamp=t,
                local_ip=local_ip,
                remote_ip=entry.remote_ip,
                local_port=SIM_LOCAL_PORT_BASE + index,
                remote_port=SIM_REMOTE_PORT,
                protocol=Protocol.TCP,
                direction=Direction.OUTBOUND,
                byte_count=SIM_BYTE_COUNT,
                local_mac=min(profile.mac_bindings) if profile.mac_bindings else None,
            )
            events.append(SimEvent(t, entry.device_id, flow))
    events.sort(key=lambda e: (e.timestamp, e.device_id))
    return events
