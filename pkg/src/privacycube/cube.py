"""Five-face cube state: the deterministic LED/icon model per room.

Faces are T (device resources), D (data types), A (access), U (usage) and
L (storage location map + retention time bar). A device contributes to its
rooms' faces while it has recent traffic or is tap-selected; union
semantics keep a shared icon lit as long as any contributor implies it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .continents import CONTINENTS
from .notify import Notification
from .policy import (
    AccessParty,
    DataTypeTag,
    DeviceProfile,
    PolicyCorpus,
    RetentionPeriod,
    RiskAnnotation,
    RiskColor,
    ROOM_CAPACITY,
    RoomId,
    UsagePurpose,
    classify_risk,
)

DEFAULT_LED_TIMEOUT = 30.0

FACE_LABELS = ("T", "D", "A", "U", "L")


class UnknownDevice(KeyError):
    def __init__(self, device_id: str):
        super().__init__(device_id)
        self.device_id = device_id


@dataclass(frozen=True)
class TapEvent:
    room: RoomId
    slot: int           # 1..8
    timestamp: float


@dataclass
class _Contribution:
    data_types: dict[DataTypeTag, RiskAnnotation]
    access: set[AccessParty]
    usage: set[UsagePurpose]
    retention: RetentionPeriod
    continents: set[str] = field(default_factory=set)

    @staticmethod
    def from_profile(profile: DeviceProfile) -> "_Contribution":
        return _Contribution(
            data_types=dict(profile.data_types),
            access=set(profile.access),
            usage=set(profile.usage),
            retention=profile.retention,
        )

    def merge_notification(self, n: Notification) -> None:
        self.data_types.update(n.data_types)
        self.access.update(n.data_access)
        self.usage.update(n.data_usage)
        self.retention = n.retention
        if n.storage_location in CONTINENTS:
            self.continents.add(n.storage_location)


class CubeState:
    """Single-writer state machine; snapshots are immutable values."""

    def __init__(self, corpus: PolicyCorpus, led_timeout: float = DEFAULT_LED_TIMEOUT,
                 initial_room: RoomId = RoomId.LIVING_ROOM):
        self.corpus = corpus
        self.led_timeout = led_timeout
        self.selected_room = initial_room
        self.selections: set[str] = set()
        self.last_activity: dict[str, float] = {}
        self._traffic_live: set[str] = set()
        self._contrib: dict[str, _Contribution] = {}

    # -- event application ------------------------------------------------

    def apply_notification(self, n: Notification, now: float) -> None:
        if n.device_id not in self.corpus.profiles:
            raise UnknownDevice(n.device_id)
        contrib = self._contrib.get(n.device_id)
        if contrib is None:
            contrib = _Contribution.from_profile(self.corpus.profiles[n.device_id])
            self._contrib[n.device_id] = contrib
        contrib.merge_notification(n)
        self._traffic_live.add(n.device_id)
        self.last_activity[n.device_id] = now

    def apply_tap(self, tap: TapEvent) -> None:
        if not 1 <= tap.slot <= ROOM_CAPACITY:
            raise ValueError(f"slot {tap.slot} out of range 1..{ROOM_CAPACITY}")
        page = self.corpus.room_pages.get(tap.room, ())
        if tap.slot > len(page):
            return                       # empty slot: no-op
        device_id = page[tap.slot - 1]
        if device_id in self.selections:
            self.selections.discard(device_id)
            # untapped with stale activity: expire right away instead of
            # waiting for the next tick
            if device_id in self._traffic_live:
                last = self.last_activity.get(device_id)
                if last is None or tap.timestamp - last > self.led_timeout:
                    self._expire(device_id)
            else:
                self._contrib.pop(device_id, None)
        else:
            self.selections.add(device_id)
            if device_id not in self._contrib:
                self._contrib[device_id] = _Contribution.from_profile(
                    self.corpus.profiles[device_id])

    def select_room(self, room: RoomId) -> None:
        self.selected_room = RoomId(room)

    def tick(self, now: float) -> None:
        for device_id in sorted(self._traffic_live):
            if device_id in self.selections:
                continue
            if now - self.last_activity[device_id] > self.led_timeout:
                self._expire(device_id)

    def _expire(self, device_id: str) -> None:
        self._traffic_live.discard(device_id)
        if device_id not in self.selections:
            self._contrib.pop(device_id, None)

    # -- derived face model -------------------------------------------------

    def is_contributing(self, device_id: str) -> bool:
        return device_id in self._traffic_live or device_id in self.selections

    def _room_contributors(self, room: RoomId) -> list[tuple[int, str, _Contribution]]:
        page = self.corpus.room_pages.get(room, ())
        out = []
        for ordinal, device_id in enumerate(page, start=1):
            if self.is_contributing(device_id):
                out.append((ordinal, device_id, self._contrib[device_id]))
        return out

    def page_state(self, room: RoomId) -> dict:
        page = self.corpus.room_pages.get(room, ())
        contributors = self._room_contributors(room)
        by_ordinal = {ordinal: contrib for ordinal, _dev, contrib in contributors}

        slots = []
        for i in range(1, ROOM_CAPACITY + 1):
            if i > len(page):
                slots.append({"Slot": i, "State": "Empty"})
                continue
            profile = self.corpus.profiles[page[i - 1]]
            slots.append({
                "Slot": i,
                "State": "Lit" if self.is_contributing(profile.device_id) else "Idle",
                "DeviceId": profile.device_id,
                "DeviceName": profile.display_name,
                "Icon": profile.device_icon,
                "AccentColor": profile.accent_color,
            })

        type_face = {}
        for tag in DataTypeTag:
            cells = []
            for i in range(1, ROOM_CAPACITY + 1):
                contrib = by_ordinal.get(i)
                if contrib is not None and tag in contrib.data_types:
                    cells.append(classify_risk(contrib.data_types[tag]).value)
                else:
                    cells.append(RiskColor.OFF.value)
            type_face[tag.value] = cells

        access_face = {p.value: any(p in c.access for _, _, c in contributors)
                       for p in AccessParty}
        usage_face = {u.value: any(u in c.usage for _, _, c in contributors)
                      for u in UsagePurpose}
        map_regions = {cont: any(cont in c.continents for _, _, c in contributors)
                       for cont in CONTINENTS}
        time_bar = {r.value: any(c.retention == r for _, _, c in contributors)
                    for r in RetentionPeriod}

        return {
            "T": slots,
            "D": type_face,
            "A": access_face,
            "U": usage_face,
            "L": {"Map": map_regions, "TimeBar": time_bar},
        }

    def snapshot_obj(self) -> dict:
        rooms = []
        for room in RoomId:
            page = self.corpus.room_pages.get(room, ())
            rooms.append({
                "Room": room.value,
                "ActiveDevices": sum(1 for d in page if self.is_contributing(d)),
                "Selected": room is self.selected_room,
            })
        return {
            "SelectedRoom": self.selected_room.value,
            "Rooms": rooms,
            "Faces": self.page_state(self.selected_room),
        }

    def snapshot(self) -> bytes:
        """Canonical face-model JSON; equal states yield identical bytes."""
        return json.dumps(self.snapshot_obj(), sort_keys=True,
                          separators=(",", ":")).encode()
