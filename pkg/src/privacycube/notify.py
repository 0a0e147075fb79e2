"""Canonical device-activity notifications and per-device rate limiting.

A notification copies the device's policy profile verbatim and adds the
storage location resolved from the flow's remote endpoint. Encoding is
canonical JSON: sorted keys, no insignificant whitespace, arrays in enum
declaration order, so equal values encode to identical bytes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .continents import CONTINENTS
from .flows import Direction, FlowRecord
from .geo import GeoResult
from .policy import (
    AccessParty,
    CollectionCadence,
    DataTypeTag,
    DeviceProfile,
    RetentionPeriod,
    RiskAnnotation,
    RoomId,
    UsagePurpose,
)

LOCATION_UNKNOWN = "Unknown"
LOCATION_PRIVATE = "Private"


class DecodeError(ValueError):
    pass


class MissingField(DecodeError):
    def __init__(self, path: str):
        super().__init__(path)
        self.path = path


class UnknownEnumValue(DecodeError):
    def __init__(self, path: str, value):
        super().__init__(f"{path}: {value!r}")
        self.path = path
        self.value = value


@dataclass(frozen=True)
class Notification:
    device_id: str
    device_type: str
    device_name: str
    placement_area: tuple[RoomId, ...]
    data_types: dict[DataTypeTag, RiskAnnotation]
    data_usage: tuple[UsagePurpose, ...]
    data_access: tuple[AccessParty, ...]
    retention: RetentionPeriod
    storage_location: str          # continent code, "Unknown" or "Private"
    timestamp: float
    direction: Direction
    storage_country: str | None = None
    cadence: CollectionCadence | None = None


def build_notification(profile: DeviceProfile, flow: FlowRecord,
                       geo: GeoResult) -> Notification:
    """All attribute fields come from the profile; storage comes from the
    flow's remote endpoint only."""
    if geo.kind == "country":
        location = geo.continent if geo.continent else LOCATION_UNKNOWN
        country = geo.country
    elif geo.kind == "private":
        location, country = LOCATION_PRIVATE, None
    else:
        location, country = LOCATION_UNKNOWN, None
    return Notification(
        device_id=profile.device_id,
        device_type=profile.device_icon,
        device_name=profile.display_name,
        placement_area=tuple(r for r in RoomId if r in profile.rooms),
        data_types=dict(profile.data_types),
        data_usage=tuple(u for u in UsagePurpose if u in profile.usage),
        data_access=tuple(a for a in AccessParty if a in profile.access),
        retention=profile.retention,
        cadence=profile.cadence,
        storage_location=location,
        storage_country=country,
        timestamp=flow.timestamp,
        direction=flow.direction,
    )


def encode_notification(n: Notification) -> bytes:
    storage: dict = {"Location": n.storage_location}
    if n.storage_country is not None:
        storage["Country"] = n.storage_country
    obj = {
        "DeviceId": n.device_id,
        "DeviceType": n.device_type,
        "DeviceName": n.device_name,
        "PlacementArea": [r.value for r in RoomId if r in n.placement_area],
        "DataTypes": {t.value: n.data_types[t].value for t in DataTypeTag
                      if t in n.data_types},
        "DataUsage": [u.value for u in UsagePurpose if u in n.data_usage],
        "DataAccess": [a.value for a in AccessParty if a in n.data_access],
        "RetentionTime": n.retention.value,
        "DataStorage": storage,
        "Timestamp": n.timestamp,
        "Direction": n.direction.value,
    }
    if n.cadence is not None:
        obj["Cadence"] = n.cadence.value
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


_TOP_FIELDS = ("DeviceId", "DeviceType", "DeviceName", "PlacementArea",
               "DataTypes", "DataUsage", "DataAccess", "RetentionTime",
               "DataStorage", "Timestamp", "Direction")
_KNOWN_FIELDS = set(_TOP_FIELDS) | {"Cadence"}


def _enum_value(enum_cls, raw, path: str):
    try:
        return enum_cls(raw)
    except ValueError:
        raise UnknownEnumValue(path, raw)


def decode_notification(payload: bytes | str) -> Notification:
    try:
        obj = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"not valid JSON: {exc}")
    if not isinstance(obj, dict):
        raise DecodeError("top level must be an object")
    for name in _TOP_FIELDS:
        if name not in obj:
            raise MissingField(name)
    for name in obj:
        if name not in _KNOWN_FIELDS:
            raise DecodeError(f"unknown field {name!r}")

    storage = obj["DataStorage"]
    if not isinstance(storage, dict) or "Location" not in storage:
        raise MissingField("DataStorage.Location")
    location = storage["Location"]
    if location not in CONTINENTS and location not in (LOCATION_UNKNOWN, LOCATION_PRIVATE):
        raise UnknownEnumValue("DataStorage.Location", location)

    data_types = {}
    if not isinstance(obj["DataTypes"], dict) or not obj["DataTypes"]:
        raise DecodeError("DataTypes must be a non-empty object")
    for tag_raw, ann_raw in obj["DataTypes"].items():
        tag = _enum_value(DataTypeTag, tag_raw, "DataTypes")
        data_types[tag] = _enum_value(RiskAnnotation, ann_raw, f"DataTypes.{tag_raw}")

    rooms = {_enum_value(RoomId, r, "PlacementArea") for r in obj["PlacementArea"]}
    usage = {_enum_value(UsagePurpose, u, "DataUsage") for u in obj["DataUsage"]}
    access = {_enum_value(AccessParty, a, "DataAccess") for a in obj["DataAccess"]}
    return Notification(
        device_id=str(obj["DeviceId"]),
        device_type=str(obj["DeviceType"]),
        device_name=str(obj["DeviceName"]),
        placement_area=tuple(r for r in RoomId if r in rooms),
        data_types=data_types,
        data_usage=tuple(u for u in UsagePurpose if u in usage),
        data_access=tuple(a for a in AccessParty if a in access),
        retention=_enum_value(RetentionPeriod, obj["RetentionTime"], "RetentionTime"),
        cadence=(_enum_value(CollectionCadence, obj["Cadence"], "Cadence")
                 if "Cadence" in obj else None),
        storage_location=location,
        storage_country=storage.get("Country"),
        timestamp=float(obj["Timestamp"]),
        direction=_enum_value(Direction, obj["Direction"], "Direction"),
    )


@dataclass
class EmitPolicy:
    """At most one notification per device per window."""

    window_seconds: float = 60.0
    last_emit: dict[str, float] = field(default_factory=dict)

    def should_emit(self, device_id: str, now: float) -> bool:
        last = self.last_emit.get(device_id)
        if last is not None and now - last < self.window_seconds:
            return False
        self.last_emit[device_id] = now
        return True


def should_emit(policy: EmitPolicy, device_id: str, now: float) -> bool:
    return policy.should_emit(device_id, now)
