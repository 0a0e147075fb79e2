"""Privacy-policy data model and device corpus.

The five policy factors a profile carries: what data a device collects,
who can access it, what it is used for, where it is stored (resolved from
traffic, not the profile), and how long it is retained. Profiles also pin
each device to room pages so the cube knows which LED cell belongs to it.
"""
from __future__ import annotations

import dataclasses
import enum
import ipaddress
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping


class DataTypeTag(str, enum.Enum):
    LOCATION = "Location"
    PRESENCE = "Presence"
    VISUAL = "Visual"
    AUDIO = "Audio"
    BIOMETRICS = "Biometrics"
    HEALTH = "Health"
    USAGE = "Usage"
    ENVIRONMENT = "Environment"


class AccessParty(str, enum.Enum):
    RESOURCE_OWNER = "ResourceOwner"
    TRUSTED_PARTY = "TrustedParty"
    SERVICE_PROVIDER = "ServiceProvider"
    DEVICE_MANUFACTURER = "DeviceManufacturer"
    LAW_ENFORCEMENT = "LawEnforcement"
    PUBLIC = "Public"
    THIRD_PARTY = "ThirdParty"
    MARKETING_ORGANISATION = "MarketingOrganisation"


class UsagePurpose(str, enum.Enum):
    REVENUE = "Revenue"
    ANALYTICS = "Analytics"
    RESEARCH = "Research"
    SURVEILLANCE = "Surveillance"
    SECURITY = "Security"
    TARGETED_ADS = "TargetedAds"
    LIFESTYLE = "Lifestyle"
    PRODUCTIVITY = "Productivity"


class RetentionPeriod(str, enum.Enum):
    EVENT_BASED = "EventBased"
    ONE_MONTH = "OneMonth"
    THREE_MONTHS = "ThreeMonths"
    ONE_YEAR = "OneYear"
    INDEFINITE = "Indefinite"

    @property
    def rank(self) -> int:
        return _RETENTION_ORDER.index(self)

    def __lt__(self, other):  # type: ignore[override]
        if isinstance(other, RetentionPeriod):
            return self.rank < other.rank
        return NotImplemented

    def __le__(self, other):  # type: ignore[override]
        if isinstance(other, RetentionPeriod):
            return self.rank <= other.rank
        return NotImplemented

    def __gt__(self, other):  # type: ignore[override]
        if isinstance(other, RetentionPeriod):
            return self.rank > other.rank
        return NotImplemented

    def __ge__(self, other):  # type: ignore[override]
        if isinstance(other, RetentionPeriod):
            return self.rank >= other.rank
        return NotImplemented


_RETENTION_ORDER = [
    RetentionPeriod.EVENT_BASED,
    RetentionPeriod.ONE_MONTH,
    RetentionPeriod.THREE_MONTHS,
    RetentionPeriod.ONE_YEAR,
    RetentionPeriod.INDEFINITE,
]


class CollectionCadence(str, enum.Enum):
    EVERY_SECOND = "EverySecond"
    EVERY_HOUR = "EveryHour"
    EVERY_DAY = "EveryDay"
    EVENT_BASED = "EventBased"


class RiskAnnotation(str, enum.Enum):
    PII = "PII"
    NEUTRAL = "Neutral"
    NON_PII = "NonPII"


class RiskColor(str, enum.Enum):
    RED = "Red"
    YELLOW = "Yellow"
    GREEN = "Green"
    OFF = "Off"


class RoomId(str, enum.Enum):
    LIVING_ROOM = "LivingRoom"
    KITCHEN = "Kitchen"
    BATHROOM = "Bathroom"
    BEDROOM = "Bedroom"


ROOM_CAPACITY = 8

_RISK_COLOR = {
    RiskAnnotation.PII: RiskColor.RED,
    RiskAnnotation.NEUTRAL: RiskColor.YELLOW,
    RiskAnnotation.NON_PII: RiskColor.GREEN,
}


def classify_risk(annotation: RiskAnnotation) -> RiskColor:
    """Map a sensitivity annotation to its traffic-light LED color."""
    return _RISK_COLOR[RiskAnnotation(annotation)]


class CorpusError(ValueError):
    """Base for corpus validation failures; message carries a field path."""


class SchemaError(CorpusError):
    pass


class RoomCapacityExceeded(CorpusError):
    pass


class DuplicateBinding(CorpusError):
    pass


class DanglingDeviceId(CorpusError):
    pass


_MAC_RE = re.compile(r"^[0-9a-f]{2}(:[0-9a-f]{2}){5}$")


def normalize_mac(raw: str) -> str:
    mac = raw.strip().lower().replace("-", ":")
    if not _MAC_RE.fullmatch(mac):
        raise ValueError(f"not a MAC address: {raw!r}")
    return mac


def _is_mac(endpoint: str) -> bool:
    try:
        normalize_mac(endpoint)
        return True
    except ValueError:
        return False


@dataclass(frozen=True)
class DeviceProfile:
    """One device's curated privacy policy plus its placement and bindings."""

    device_id: str
    display_name: str
    device_icon: str
    policy_url: str
    accent_color: str
    rooms: frozenset[RoomId]
    ordinal_per_room: Mapping[RoomId, int]
    mac_bindings: frozenset[str]
    ip_bindings: frozenset[str]
    data_types: Mapping[DataTypeTag, RiskAnnotation]
    access: frozenset[AccessParty]
    usage: frozenset[UsagePurpose]
    retention: RetentionPeriod
    cadence: CollectionCadence | None = None


@dataclass(frozen=True)
class PolicyCorpus:
    """Immutable after load; reload swaps in a whole new corpus."""

    profiles: Mapping[str, DeviceProfile]
    local_prefixes: frozenset[ipaddress.IPv4Network]
    room_pages: Mapping[RoomId, tuple[str, ...]]
    _by_mac: Mapping[str, str] = field(repr=False, compare=False, default_factory=dict)
    _by_ip: Mapping[str, str] = field(repr=False, compare=False, default_factory=dict)

    def profile(self, device_id: str) -> DeviceProfile:
        return self.profiles[device_id]


def _require(cond: bool, exc: type[CorpusError], msg: str) -> None:
    if not cond:
        raise exc(msg)


def _parse_enum(enum_cls, value, path: str):
    try:
        return enum_cls(value)
    except ValueError:
        raise SchemaError(f"{path}: {value!r} is not one of {[e.value for e in enum_cls]}")


def _parse_profile(obj: dict, path: str) -> tuple[DeviceProfile, frozenset[str], frozenset[str]]:
    _require(isinstance(obj, dict), SchemaError, f"{path}: profile must be an object")
    for key in ("device_id", "display_name", "device_icon", "policy_url",
                "accent_color", "bindings", "data_types", "access", "usage", "retention"):
        _require(key in obj, SchemaError, f"{path}.{key}: missing")
    device_id = obj["device_id"]
    _require(isinstance(device_id, str) and bool(device_id), SchemaError,
             f"{path}.device_id: must be a non-empty string")

    macs, ips = set(), set()
    _require(isinstance(obj["bindings"], list), SchemaError, f"{path}.bindings: must be an array")
    for i, binding in enumerate(obj["bindings"]):
        bpath = f"{path}.bindings[{i}]"
        _require(isinstance(binding, str), SchemaError, f"{bpath}: must be a string")
        kind, _, value = binding.partition(":")
        if kind == "mac":
            try:
                macs.add(normalize_mac(value))
            except ValueError as exc:
                raise SchemaError(f"{bpath}: {exc}")
        elif kind == "ip":
            try:
                ips.add(str(ipaddress.IPv4Address(value)))
            except ipaddress.AddressValueError:
                raise SchemaError(f"{bpath}: {value!r} is not an IPv4 address")
        else:
            raise SchemaError(f"{bpath}: expected 'mac:...' or 'ip:...', got {binding!r}")

    _require(isinstance(obj["data_types"], dict), SchemaError, f"{path}.data_types: must be an object")
    data_types = {}
    for tag_raw, ann_raw in obj["data_types"].items():
        tag = _parse_enum(DataTypeTag, tag_raw, f"{path}.data_types")
        data_types[tag] = _parse_enum(RiskAnnotation, ann_raw, f"{path}.data_types.{tag_raw}")
    _require(bool(data_types), SchemaError, f"{path}.data_types: must be non-empty")

    _require(isinstance(obj["access"], list), SchemaError, f"{path}.access: must be an array")
    access = frozenset(_parse_enum(AccessParty, v, f"{path}.access[{i}]")
                       for i, v in enumerate(obj["access"]))
    _require(isinstance(obj["usage"], list), SchemaError, f"{path}.usage: must be an array")
    usage = frozenset(_parse_enum(UsagePurpose, v, f"{path}.usage[{i}]")
                      for i, v in enumerate(obj["usage"]))
    retention = _parse_enum(RetentionPeriod, obj["retention"], f"{path}.retention")
    cadence = None
    if obj.get("cadence") is not None:
        cadence = _parse_enum(CollectionCadence, obj["cadence"], f"{path}.cadence")

    profile = DeviceProfile(
        device_id=device_id,
        display_name=str(obj["display_name"]),
        device_icon=str(obj["device_icon"]),
        policy_url=str(obj["policy_url"]),
        accent_color=str(obj["accent_color"]),
        rooms=frozenset(),          # placed from room pages below
        ordinal_per_room={},
        mac_bindings=frozenset(macs),
        ip_bindings=frozenset(ips),
        data_types=data_types,
        access=access,
        usage=usage,
        retention=retention,
        cadence=cadence,
    )
    return profile, frozenset(macs), frozenset(ips)


def load_corpus(document: str) -> PolicyCorpus:
    """Parse and validate a corpus JSON document.

    Raises SchemaError, RoomCapacityExceeded, DuplicateBinding or
    DanglingDeviceId; messages name the offending field path.
    """
    try:
        root = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"document: not valid JSON ({exc})")
    _require(isinstance(root, dict), SchemaError, "document: top level must be an object")
    for key in ("local_prefixes", "rooms", "devices"):
        _require(key in root, SchemaError, f"{key}: missing")

    _require(isinstance(root["local_prefixes"], list), SchemaError,
             "local_prefixes: must be an array")
    prefixes = set()
    for i, raw in enumerate(root["local_prefixes"]):
        try:
            prefixes.add(ipaddress.IPv4Network(raw))
        except (ipaddress.AddressValueError, ipaddress.NetmaskValueError, ValueError):
            raise SchemaError(f"local_prefixes[{i}]: {raw!r} is not an IPv4 CIDR prefix")

    _require(isinstance(root["devices"], list), SchemaError, "devices: must be an array")
    profiles: dict[str, DeviceProfile] = {}
    by_mac: dict[str, str] = {}
    by_ip: dict[str, str] = {}
    for i, obj in enumerate(root["devices"]):
        path = f"devices[{i}]"
        profile, macs, ips = _parse_profile(obj, path)
        _require(profile.device_id not in profiles, SchemaError,
                 f"{path}.device_id: duplicate id {profile.device_id!r}")
        for mac in macs:
            if mac in by_mac:
                raise DuplicateBinding(
                    f"{path}.bindings: mac {mac} already bound to {by_mac[mac]!r}")
            by_mac[mac] = profile.device_id
        for ip in ips:
            if ip in by_ip:
                raise DuplicateBinding(
                    f"{path}.bindings: ip {ip} already bound to {by_ip[ip]!r}")
            by_ip[ip] = profile.device_id
        profiles[profile.device_id] = profile

    _require(isinstance(root["rooms"], dict), SchemaError, "rooms: must be an object")
    room_pages: dict[RoomId, tuple[str, ...]] = {}
    placements: dict[str, dict[RoomId, int]] = {d: {} for d in profiles}
    for room_raw, page in root["rooms"].items():
        room = _parse_enum(RoomId, room_raw, "rooms")
        _require(isinstance(page, list), SchemaError, f"rooms.{room_raw}: must be an array")
        if len(page) > ROOM_CAPACITY:
            raise RoomCapacityExceeded(
                f"rooms.{room_raw}: {len(page)} devices, capacity is {ROOM_CAPACITY}")
        seen = set()
        for pos, device_id in enumerate(page, start=1):
            if device_id not in profiles:
                raise DanglingDeviceId(
                    f"rooms.{room_raw}[{pos - 1}]: unknown device {device_id!r}")
            _require(device_id not in seen, SchemaError,
                     f"rooms.{room_raw}[{pos - 1}]: device {device_id!r} listed twice")
            seen.add(device_id)
            placements[device_id][room] = pos
        room_pages[room] = tuple(page)

    placed = {}
    for device_id, profile in profiles.items():
        placed[device_id] = dataclasses.replace(
            profile,
            rooms=frozenset(placements[device_id]),
            ordinal_per_room=dict(placements[device_id]),
        )
    return PolicyCorpus(
        profiles=placed,
        local_prefixes=frozenset(prefixes),
        room_pages=room_pages,
        _by_mac=by_mac,
        _by_ip=by_ip,
    )


def serialize_corpus(corpus: PolicyCorpus) -> str:
    """Canonical corpus JSON: sorted keys, devices sorted by id."""
    devices = []
    for device_id in sorted(corpus.profiles):
        p = corpus.profiles[device_id]
        bindings = sorted(f"mac:{m}" for m in p.mac_bindings)
        bindings += sorted(f"ip:{ip}" for ip in p.ip_bindings)
        devices.append({
            "device_id": p.device_id,
            "display_name": p.display_name,
            "device_icon": p.device_icon,
            "policy_url": p.policy_url,
            "accent_color": p.accent_color,
            "bindings": bindings,
            "data_types": {t.value: p.data_types[t].value for t in DataTypeTag
                           if t in p.data_types},
            "access": [a.value for a in AccessParty if a in p.access],
            "usage": [u.value for u in UsagePurpose if u in p.usage],
            "retention": p.retention.value,
            "cadence": p.cadence.value if p.cadence else None,
        })
    doc = {
        "local_prefixes": sorted(str(n) for n in corpus.local_prefixes),
        "rooms": {room.value: list(corpus.room_pages[room])
                  for room in RoomId if room in corpus.room_pages},
        "devices": devices,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def lookup_profile(corpus: PolicyCorpus, endpoint: str | None = None, *,
                   mac: str | None = None, ip: str | None = None) -> DeviceProfile | None:
    """Find the profile bound to an endpoint; None when unknown.

    When both a MAC and an IP are known for the host, the MAC binding wins
    (stable across DHCP leases).
    """
    if endpoint is not None:
        if endpoint.startswith("mac:"):
            mac = endpoint[4:]
        elif endpoint.startswith("ip:"):
            ip = endpoint[3:]
        elif _is_mac(endpoint):
            mac = endpoint
        else:
            ip = endpoint
    if mac is not None:
        try:
            device_id = corpus._by_mac.get(normalize_mac(mac))
        except ValueError:
            device_id = None
        if device_id is not None:
            return corpus.profiles[device_id]
    if ip is not None:
        try:
            key = str(ipaddress.IPv4Address(ip))
        except ipaddress.AddressValueError:
            return None
        device_id = corpus._by_ip.get(key)
        if device_id is not None:
            return corpus.profiles[device_id]
    return None


def corpus_rooms(corpus: PolicyCorpus) -> Iterable[RoomId]:
    return (room for room in RoomId if room in corpus.room_pages)
