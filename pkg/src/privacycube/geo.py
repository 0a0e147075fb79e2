"""IP-range geolocation: refreshable IP2C table plus continent mapping.

Lookups run against an immutable table snapshot; a refresh builds the
replacement off the hot path and installs it with one reference swap, so
readers always see exactly one table version.
"""
from __future__ import annotations

import bisect
import ipaddress
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .continents import CONTINENTS, COUNTRY_TO_CONTINENT


class Ip2cError(ValueError):
    pass


class MalformedRow(Ip2cError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


class OverlappingRanges(Ip2cError):
    pass


class EmptyTable(Ip2cError):
    pass


_CC_RE = re.compile(r"^[A-Za-z]{2}$")


def _parse_ip_field(raw: str, line_no: int) -> int:
    raw = raw.strip().strip('"')
    if raw.isdigit():
        value = int(raw)
        if value > 0xFFFFFFFF:
            raise MalformedRow(line_no, f"{raw} exceeds the IPv4 space")
        return value
    try:
        return int(ipaddress.IPv4Address(raw))
    except ipaddress.AddressValueError:
        raise MalformedRow(line_no, f"{raw!r} is not an IPv4 address or integer")


@dataclass(frozen=True)
class Ip2cTable:
    entries: tuple[tuple[int, int, str], ...]   # (start, end, country), sorted
    loaded_at: float
    source_version: str
    _starts: tuple[int, ...] = field(repr=False, compare=False, default=())

    @staticmethod
    def build(entries, loaded_at: float, source_version: str) -> "Ip2cTable":
        ordered = tuple(sorted(entries))
        return Ip2cTable(ordered, loaded_at, source_version,
                         tuple(e[0] for e in ordered))


def load_ip2c(document: str, *, source_version: str = "unversioned",
              loaded_at: float | None = None) -> Ip2cTable:
    """Parse `start,end,CC` rows (dotted-quad or integer, `#` comments)."""
    entries = []
    for line_no, line in enumerate(document.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise MalformedRow(line_no, f"expected 3 fields, got {len(parts)}")
        start = _parse_ip_field(parts[0], line_no)
        end = _parse_ip_field(parts[1], line_no)
        if start > end:
            raise MalformedRow(line_no, f"inverted range {parts[0]}..{parts[1]}")
        cc = parts[2].strip('"')
        if not _CC_RE.fullmatch(cc):
            raise MalformedRow(line_no, f"{parts[2]!r} is not an ISO alpha-2 code")
        entries.append((start, end, cc.upper()))
    if not entries:
        raise EmptyTable("no usable rows")
    entries.sort()
    for (s1, e1, c1), (s2, e2, c2) in zip(entries, entries[1:]):
        if s2 <= e1:
            raise OverlappingRanges(
                f"range {s2}..{e2} ({c2}) overlaps {s1}..{e1} ({c1})")
    ts = time.time() if loaded_at is None else loaded_at
    return Ip2cTable.build(entries, ts, source_version)


@dataclass(frozen=True)
class GeoResult:
    kind: str                    # "country" | "private" | "unknown"
    country: str | None = None
    continent: str | None = None

    @property
    def is_country(self) -> bool:
        return self.kind == "country"


PRIVATE = GeoResult("private")
UNKNOWN = GeoResult("unknown")


def country_to_continent(code: str, mapping: dict[str, str] | None = None) -> str | None:
    """Static country -> continent lookup; None for unassigned codes."""
    table = COUNTRY_TO_CONTINENT if mapping is None else mapping
    return table.get(code.upper())


def load_continent_overrides(document: str) -> dict[str, str]:
    """Parse a `CC,continent` CSV into a replacement continent map."""
    mapping = {}
    for line_no, line in enumerate(document.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2 or not _CC_RE.fullmatch(parts[0]):
            raise MalformedRow(line_no, f"expected 'CC,continent', got {line!r}")
        if parts[1] not in CONTINENTS:
            raise MalformedRow(line_no, f"{parts[1]!r} is not one of {CONTINENTS}")
        mapping[parts[0].upper()] = parts[1]
    return mapping


def resolve_country(table: Ip2cTable, ip: str | ipaddress.IPv4Address,
                    continent_map: dict[str, str] | None = None) -> GeoResult:
    """Range lookup via binary search; private/reserved IPs short-circuit."""
    addr = ipaddress.IPv4Address(ip)
    if not addr.is_global:
        return PRIVATE
    value = int(addr)
    idx = bisect.bisect_right(table._starts, value) - 1
    if idx >= 0:
        start, end, cc = table.entries[idx]
        if start <= value <= end:
            return GeoResult("country", cc, country_to_continent(cc, continent_map))
    return UNKNOWN


class GeoStore:
    """Shared geo state: lock-free reads, atomic table replacement."""

    def __init__(self, table: Ip2cTable, continent_map: dict[str, str] | None = None):
        self._table = table
        self._continents = continent_map
        self._refresh_lock = threading.Lock()

    @property
    def table(self) -> Ip2cTable:
        return self._table

    def resolve(self, ip) -> GeoResult:
        return resolve_country(self._table, ip, self._continents)

    def resolve_versioned(self, ip) -> tuple[GeoResult, str]:
        table = self._table   # one snapshot per lookup
        return resolve_country(table, ip, self._continents), table.source_version

    def refresh(self, provider: str | Path | Callable[[], str], *,
                source_version: str | None = None,
                loaded_at: float | None = None) -> tuple[bool, str | None]:
        """Install a new table from a file path or fetch callback.

        Any failure keeps the current table; returns (installed, error).
        """
        with self._refresh_lock:
            try:
                if callable(provider):
                    text = provider()
                    version = source_version or f"callback-{int(time.time())}"
                else:
                    path = Path(provider)
                    text = path.read_text(encoding="utf-8")
                    version = source_version or path.name
                new_table = load_ip2c(text, source_version=version, loaded_at=loaded_at)
            except (OSError, Ip2cError) as exc:
                return False, f"{type(exc).__name__}: {exc}"
            self._table = new_table
            return True, None
