"""Network activity ingestion: capture replay, flow logs, live sniffing.

Packets are reduced to header summaries (payloads are never inspected or
stored), classified local-vs-remote, and coalesced into flow episodes
keyed by 5-tuple with an idle-gap cutoff.
"""
from __future__ import annotations

import enum
import ipaddress
import json
import struct
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator

from .policy import PolicyCorpus, lookup_profile

RFC1918_PREFIXES = frozenset({
    ipaddress.IPv4Network("10.0.0.0/8"),
    ipaddress.IPv4Network("172.16.0.0/12"),
    ipaddress.IPv4Network("192.168.0.0/16"),
})

DEFAULT_IDLE_GAP = 10.0   # seconds between packets that splits flow episodes


class Protocol(str, enum.Enum):
    TCP = "tcp"
    UDP = "udp"
    OTHER = "other"


class Direction(str, enum.Enum):
    OUTBOUND = "Outbound"
    INBOUND = "Inbound"


class SourceUnreadable(OSError):
    pass


class MalformedCapture(ValueError):
    pass


@dataclass(frozen=True)
class PacketSummary:
    ts: float
    src_ip: str
    dst_ip: str
    src_port: int
    dst_port: int
    protocol: Protocol
    length: int
    src_mac: str | None = None
    dst_mac: str | None = None


@dataclass(frozen=True)
class FlowRecord:
    timestamp: float
    local_ip: str
    remote_ip: str
    local_port: int
    remote_port: int
    protocol: Protocol
    direction: Direction
    byte_count: int
    local_mac: str | None = None

    def to_payload(self, device_id: str | None = None) -> dict:
        return {
            "Ts": self.timestamp,
            "LocalIp": self.local_ip,
            "LocalPort": self.local_port,
            "RemoteIp": self.remote_ip,
            "RemotePort": self.remote_port,
            "Protocol": self.protocol.value,
            "Direction": self.direction.value,
            "Bytes": self.byte_count,
            "DeviceId": device_id,
            "Attributed": device_id is not None,
        }


@dataclass(frozen=True)
class CaptureFile:
    path: str


@dataclass(frozen=True)
class FlowLog:
    path: str


@dataclass(frozen=True)
class LiveInterface:
    name: str


CaptureSource = CaptureFile | FlowLog | LiveInterface


@dataclass
class ReadStats:
    packets: int = 0
    parse_errors: int = 0
    non_ip: int = 0


_PCAP_MAGICS = {
    b"\xa1\xb2\xc3\xd4": (">", 1e-6),   # big-endian, microseconds
    b"\xd4\xc3\xb2\xa1": ("<", 1e-6),
    b"\xa1\xb2\x3c\x4d": (">", 1e-9),   # nanosecond variants
    b"\x4d\x3c\xb2\xa1": ("<", 1e-9),
}
_ETHERTYPE_IPV4 = 0x0800
_ETHERTYPE_VLAN = 0x8100
_LINKTYPE_ETHERNET = 1


def _mac_str(raw: bytes) -> str:
    return ":".join(f"{b:02x}" for b in raw)


def _parse_ethernet_ipv4(frame: bytes, ts: float, orig_len: int) -> PacketSummary | None:
    """Decode one Ethernet frame down to ports; None when not IPv4."""
    if len(frame) < 14:
        raise ValueError("frame shorter than an Ethernet header")
    dst_mac, src_mac = _mac_str(frame[0:6]), _mac_str(frame[6:12])
    ethertype = struct.unpack(">H", frame[12:14])[0]
    offset = 14
    if ethertype == _ETHERTYPE_VLAN:
        if len(frame) < 18:
            raise ValueError("truncated VLAN tag")
        ethertype = struct.unpack(">H", frame[16:18])[0]
        offset = 18
    if ethertype != _ETHERTYPE_IPV4:
        return None
    ip = frame[offset:]
    if len(ip) < 20:
        raise ValueError("truncated IPv4 header")
    version_ihl = ip[0]
    if version_ihl >> 4 != 4:
        raise ValueError(f"IP version {version_ihl >> 4} inside IPv4 ethertype")
    ihl = (version_ihl & 0x0F) * 4
    if ihl < 20 or len(ip) < ihl:
        raise ValueError("bad IPv4 header length")
    proto_num = ip[9]
    src_ip = str(ipaddress.IPv4Address(ip[12:16]))
    dst_ip = str(ipaddress.IPv4Address(ip[16:20]))
    frag_offset = struct.unpack(">H", ip[6:8])[0] & 0x1FFF
    protocol = {6: Protocol.TCP, 17: Protocol.UDP}.get(proto_num, Protocol.OTHER)
    src_port = dst_port = 0
    if frag_offset == 0 and protocol in (Protocol.TCP, Protocol.UDP) and len(ip) >= ihl + 4:
        src_port, dst_port = struct.unpack(">HH", ip[ihl:ihl + 4])
    return PacketSummary(ts, src_ip, dst_ip, src_port, dst_port, protocol,
                         orig_len, src_mac, dst_mac)


def _read_pcap(path: str, stats: ReadStats) -> Iterator[PacketSummary]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise SourceUnreadable(f"cannot read capture {path}: {exc}")
    if len(data) < 24:
        raise MalformedCapture(f"{path}: truncated file header ({len(data)} bytes)")
    magic = data[:4]
    if magic not in _PCAP_MAGICS:
        raise MalformedCapture(f"{path}: unknown magic {magic.hex()}")
    endian, tick = _PCAP_MAGICS[magic]
    _vmaj, _vmin, _zone, _sig, _snap, network = struct.unpack(endian + "HHiIII", data[4:24])
    if network != _LINKTYPE_ETHERNET:
        raise MalformedCapture(f"{path}: unsupported link type {network}")
    pos = 24
    while pos + 16 <= len(data):
        ts_sec, ts_sub, incl_len, orig_len = struct.unpack(endian + "IIII", data[pos:pos + 16])
        pos += 16
        if pos + incl_len > len(data):
            stats.parse_errors += 1   # truncated tail record
            break
        frame = data[pos:pos + incl_len]
        pos += incl_len
        ts = ts_sec + ts_sub * tick
        try:
            summary = _parse_ethernet_ipv4(frame, ts, orig_len)
        except ValueError:
            stats.parse_errors += 1
            continue
        if summary is None:
            stats.non_ip += 1
            continue
        stats.packets += 1
        yield summary
    if pos != len(data) and pos + 16 > len(data) and pos < len(data):
        stats.parse_errors += 1   # dangling partial record header


def _split_hostport(raw: str) -> tuple[str, int]:
    host, _, port = raw.rpartition(":")
    return str(ipaddress.IPv4Address(host)), int(port)


def _read_flowlog(path: str, stats: ReadStats) -> Iterator[PacketSummary]:
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise SourceUnreadable(f"cannot read flow log {path}: {exc}")
    with fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                src_ip, src_port = _split_hostport(obj["src"])
                dst_ip, dst_port = _split_hostport(obj["dst"])
                summary = PacketSummary(
                    ts=float(obj["ts"]),
                    src_ip=src_ip, dst_ip=dst_ip,
                    src_port=src_port, dst_port=dst_port,
                    protocol=Protocol(obj["proto"]),
                    length=int(obj["bytes"]),
                )
            except (ValueError, KeyError, TypeError, ipaddress.AddressValueError):
                stats.parse_errors += 1
                continue
            stats.packets += 1
            yield summary


def _read_live(name: str, stats: ReadStats) -> Iterator[PacketSummary]:
    import socket
    if not hasattr(socket, "AF_PACKET"):
        raise SourceUnreadable("live capture requires AF_PACKET (Linux)")
    try:
        sock = socket.socket(socket.AF_PACKET, socket.SOCK_RAW, socket.ntohs(0x0003))
        sock.bind((name, 0))
    except OSError as exc:
        raise SourceUnreadable(f"cannot open interface {name}: {exc}")
    with sock:
        while True:
            frame = sock.recv(65535)
            try:
                summary = _parse_ethernet_ipv4(frame, time.time(), len(frame))
            except ValueError:
                stats.parse_errors += 1
                continue
            if summary is None:
                stats.non_ip += 1
                continue
            stats.packets += 1
            yield summary


def read_capture(source: CaptureSource, stats: ReadStats | None = None) -> Iterator[PacketSummary]:
    """Stream packet summaries from any source behind one interface."""
    stats = stats if stats is not None else ReadStats()
    if isinstance(source, CaptureFile):
        return _read_pcap(source.path, stats)
    if isinstance(source, FlowLog):
        return _read_flowlog(source.path, stats)
    if isinstance(source, LiveInterface):
        return _read_live(source.name, stats)
    raise TypeError(f"unknown capture source {source!r}")


def classify_endpoints(src_ip: str, dst_ip: str,
                       local_prefixes: Iterable[ipaddress.IPv4Network],
                       ) -> tuple[str, str, Direction] | None:
    """Pick the local side of an exchange; None drops local-local and
    remote-remote pairs."""
    src = ipaddress.IPv4Address(src_ip)
    dst = ipaddress.IPv4Address(dst_ip)
    src_local = any(src in net for net in local_prefixes)
    dst_local = any(dst in net for net in local_prefixes)
    if src_local == dst_local:
        return None
    if src_local:
        return str(src), str(dst), Direction.OUTBOUND
    return str(dst), str(src), Direction.INBOUND


def local_prefix_set(corpus: PolicyCorpus | None = None) -> frozenset[ipaddress.IPv4Network]:
    """RFC1918 plus any corpus-declared local prefixes."""
    if corpus is None:
        return RFC1918_PREFIXES
    return RFC1918_PREFIXES | corpus.local_prefixes


@dataclass
class _OpenFlow:
    record: FlowRecord
    last_ts: float


class FlowCoalescer:
    """Fold packets into flow episodes; an idle gap splits episodes."""

    def __init__(self, local_prefixes: Iterable[ipaddress.IPv4Network],
                 idle_gap: float = DEFAULT_IDLE_GAP):
        self.local_prefixes = frozenset(local_prefixes)
        self.idle_gap = idle_gap
        self.dropped = 0
        self._open: dict[tuple, _OpenFlow] = {}

    def feed(self, pkt: PacketSummary) -> list[FlowRecord]:
        ends = classify_endpoints(pkt.src_ip, pkt.dst_ip, self.local_prefixes)
        if ends is None:
            self.dropped += 1
            return []
        local_ip, remote_ip, direction = ends
        if direction is Direction.OUTBOUND:
            local_port, remote_port = pkt.src_port, pkt.dst_port
            local_mac = pkt.src_mac
        else:
            local_port, remote_port = pkt.dst_port, pkt.src_port
            local_mac = pkt.dst_mac
        key = (local_ip, local_port, remote_ip, remote_port, pkt.protocol)
        completed = []
        open_flow = self._open.get(key)
        if open_flow is not None and pkt.ts - open_flow.last_ts > self.idle_gap:
            completed.append(open_flow.record)
            open_flow = None
        if open_flow is None:
            self._open[key] = _OpenFlow(
                FlowRecord(pkt.ts, local_ip, remote_ip, local_port, remote_port,
                           pkt.protocol, direction, pkt.length, local_mac),
                pkt.ts,
            )
        else:
            rec = open_flow.record
            open_flow.record = replace(
                rec,
                byte_count=rec.byte_count + pkt.length,
                local_mac=rec.local_mac or local_mac,
            )
            open_flow.last_ts = pkt.ts
        return completed

    def flush(self) -> list[FlowRecord]:
        records = [f.record for f in self._open.values()]
        self._open.clear()
        return records


def coalesce_stream(packets: Iterable[PacketSummary],
                    local_prefixes: Iterable[ipaddress.IPv4Network],
                    idle_gap: float = DEFAULT_IDLE_GAP) -> list[FlowRecord]:
    """Coalesce a finite packet stream; result ordered by flow start time."""
    coalescer = FlowCoalescer(local_prefixes, idle_gap)
    records: list[FlowRecord] = []
    for pkt in packets:
        records.extend(coalescer.feed(pkt))
    records.extend(coalescer.flush())
    records.sort(key=lambda r: (r.timestamp, r.local_ip, r.local_port,
                                r.remote_ip, r.remote_port, r.protocol.value))
    return records


def attribute_flow(corpus: PolicyCorpus, flow: FlowRecord) -> tuple[str, FlowRecord] | None:
    """Join a flow with its device profile; None marks it unattributed."""
    profile = lookup_profile(corpus, mac=flow.local_mac, ip=flow.local_ip)
    if profile is None:
        return None
    return profile.device_id, flow
