#!/usr/bin/env python3
"""Regenerate binary/derived fixtures: the bundled sample capture and the
frontend snapshot fixtures. Run from the repo root after changing the
bundled corpus or the snapshot schema.
"""
from __future__ import annotations

import json
import struct
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

DATA = ROOT / "src" / "privacycube" / "data"

GATEWAY_MAC = "02:00:00:00:00:fe"
LOCK_MAC = "02:00:00:00:01:02"
LOCK_IP = "192.168.1.12"
REMOTE_IP = "3.210.5.5"
BASE_TS = 1700000000.0


def mac_bytes(mac: str) -> bytes:
    return bytes(int(p, 16) for p in mac.split(":"))


def ip_bytes(ip: str) -> bytes:
    return bytes(int(p) for p in ip.split("."))


def tcp_packet(src_mac, dst_mac, src_ip, dst_ip, src_port, dst_port, payload_len):
    eth = mac_bytes(dst_mac) + mac_bytes(src_mac) + struct.pack(">H", 0x0800)
    total_len = 20 + 20 + payload_len
    ip = struct.pack(">BBHHHBBH", 0x45, 0, total_len, 0x1234, 0x4000, 64, 6, 0)
    ip += ip_bytes(src_ip) + ip_bytes(dst_ip)
    tcp = struct.pack(">HHIIBBHHH", src_port, dst_port, 1000, 2000, 0x50, 0x18,
                      65535, 0, 0)
    return eth + ip + tcp + bytes(payload_len)


def write_pcap(path: Path, packets: list[tuple[float, bytes]]):
    header = struct.pack("<IHHiIII", 0xA1B2C3D4, 2, 4, 0, 0, 65535, 1)
    body = b""
    for ts, frame in packets:
        sec = int(ts)
        usec = round((ts - sec) * 1e6)
        body += struct.pack("<IIII", sec, usec, len(frame), len(frame)) + frame
    path.write_bytes(header + body)


def build_golden_capture():
    packets = [
        (BASE_TS, tcp_packet(LOCK_MAC, GATEWAY_MAC, LOCK_IP, REMOTE_IP, 49300, 443, 66)),
        (BASE_TS + 0.4, tcp_packet(GATEWAY_MAC, LOCK_MAC, REMOTE_IP, LOCK_IP, 443, 49300, 546)),
        (BASE_TS + 1.2, tcp_packet(LOCK_MAC, GATEWAY_MAC, LOCK_IP, REMOTE_IP, 49300, 443, 146)),
    ]
    write_pcap(DATA / "golden_lock.pcap", packets)
    print(f"wrote {DATA / 'golden_lock.pcap'} ({len(packets)} packets)")


def build_frontend_fixtures():
    """Run the state pipeline on the golden capture and export the snapshot
    envelopes the frontend tests replay."""
    from privacycube.cube import CubeState, TapEvent
    from privacycube.flows import CaptureFile, attribute_flow, coalesce_stream, local_prefix_set, read_capture
    from privacycube.geo import GeoStore, load_ip2c
    from privacycube.notify import build_notification
    from privacycube.policy import RoomId, load_corpus

    corpus = load_corpus((DATA / "corpus.json").read_text())
    store = GeoStore(load_ip2c((DATA / "ip2c.csv").read_text(),
                               source_version="ip2c.csv", loaded_at=0.0))
    fixtures = ROOT / "frontend" / "fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)

    def write(name, state, seq):
        envelope = {"topic": "privacycube/state",
                    "payload": state.snapshot_obj(), "seq": seq}
        (fixtures / name).write_text(
            json.dumps(envelope, sort_keys=True, indent=2) + "\n")

    write("fresh_snapshot.json", CubeState(corpus), 1)

    # fresh state + tap on LivingRoom slot 2: the lock lit by selection only
    tapped = CubeState(corpus)
    tapped.apply_tap(TapEvent(RoomId.LIVING_ROOM, 2, BASE_TS))
    write("lock_selected_snapshot.json", tapped, 2)

    # the golden capture replayed: the lit-lock snapshot the UI must render
    state = CubeState(corpus)
    flows = coalesce_stream(read_capture(CaptureFile(str(DATA / "golden_lock.pcap"))),
                            local_prefix_set(corpus))
    for flow in flows:
        attributed = attribute_flow(corpus, flow)
        if attributed is None:
            continue
        device_id, flow = attributed
        n = build_notification(corpus.profiles[device_id], flow,
                               store.resolve(flow.remote_ip))
        state.apply_notification(n, flow.timestamp)
    write("golden_snapshot.json", state, 3)
    print(f"wrote frontend fixtures under {fixtures}")


if __name__ == "__main__":
    build_golden_capture()
    build_frontend_fixtures()
