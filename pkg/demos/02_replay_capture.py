#!/usr/bin/env python3
# Replay the bundled sample capture through the flow layer: packets are
# summarized, coalesced into flow episodes, and attributed to devices.
from pathlib import Path

from privacycube import CaptureFile, attribute_flow, coalesce_stream, load_corpus, read_capture
from privacycube.flows import local_prefix_set

DATA = Path(__file__).resolve().parents[1] / "src" / "privacycube" / "data"

corpus = load_corpus((DATA / "corpus.json").read_text())
packets = list(read_capture(CaptureFile(str(DATA / "golden_lock.pcap"))))
print(f"{len(packets)} packets in the capture:")
for pkt in packets:
    print(f"  t={pkt.ts:.3f}  {pkt.src_ip}:{pkt.src_port} -> "
          f"{pkt.dst_ip}:{pkt.dst_port}  {pkt.protocol.value}  {pkt.length}B")

flows = coalesce_stream(packets, local_prefix_set(corpus))
print(f"\ncoalesced into {len(flows)} flow episode(s):")
for flow in flows:
    attributed = attribute_flow(corpus, flow)
    who = attributed[0] if attributed else "(unattributed)"
    print(f"  t={flow.timestamp:.3f}  {flow.local_ip} <-> {flow.remote_ip}  "
          f"{flow.direction.value}  {flow.byte_count}B  device={who}")
