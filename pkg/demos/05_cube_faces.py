#!/usr/bin/env python3
# Drive the five-face cube model by hand: lock activity lights its LEDs,
# a tap explores an idle device, and the timeout puts LEDs back out.
import json
from pathlib import Path

from privacycube import CubeState, TapEvent, build_notification, load_corpus
from privacycube.flows import Direction, FlowRecord, Protocol
from privacycube.geo import GeoStore, load_ip2c
from privacycube.policy import RoomId

DATA = Path(__file__).resolve().parents[1] / "src" / "privacycube" / "data"

corpus = load_corpus((DATA / "corpus.json").read_text())
geo = GeoStore(load_ip2c((DATA / "ip2c.csv").read_text()))
state = CubeState(corpus, led_timeout=30.0)


def show(label):
    faces = state.page_state(RoomId.LIVING_ROOM)
    lit = [s["DeviceId"] for s in faces["T"] if s.get("State") == "Lit"]
    access = [p for p, on in faces["A"].items() if on]
    regions = [c for c, on in faces["L"]["Map"].items() if on]
    print(f"{label}\n  lit: {lit or '-'}\n  access: {access or '-'}"
          f"\n  map: {regions or '-'}\n")


show("fresh state:")

flow = FlowRecord(1000.0, "192.168.1.12", "3.210.5.5", 49300, 443,
                  Protocol.TCP, Direction.OUTBOUND, 920)
notification = build_notification(corpus.profiles["smart_lock"], flow,
                                  geo.resolve(flow.remote_ip))
state.apply_notification(notification, 1000.0)
show("after smart-lock activity (slot 2):")

state.apply_tap(TapEvent(RoomId.LIVING_ROOM, 3, 1005.0))
show("after tapping the idle speaker (slot 3):")

state.tick(1040.0)
show("31 s later (lock expired, tapped speaker persists):")

state.apply_tap(TapEvent(RoomId.LIVING_ROOM, 3, 1041.0))
show("speaker untapped:")

print("snapshot bytes:", len(state.snapshot()), "(canonical JSON)")
print(json.dumps(json.loads(state.snapshot())["Rooms"], indent=2))
