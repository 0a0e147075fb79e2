#!/usr/bin/env python3
# Full UI loop against the real gateway: replay the sample capture, keep
# the state stream alive, connect as the browser would, tap a device, and
# watch the next snapshot confirm it.
import json
import subprocess
import sys
import time
from pathlib import Path

from websockets.sync.client import connect

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "privacycube" / "data"

proc = subprocess.Popen(
    [sys.executable, "-m", "privacycube.cli",
     "--capture", str(DATA / "golden_lock.pcap"),
     "--listen", "127.0.0.1:8765", "--serve", "--log-dir", "/tmp/privacycube-ui-demo"],
    stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
time.sleep(1.5)

try:
    with connect("ws://127.0.0.1:8765") as ws:
        envelope = json.loads(ws.recv(timeout=5))
        faces = envelope["payload"]["Faces"]
        print(f"snapshot seq {envelope['seq']}: "
              f"slot 2 = {faces['T'][1]['DeviceId']} ({faces['T'][1]['State']})")
        print("  lit map regions:", [c for c, on in faces["L"]["Map"].items() if on])

        print("\ntapping LivingRoom slot 3 (idle speaker)...")
        ws.send(json.dumps({"room": "LivingRoom", "slot": 3, "ts": time.time()}))
        envelope = json.loads(ws.recv(timeout=5))
        slot3 = envelope["payload"]["Faces"]["T"][2]
        print(f"next snapshot seq {envelope['seq']}: "
              f"slot 3 = {slot3['DeviceId']} ({slot3['State']})")

        print("\nswitching to the Kitchen page (slot 0 control tap)...")
        ws.send(json.dumps({"room": "Kitchen", "slot": 0, "ts": time.time()}))
        envelope = json.loads(ws.recv(timeout=5))
        print(f"next snapshot seq {envelope['seq']}: "
              f"selected room = {envelope['payload']['SelectedRoom']}")
finally:
    proc.terminate()
    proc.wait(timeout=10)
    print("\ngateway stopped; open frontend/public/index.html for the visual cube")
