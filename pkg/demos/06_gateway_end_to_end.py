#!/usr/bin/env python3
# Run the whole gateway twice over the bundled capture and prove the event
# logs are replay-equal; then inspect what landed in the log.
import tempfile
from pathlib import Path

from privacycube import Gateway, GatewayConfig, replay_verify
from privacycube.eventlog import read_log

DATA = Path(__file__).resolve().parents[1] / "src" / "privacycube" / "data"

with tempfile.TemporaryDirectory() as tmp:
    runs = []
    for name in ("first", "second"):
        config = GatewayConfig(
            corpus_path=str(DATA / "corpus.json"),
            ip2c_path=str(DATA / "ip2c.csv"),
            capture_path=str(DATA / "golden_lock.pcap"),
            log_dir=f"{tmp}/{name}",
        )
        gateway = Gateway(config)
        gateway.run()
        runs.append(gateway.run_dir)
        print(f"{name} run -> {gateway.run_dir}")

    result = replay_verify(*runs)
    print(f"\nreplay_verify: equal={result.equal}")

    print("\nevent log content:")
    for record in read_log(runs[0]):
        print(f"  seq={record.seq}  {record.kind:12} ts={record.ts}")
