#!/usr/bin/env python3
# Resolve remote endpoints to countries and continents with the bundled
# range table, then demonstrate the keep-old-on-failure refresh rule.
from pathlib import Path

from privacycube import GeoStore, load_ip2c

DATA = Path(__file__).resolve().parents[1] / "src" / "privacycube" / "data"

store = GeoStore(load_ip2c((DATA / "ip2c.csv").read_text(), source_version="bundled"))

for ip in ("3.210.5.5", "52.28.1.10", "13.54.2.2", "192.168.1.12", "2.2.2.2"):
    result = store.resolve(ip)
    if result.kind == "country":
        print(f"{ip:15} -> {result.country} ({result.continent})")
    else:
        print(f"{ip:15} -> {result.kind}")

print("\nrefresh with a malformed table:")
installed, error = store.refresh(lambda: "bogus,rows")
print(f"  installed={installed}  error={error}")
print(f"  lookups still served by {store.table.source_version!r}")

print("refresh with a valid replacement:")
installed, _ = store.refresh(lambda: "3.208.0.0,3.239.255.255,CA", source_version="v2")
print(f"  installed={installed}  3.210.5.5 -> {store.resolve('3.210.5.5').country} "
      f"(version {store.table.source_version})")
