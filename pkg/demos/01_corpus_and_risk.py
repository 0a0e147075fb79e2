#!/usr/bin/env python3
# Walk through the bundled device corpus: the five policy factors each
# profile carries and the traffic-light risk coloring.
from pathlib import Path

from privacycube import DataTypeTag, RiskAnnotation, classify_risk, load_corpus, lookup_profile

DATA = Path(__file__).resolve().parents[1] / "src" / "privacycube" / "data"

corpus = load_corpus((DATA / "corpus.json").read_text())
print(f"{len(corpus.profiles)} devices across {len(corpus.room_pages)} rooms\n")

for room, page in corpus.room_pages.items():
    print(f"{room.value}: {', '.join(page)}")

print("\nrisk colors:")
for annotation in RiskAnnotation:
    print(f"  {annotation.value:8} -> {classify_risk(annotation).value}")

lock = lookup_profile(corpus, "192.168.1.12")
print(f"\n192.168.1.12 resolves to {lock.display_name!r}")
print("  collects:", ", ".join(t.value for t in DataTypeTag if t in lock.data_types))
print("  access parties:", len(lock.access), "of 8")
print("  retention:", lock.retention.value)
