from __future__ import annotations

import json
import random
from dataclasses import dataclass

import pytest

from privacycube.cube import CubeState, TapEvent, UnknownDevice
from privacycube.flows import Direction, FlowRecord, Protocol
from privacycube.geo import GeoResult, UNKNOWN
from privacycube.notify import build_notification
from privacycube.policy import (
    AccessParty,
    DataTypeTag,
    RetentionPeriod,
    RiskColor,
    RoomId,
    UsagePurpose,
    classify_risk,
    load_corpus,
)

from .conftest import minimal_corpus, minimal_device

GEO_BY_CONTINENT = {
    "NA": GeoResult("country", "US", "NA"),
    "EU": GeoResult("country", "DE", "EU"),
    "AS": GeoResult("country", "JP", "AS"),
    None: UNKNOWN,
}


def notify(state, corpus, device_id, ts, continent="NA"):
    flow = FlowRecord(ts, "10.0.0.1", "8.8.4.4", 1, 2, Protocol.TCP,
                      Direction.OUTBOUND, 64)
    n = build_notification(corpus.profiles[device_id], flow, GEO_BY_CONTINENT[continent])
    state.apply_notification(n, ts)
    return n


@pytest.fixture()
def small_corpus():
    devices = [
        minimal_device("lamp", bindings=["ip:10.0.0.1"],
                       data_types={"Presence": "Neutral", "Environment": "NonPII"},
                       access=["ResourceOwner", "ServiceProvider"],
                       usage=["Lifestyle"], retention="OneMonth"),
        minimal_device("cam", bindings=["ip:10.0.0.2"],
                       data_types={"Visual": "PII", "Usage": "Neutral"},
                       access=["ServiceProvider", "LawEnforcement"],
                       usage=["Security", "Surveillance"], retention="OneYear"),
        minimal_device("plug", bindings=["ip:10.0.0.3"],
                       data_types={"Usage": "Neutral"},
                       access=["ResourceOwner"],
                       usage=["Analytics"], retention="EventBased"),
        minimal_device("sensor", bindings=["ip:10.0.0.4"],
                       data_types={"Environment": "NonPII", "Health": "PII"},
                       access=["ResourceOwner", "ServiceProvider", "ThirdParty"],
                       usage=["Research", "Analytics"], retention="Indefinite"),
    ]
    rooms = {"LivingRoom": ["lamp", "cam", "plug"],
             "Kitchen": ["plug", "sensor", "lamp"]}
    return load_corpus(minimal_corpus(devices=devices, rooms=rooms))


class TestApplyNotification:
    def test_smart_lock_scenario_faces(self, corpus):
        state = CubeState(corpus)
        flow = FlowRecord(1000.0, "192.168.1.12", "3.210.5.5", 1, 2, Protocol.TCP,
                          Direction.OUTBOUND, 64)
        n = build_notification(corpus.profiles["smart_lock"],
                               flow, GEO_BY_CONTINENT["NA"])
        state.apply_notification(n, 1000.0)
        faces = state.page_state(RoomId.LIVING_ROOM)
        assert faces["T"][1]["State"] == "Lit"
        lit_tags = {tag for tag, cells in faces["D"].items() if cells[1] != "Off"}
        assert lit_tags == {"Location", "Visual", "Audio",
                            "Biometrics", "Usage", "Environment"}
        lit_access = {p for p, on in faces["A"].items() if on}
        assert lit_access == {"ResourceOwner", "TrustedParty", "ServiceProvider",
                              "DeviceManufacturer", "LawEnforcement", "ThirdParty",
                              "MarketingOrganisation"}
        assert all(faces["U"].values())
        assert [c for c, on in faces["L"]["Map"].items() if on] == ["NA"]
        assert [r for r, on in faces["L"]["TimeBar"].items() if on] == ["OneYear"]

    def test_risk_colors_on_type_face(self, small_corpus):
        state = CubeState(small_corpus)
        notify(state, small_corpus, "cam", 10.0)
        faces = state.page_state(RoomId.LIVING_ROOM)
        assert faces["D"]["Visual"][1] == RiskColor.RED.value
        assert faces["D"]["Usage"][1] == RiskColor.YELLOW.value

    def test_duplicate_notification_idempotent(self, small_corpus):
        state = CubeState(small_corpus)
        notify(state, small_corpus, "cam", 10.0)
        before = state.snapshot()
        notify(state, small_corpus, "cam", 10.5)
        assert state.snapshot() == before
        assert state.last_activity["cam"] == 10.5

    def test_other_room_page_isolated(self, small_corpus):
        state = CubeState(small_corpus)
        before_living = state.page_state(RoomId.LIVING_ROOM)
        notify(state, small_corpus, "sensor", 10.0)   # Kitchen-only device
        assert state.page_state(RoomId.LIVING_ROOM) == before_living
        assert state.page_state(RoomId.KITCHEN)["T"][1]["State"] == "Lit"

    def test_multi_room_device_lights_both(self, small_corpus):
        state = CubeState(small_corpus)
        notify(state, small_corpus, "lamp", 10.0)
        assert state.page_state(RoomId.LIVING_ROOM)["T"][0]["State"] == "Lit"
        assert state.page_state(RoomId.KITCHEN)["T"][2]["State"] == "Lit"

    def test_unknown_device_rejected_state_unchanged(self, small_corpus, corpus):
        state = CubeState(small_corpus)
        before = state.snapshot()
        flow = FlowRecord(1.0, "192.168.1.12", "8.8.8.8", 1, 2, Protocol.TCP,
                          Direction.OUTBOUND, 64)
        foreign = build_notification(corpus.profiles["smart_lock"], flow, UNKNOWN)
        with pytest.raises(UnknownDevice):
            state.apply_notification(foreign, 1.0)
        assert state.snapshot() == before

    def test_ordinal_isolation(self, small_corpus):
        state = CubeState(small_corpus)
        notify(state, small_corpus, "lamp", 10.0)     # ordinal 1 in LivingRoom
        faces = state.page_state(RoomId.LIVING_ROOM)
        for tag, cells in faces["D"].items():
            assert all(c == "Off" for i, c in enumerate(cells) if i != 0), tag


class TestTap:
    def test_tap_idle_device_selects_and_lights(self, small_corpus):
        state = CubeState(small_corpus)
        state.apply_tap(TapEvent(RoomId.LIVING_ROOM, 2, 100.0))
        faces = state.page_state(RoomId.LIVING_ROOM)
        assert faces["T"][1]["State"] == "Lit"
        # exploration mode: profile attributes render as if active
        assert faces["D"]["Visual"][1] == "Red"
        assert faces["A"]["LawEnforcement"] is True
        assert faces["L"]["TimeBar"]["OneYear"] is True
        assert not any(faces["L"]["Map"].values())   # no traffic, no location

    def test_tap_again_deselects(self, small_corpus):
        state = CubeState(small_corpus)
        before = state.snapshot()
        state.apply_tap(TapEvent(RoomId.LIVING_ROOM, 2, 100.0))
        state.apply_tap(TapEvent(RoomId.LIVING_ROOM, 2, 101.0))
        assert state.snapshot() == before

    def test_tap_empty_slot_noop(self, small_corpus):
        state = CubeState(small_corpus)
        before = state.snapshot()
        state.apply_tap(TapEvent(RoomId.LIVING_ROOM, 7, 100.0))
        assert state.snapshot() == before

    def test_tap_out_of_range_slot(self, small_corpus):
        state = CubeState(small_corpus)
        with pytest.raises(ValueError):
            state.apply_tap(TapEvent(RoomId.LIVING_ROOM, 9, 0.0))

    def test_selection_survives_timeout(self, small_corpus):
        state = CubeState(small_corpus, led_timeout=30.0)
        notify(state, small_corpus, "cam", 10.0)
        state.apply_tap(TapEvent(RoomId.LIVING_ROOM, 2, 12.0))
        state.tick(100.0)
        faces = state.page_state(RoomId.LIVING_ROOM)
        assert faces["T"][1]["State"] == "Lit"
        assert faces["L"]["Map"]["NA"] is True   # geo contribution retained

    def test_untap_after_timeout_goes_idle(self, small_corpus):
        state = CubeState(small_corpus, led_timeout=30.0)
        notify(state, small_corpus, "cam", 10.0)
        state.apply_tap(TapEvent(RoomId.LIVING_ROOM, 2, 12.0))
        state.tick(100.0)
        state.apply_tap(TapEvent(RoomId.LIVING_ROOM, 2, 101.0))
        faces = state.page_state(RoomId.LIVING_ROOM)
        assert faces["T"][1]["State"] == "Idle"
        assert not any(faces["L"]["Map"].values())

    def test_untap_with_recent_activity_stays_lit(self, small_corpus):
        state = CubeState(small_corpus, led_timeout=30.0)
        notify(state, small_corpus, "cam", 10.0)
        state.apply_tap(TapEvent(RoomId.LIVING_ROOM, 2, 11.0))
        state.apply_tap(TapEvent(RoomId.LIVING_ROOM, 2, 12.0))
        assert state.page_state(RoomId.LIVING_ROOM)["T"][1]["State"] == "Lit"


class TestSelectRoom:
    def test_select_preserves_pages(self, small_corpus):
        state = CubeState(small_corpus)
        notify(state, small_corpus, "cam", 10.0)
        living = state.page_state(RoomId.LIVING_ROOM)
        state.select_room(RoomId.KITCHEN)
        assert state.selected_room is RoomId.KITCHEN
        assert state.page_state(RoomId.LIVING_ROOM) == living

    def test_select_current_room_identity(self, small_corpus):
        state = CubeState(small_corpus)
        before = state.snapshot()
        state.select_room(RoomId.LIVING_ROOM)
        assert state.snapshot() == before

    def test_four_room_cycle(self, small_corpus):
        state = CubeState(small_corpus)
        seen = []
        for room in RoomId:
            state.select_room(room)
            seen.append(state.selected_room)
        assert seen == list(RoomId)


class TestTick:
    def test_expiry_clears_leds(self, small_corpus):
        state = CubeState(small_corpus, led_timeout=30.0)
        notify(state, small_corpus, "cam", 10.0)
        state.tick(41.0)
        faces = state.page_state(RoomId.LIVING_ROOM)
        assert faces["T"][1]["State"] == "Idle"
        assert all(c == "Off" for cells in faces["D"].values() for c in cells)
        assert not any(faces["A"].values())
        assert not any(faces["U"].values())
        assert not any(faces["L"]["Map"].values())
        assert not any(faces["L"]["TimeBar"].values())

    def test_boundary_not_expired_at_exact_timeout(self, small_corpus):
        state = CubeState(small_corpus, led_timeout=30.0)
        notify(state, small_corpus, "cam", 10.0)
        state.tick(40.0)    # exactly timeout: not beyond it
        assert state.page_state(RoomId.LIVING_ROOM)["T"][1]["State"] == "Lit"

    def test_union_survives_one_contributor(self, small_corpus):
        # lamp and cam share ServiceProvider; cam expires, lamp stays
        state = CubeState(small_corpus, led_timeout=30.0)
        notify(state, small_corpus, "cam", 0.0)
        notify(state, small_corpus, "lamp", 25.0)
        state.tick(40.0)    # cam expired, lamp alive
        faces = state.page_state(RoomId.LIVING_ROOM)
        assert faces["T"][1]["State"] == "Idle"
        assert faces["T"][0]["State"] == "Lit"
        assert faces["A"]["ServiceProvider"] is True
        assert faces["A"]["LawEnforcement"] is False   # cam-only party went off

    def test_monotone_between_ticks(self, small_corpus):
        state = CubeState(small_corpus)
        lit_history = []
        for i, (dev, cont) in enumerate([("cam", "NA"), ("lamp", "EU"),
                                         ("plug", "AS"), ("sensor", "NA")]):
            notify(state, small_corpus, dev, 10.0 + i, cont)
            faces_lr = state.page_state(RoomId.LIVING_ROOM)
            faces_k = state.page_state(RoomId.KITCHEN)
            lit = set()
            for room_tag, faces in (("LR", faces_lr), ("K", faces_k)):
                lit |= {(room_tag, "T", s["Slot"]) for s in faces["T"]
                        if s.get("State") == "Lit"}
                lit |= {(room_tag, "D", t, i) for t, cells in faces["D"].items()
                        for i, c in enumerate(cells) if c != "Off"}
                lit |= {(room_tag, "A", p) for p, on in faces["A"].items() if on}
                lit |= {(room_tag, "U", u) for u, on in faces["U"].items() if on}
                lit |= {(room_tag, "M", c) for c, on in faces["L"]["Map"].items() if on}
                lit |= {(room_tag, "R", r) for r, on in faces["L"]["TimeBar"].items() if on}
            lit_history.append(lit)
        for before, after in zip(lit_history, lit_history[1:]):
            assert before <= after


class TestSnapshot:
    def test_fresh_state_all_off(self, small_corpus):
        state = CubeState(small_corpus)
        obj = json.loads(state.snapshot())
        assert all(s["State"] in ("Idle", "Empty") for s in obj["Faces"]["T"])
        assert not any(obj["Faces"]["A"].values())
        assert not any(obj["Faces"]["U"].values())

    def test_repeated_snapshots_byte_identical(self, small_corpus):
        state = CubeState(small_corpus)
        notify(state, small_corpus, "cam", 10.0)
        assert state.snapshot() == state.snapshot()

    def test_room_badges(self, small_corpus):
        state = CubeState(small_corpus)
        notify(state, small_corpus, "lamp", 10.0)   # in both rooms
        obj = json.loads(state.snapshot())
        badges = {r["Room"]: r["ActiveDevices"] for r in obj["Rooms"]}
        assert badges["LivingRoom"] == 1 and badges["Kitchen"] == 1


# --- from-scratch recomputation oracle ------------------------------------

@dataclass
class Ev:
    kind: str       # notify | tap | tick
    ts: float
    device: str | None = None
    continent: str | None = None
    room: RoomId | None = None
    slot: int = 0


def oracle_contributions(corpus, events, timeout):
    """Second implementation of the contribution fold, structured as plain
    dict bookkeeping over the whole history."""
    last, alive, conts, selected = {}, {}, {}, set()
    for ev in events:
        if ev.kind == "notify":
            alive[ev.device] = True
            last[ev.device] = ev.ts
            if ev.continent:
                conts.setdefault(ev.device, set()).add(ev.continent)
        elif ev.kind == "tick":
            for d in list(alive):
                if alive[d] and d not in selected and ev.ts - last[d] > timeout:
                    alive[d] = False
                    conts.pop(d, None)
        elif ev.kind == "tap":
            page = corpus.room_pages.get(ev.room, ())
            if ev.slot > len(page):
                continue
            d = page[ev.slot - 1]
            if d in selected:
                selected.discard(d)
                if alive.get(d):
                    if last.get(d) is None or ev.ts - last[d] > timeout:
                        alive[d] = False
                        conts.pop(d, None)
                else:
                    conts.pop(d, None)
            else:
                selected.add(d)
    contributing = {d for d in corpus.profiles
                    if alive.get(d) or d in selected}
    return contributing, conts


def oracle_faces(corpus, room, contributing, conts):
    """Brute-force union over contributing devices in the room."""
    page = corpus.room_pages.get(room, ())
    lit_slots = {i for i, d in enumerate(page, 1) if d in contributing}
    cells = {}
    for tag in DataTypeTag:
        row = []
        for i in range(1, 9):
            if i <= len(page) and page[i - 1] in contributing:
                profile = corpus.profiles[page[i - 1]]
                if tag in profile.data_types:
                    row.append(classify_risk(profile.data_types[tag]).value)
                    continue
            row.append("Off")
        cells[tag.value] = row
    in_room = [corpus.profiles[d] for d in page if d in contributing]
    access = {p.value for profile in in_room for p in profile.access}
    usage = {u.value for profile in in_room for u in profile.usage}
    regions = {c for profile in in_room for c in conts.get(profile.device_id, set())}
    bar = {profile.retention.value for profile in in_room}
    return lit_slots, cells, access, usage, regions, bar


def random_events(corpus, rng, count):
    devices = sorted(corpus.profiles)
    events, ts = [], 0.0
    for _ in range(count):
        ts += rng.uniform(0.5, 20.0)
        kind = rng.choices(["notify", "tap", "tick"], weights=[5, 3, 2])[0]
        if kind == "notify":
            events.append(Ev("notify", ts, device=rng.choice(devices),
                             continent=rng.choice(["NA", "EU", "AS", None])))
        elif kind == "tap":
            events.append(Ev("tap", ts, room=rng.choice(list(RoomId)),
                             slot=rng.randint(1, 8)))
        else:
            events.append(Ev("tick", ts))
    return events


def apply_events(corpus, events, timeout):
    state = CubeState(corpus, led_timeout=timeout)
    for ev in events:
        if ev.kind == "notify":
            notify(state, corpus, ev.device, ev.ts, ev.continent)
        elif ev.kind == "tap":
            state.apply_tap(TapEvent(ev.room, ev.slot, ev.ts))
        else:
            state.tick(ev.ts)
    return state


class TestOracle:
    def test_hundred_random_sequences_match_recomputation(self, small_corpus):
        corpus = small_corpus
        rng = random.Random(1234)
        for run in range(100):
            events = random_events(corpus, rng, rng.randint(1, 50))
            state = apply_events(corpus, events, timeout=30.0)
            contributing, conts = oracle_contributions(corpus, events, 30.0)
            for room in (RoomId.LIVING_ROOM, RoomId.KITCHEN):
                faces = state.page_state(room)
                lit_slots, cells, access, usage, regions, bar = oracle_faces(
                    corpus, room, contributing, conts)
                got_slots = {s["Slot"] for s in faces["T"] if s.get("State") == "Lit"}
                assert got_slots == lit_slots, f"run {run} room {room}"
                assert faces["D"] == cells, f"run {run} room {room}"
                assert {p for p, on in faces["A"].items() if on} == access
                assert {u for u, on in faces["U"].items() if on} == usage
                assert {c for c, on in faces["L"]["Map"].items() if on} == regions
                assert {r for r, on in faces["L"]["TimeBar"].items() if on} == bar

    def test_fold_determinism(self, small_corpus):
        rng = random.Random(77)
        events = random_events(small_corpus, rng, 40)
        a = apply_events(small_corpus, events, 30.0).snapshot()
        b = apply_events(small_corpus, events, 30.0).snapshot()
        assert a == b
