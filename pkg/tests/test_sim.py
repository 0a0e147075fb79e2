from __future__ import annotations

import json
import math

import pytest

from privacycube.policy import RoomId, load_corpus
from privacycube.sim import (
    ScheduleError,
    UnknownScheduleDevice,
    generate,
    load_schedule,
    room_at,
    rotation_end,
    rotation_windows,
)

from .conftest import minimal_corpus, minimal_device


def schedule_doc(**overrides):
    doc = {
        "seed": 7,
        "time_scale": 10,
        "rotation": [["LivingRoom", 4], ["Kitchen", 4], ["Bathroom", 3], ["Bedroom", 3]],
        "entries": [{"device_id": "cam", "interval_seconds": 300,
                     "jitter_seconds": 0, "remote_ip": "8.8.8.8"}],
    }
    doc.update(overrides)
    return json.dumps(doc)


@pytest.fixture()
def sim_corpus():
    devices = [
        minimal_device("cam", bindings=["ip:10.0.0.2"]),
        minimal_device("fridge", bindings=["ip:10.0.0.3"]),
        minimal_device("mirror", bindings=["ip:10.0.0.4"]),
        minimal_device("pillow", bindings=["ip:10.0.0.5"]),
    ]
    rooms = {"LivingRoom": ["cam"], "Kitchen": ["fridge"],
             "Bathroom": ["mirror"], "Bedroom": ["pillow"]}
    return load_corpus(minimal_corpus(devices=devices, rooms=rooms))


class TestLoadSchedule:
    def test_minimal(self, sim_corpus):
        schedule = load_schedule(schedule_doc(rotation=None), sim_corpus)
        assert schedule.entries[0].interval_seconds == 300
        assert schedule.rotation is None

    def test_unknown_device(self, sim_corpus):
        doc = schedule_doc(entries=[{"device_id": "ghost", "interval_seconds": 60,
                                     "jitter_seconds": 0, "remote_ip": "8.8.8.8"}])
        with pytest.raises(UnknownScheduleDevice):
            load_schedule(doc, sim_corpus)

    def test_bad_interval(self, sim_corpus):
        doc = schedule_doc(entries=[{"device_id": "cam", "interval_seconds": 0,
                                     "jitter_seconds": 0, "remote_ip": "8.8.8.8"}])
        with pytest.raises(ScheduleError):
            load_schedule(doc, sim_corpus)

    def test_malformed_json(self, sim_corpus):
        with pytest.raises(ScheduleError):
            load_schedule("{oops", sim_corpus)

    def test_bundled_field_study_rotation(self, data_dir, corpus):
        schedule = load_schedule((data_dir / "field_study.json").read_text(), corpus)
        assert schedule.rotation == (
            (RoomId.LIVING_ROOM, 4.0), (RoomId.KITCHEN, 4.0),
            (RoomId.BATHROOM, 3.0), (RoomId.BEDROOM, 3.0))
        assert schedule.entries[0].interval_seconds == 300.0


class TestRotation:
    def test_scaled_boundaries(self, sim_corpus):
        schedule = load_schedule(schedule_doc(), sim_corpus)
        windows = rotation_windows(schedule)
        assert [w[1] for w in windows] == [0.0, 40.0, 80.0, 110.0]
        assert [w[2] for w in windows] == [40.0, 80.0, 110.0, 140.0]
        assert rotation_end(schedule) == 140.0

    def test_room_at(self, sim_corpus):
        schedule = load_schedule(schedule_doc(), sim_corpus)
        assert room_at(schedule, 0.0) is RoomId.LIVING_ROOM
        assert room_at(schedule, 39.9) is RoomId.LIVING_ROOM
        assert room_at(schedule, 40.0) is RoomId.KITCHEN
        assert room_at(schedule, 109.0) is RoomId.BATHROOM
        assert room_at(schedule, 139.0) is RoomId.BEDROOM
        assert room_at(schedule, 140.0) is None

    def test_coverage_exact_and_disjoint(self, sim_corpus):
        schedule = load_schedule(schedule_doc(), sim_corpus)
        windows = rotation_windows(schedule)
        for (_, _, end_a), (_, start_b, _) in zip(windows, windows[1:]):
            assert end_a == start_b
        durations = {room.value: end - start for room, start, end in windows}
        assert durations == {"LivingRoom": 40.0, "Kitchen": 40.0,
                             "Bathroom": 30.0, "Bedroom": 30.0}


class TestGenerate:
    def test_regular_interval_no_jitter(self, sim_corpus):
        schedule = load_schedule(schedule_doc(rotation=None), sim_corpus)
        events = generate(schedule, sim_corpus, 1000.0)
        assert [e.timestamp for e in events] == [300.0, 600.0, 900.0]
        assert all(e.device_id == "cam" for e in events)

    def test_same_seed_reproducible(self, sim_corpus):
        doc = schedule_doc(rotation=None, entries=[
            {"device_id": "cam", "interval_seconds": 50,
             "jitter_seconds": 20, "remote_ip": "8.8.8.8"}])
        schedule = load_schedule(doc, sim_corpus)
        a = generate(schedule, sim_corpus, 2000.0)
        b = generate(schedule, sim_corpus, 2000.0)
        assert a == b
        assert any(e.timestamp % 50 != 0 for e in a)   # jitter applied

    def test_different_seed_differs(self, sim_corpus):
        base = {"device_id": "cam", "interval_seconds": 50,
                "jitter_seconds": 20, "remote_ip": "8.8.8.8"}
        s1 = load_schedule(schedule_doc(rotation=None, seed=1, entries=[base]), sim_corpus)
        s2 = load_schedule(schedule_doc(rotation=None, seed=2, entries=[base]), sim_corpus)
        assert generate(s1, sim_corpus, 2000.0) != generate(s2, sim_corpus, 2000.0)

    def test_rotation_gates_devices(self, sim_corpus):
        doc = schedule_doc(entries=[
            {"device_id": d, "interval_seconds": 7, "jitter_seconds": 0,
             "remote_ip": "8.8.8.8"}
            for d in ("cam", "fridge", "mirror", "pillow")])
        schedule = load_schedule(doc, sim_corpus)
        events = generate(schedule, sim_corpus, 140.0)
        assert events
        for event in events:
            room = room_at(schedule, event.timestamp)
            profile = sim_corpus.profiles[event.device_id]
            assert room in profile.rooms

    def test_event_density_bounds(self, sim_corpus):
        doc = schedule_doc(rotation=None, entries=[
            {"device_id": "cam", "interval_seconds": 33,
             "jitter_seconds": 10, "remote_ip": "8.8.8.8"}])
        schedule = load_schedule(doc, sim_corpus)
        t_end = 1234.0
        events = generate(schedule, sim_corpus, t_end)
        expected = math.floor(t_end / 33)
        assert expected - 1 <= len(events) <= expected + 1

    def test_timestamps_non_decreasing(self, sim_corpus):
        doc = schedule_doc(rotation=None, entries=[
            {"device_id": d, "interval_seconds": n, "jitter_seconds": 5,
             "remote_ip": "8.8.8.8"}
            for d, n in (("cam", 13), ("fridge", 17), ("mirror", 7))])
        schedule = load_schedule(doc, sim_corpus)
        events = generate(schedule, sim_corpus, 500.0)
        assert all(a.timestamp <= b.timestamp for a, b in zip(events, events[1:]))

    def test_flows_carry_device_bindings(self, sim_corpus):
        schedule = load_schedule(schedule_doc(rotation=None), sim_corpus)
        event = generate(schedule, sim_corpus, 400.0)[0]
        assert event.flow.local_ip == "10.0.0.2"
        assert event.flow.remote_ip == "8.8.8.8"
        assert event.flow.timestamp == event.timestamp
