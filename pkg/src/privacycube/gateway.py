"""End-to-end pipeline service.

Ingestion -> attribution -> geolocation -> notification -> cube state, with
every event appended to the run's log before it is published. File and
simulation sources drive logical time from the data, so two runs over the
same inputs produce byte-comparable logs.
"""
from __future__ import annotations

import json
import signal
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from . import eventlog
from .bus import Bus, TOPIC_NOTIFICATIONS, TOPIC_STATE, TOPIC_TAPS
from .cube import CubeState, TapEvent, UnknownDevice
from .eventlog import EventLogWriter
from .flows import (
    CaptureFile,
    FlowLog,
    LiveInterface,
    FlowCoalescer,
    attribute_flow,
    coalesce_stream,
    local_prefix_set,
    read_capture,
)
from .geo import GeoStore, Ip2cError, load_continent_overrides, load_ip2c
from .mqtt import MqttError, MqttPublisher
from .notify import EmitPolicy, build_notification, encode_notification
from .flows import FlowRecord
from .policy import CorpusError, PolicyCorpus, RoomId, load_corpus
from .sim import ScheduleError, generate, load_schedule, rotation_end, rotation_windows
from .wsbridge import StateStreamServer


class ConfigError(ValueError):
    """Bad configuration: exit code 2."""


class InputError(ValueError):
    """Unreadable or malformed input data: exit code 3."""


@dataclass
class GatewayConfig:
    corpus_path: str
    ip2c_path: str
    continents_path: str | None = None
    capture_path: str | None = None
    flowlog_path: str | None = None
    live_interface: str | None = None
    schedule_path: str | None = None
    broker: str | None = None
    listen: str | None = None
    log_dir: str = "logs"
    emit_window_seconds: float = 60.0
    led_timeout_seconds: float = 30.0
    ip2c_refresh_seconds: float = 86400.0
    rotate_bytes: int = eventlog.DEFAULT_ROTATE_BYTES
    serve: bool = False
    sim_duration: float | None = None

    def validate(self) -> None:
        sources = [s for s in (self.capture_path, self.flowlog_path,
                               self.live_interface, self.schedule_path) if s]
        if len(sources) != 1:
            raise ConfigError("exactly one source required "
                              "(--capture | --flowlog | --live | --simulate)")
        for label, path in (("corpus", self.corpus_path), ("ip2c", self.ip2c_path),
                            ("continents", self.continents_path),
                            ("capture", self.capture_path),
                            ("flowlog", self.flowlog_path),
                            ("schedule", self.schedule_path)):
            if path and not Path(path).exists():
                raise ConfigError(f"{label} file does not exist: {path}")
        for label, value in (("emit_window", self.emit_window_seconds),
                             ("led_timeout", self.led_timeout_seconds),
                             ("ip2c_refresh", self.ip2c_refresh_seconds)):
            if value <= 0:
                raise ConfigError(f"{label} must be positive, got {value}")


_CONFIG_KEYS = {
    "corpus": "corpus_path",
    "ip2c": "ip2c_path",
    "continents": "continents_path",
    "capture": "capture_path",
    "flowlog": "flowlog_path",
    "live": "live_interface",
    "simulate": "schedule_path",
    "broker": "broker",
    "listen": "listen",
    "log_dir": "log_dir",
    "emit_window": "emit_window_seconds",
    "led_timeout": "led_timeout_seconds",
    "ip2c_refresh": "ip2c_refresh_seconds",
    "rotate_bytes": "rotate_bytes",
    "serve": "serve",
    "sim_duration": "sim_duration",
}


def config_from_file(path: str) -> dict:
    """Read a config JSON into GatewayConfig keyword arguments."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(obj, dict):
        raise ConfigError(f"config {path}: top level must be an object")
    kwargs = {}
    for key, value in obj.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"config {path}: unknown key {key!r}")
        kwargs[_CONFIG_KEYS[key]] = value
    return kwargs


def _next_run_dir(log_dir: str | Path) -> Path:
    base = Path(log_dir)
    base.mkdir(parents=True, exist_ok=True)
    existing = [int(p.name.split("-")[1]) for p in base.glob("run-*")
                if p.name.split("-")[1].isdigit()]
    return base / f"run-{max(existing, default=0) + 1:04d}"


@dataclass
class _FlowEvent:
    ts: float
    flow: FlowRecord
    device_id: str | None = None    # pre-attributed (simulation)
    order: int = 1


@dataclass
class _RoomEvent:
    ts: float
    room: RoomId | None             # None marks the rotation end
    order: int = 0


class Gateway:
    def __init__(self, config: GatewayConfig):
        config.validate()
        self.config = config
        self.corpus = self._load_corpus()
        self.geo = self._load_geo()
        self.run_dir = _next_run_dir(config.log_dir)
        self.bus = Bus()
        self.emit_policy = EmitPolicy(config.emit_window_seconds)
        self.cube = CubeState(self.corpus, config.led_timeout_seconds)
        self._last_snapshot: bytes | None = None
        self._stop = threading.Event()
        self._mqtt: MqttPublisher | None = None
        self._ws: StateStreamServer | None = None
        self._log: EventLogWriter | None = None

    # -- startup ------------------------------------------------------------

    def _load_corpus(self) -> PolicyCorpus:
        path = self.config.corpus_path
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read corpus {path}: {exc}")
        try:
            return load_corpus(text)
        except CorpusError as exc:
            raise InputError(f"corpus {path}: {exc}")

    def _load_geo(self) -> GeoStore:
        path = self.config.ip2c_path
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read ip2c table {path}: {exc}")
        try:
            table = load_ip2c(text, source_version=Path(path).name, loaded_at=0.0)
        except Ip2cError as exc:
            raise InputError(f"ip2c table {path}: {exc}")
        overrides = None
        if self.config.continents_path:
            try:
                overrides = load_continent_overrides(
                    Path(self.config.continents_path).read_text(encoding="utf-8"))
            except (OSError, Ip2cError) as exc:
                raise InputError(f"continents file: {exc}")
        return GeoStore(table, overrides)

    # -- logging + publication ----------------------------------------------

    def _append(self, kind: str, payload: dict, ts: float) -> int:
        return self._log.append(kind, payload, ts)

    def _publish(self, topic: str, payload: bytes, seq: int) -> None:
        self.bus.publish(topic, payload, seq)
        if self._mqtt is not None:
            try:
                self._mqtt.publish(topic, payload)
            except MqttError as exc:
                self._append("Error", {"Error": f"mqtt: {exc}"}, time.time())

    def _publish_state(self, cause: str, ts: float, always: bool = False,
                       extra: dict | None = None) -> None:
        snapshot = self.cube.snapshot()
        if not always and snapshot == self._last_snapshot:
            return
        self._last_snapshot = snapshot
        payload = {"Cause": cause, "Snapshot": json.loads(snapshot)}
        if extra:
            payload.update(extra)
        seq = self._append("StateChange", payload, ts)
        envelope = json.dumps(payload["Snapshot"], sort_keys=True,
                              separators=(",", ":")).encode()
        self._publish(TOPIC_STATE, envelope, seq)

    # -- event application ----------------------------------------------------

    def _handle_flow(self, event: _FlowEvent) -> None:
        flow = event.flow
        device_id = event.device_id
        if device_id is None:
            attributed = attribute_flow(self.corpus, flow)
            if attributed is not None:
                device_id, flow = attributed
        self._append("Flow", flow.to_payload(device_id), event.ts)
        if device_id is None:
            return
        if not self.emit_policy.should_emit(device_id, event.ts):
            return
        geo = self.geo.resolve(flow.remote_ip)
        notification = build_notification(self.corpus.profiles[device_id], flow, geo)
        encoded = encode_notification(notification)
        seq = self._append("Notification", json.loads(encoded), event.ts)
        self._publish(TOPIC_NOTIFICATIONS, encoded, seq)
        try:
            self.cube.apply_notification(notification, event.ts)
        except UnknownDevice as exc:
            self._append("Error", {"Error": f"unknown device {exc.device_id}"}, event.ts)
            return
        self._publish_state("Notification", event.ts)

    def _handle_room(self, event: _RoomEvent) -> None:
        if event.room is None:
            self._publish_state("RotationEnd", event.ts, always=True)
            return
        self.cube.select_room(event.room)
        self._publish_state("RoomChange", event.ts, always=True,
                            extra={"Room": event.room.value})

    def _handle_tap(self, payload: dict, ts: float) -> None:
        # slot 0 is the room-navigation control message from the UI
        try:
            room = RoomId(payload["room"])
            slot = int(payload["slot"])
            if slot == 0:
                self.cube.select_room(room)
            else:
                self.cube.apply_tap(TapEvent(room, slot, float(payload["ts"])))
        except (ValueError, KeyError) as exc:
            self._append("Error", {"Error": f"tap rejected: {exc}"}, ts)
            return
        self._append("Tap", payload, ts)
        self._publish_state("Tap", ts, always=slot == 0)

    # -- sources ---------------------------------------------------------------

    def _file_events(self) -> list[_FlowEvent]:
        if self.config.capture_path:
            source = CaptureFile(self.config.capture_path)
        else:
            source = FlowLog(self.config.flowlog_path)
        try:
            flows = coalesce_stream(read_capture(source), local_prefix_set(self.corpus))
        except (OSError, ValueError) as exc:
            raise InputError(f"{source}: {exc}")
        return [_FlowEvent(f.timestamp, f) for f in flows]

    def _sim_events(self) -> list[_FlowEvent | _RoomEvent]:
        path = self.config.schedule_path
        try:
            schedule = load_schedule(Path(path).read_text(encoding="utf-8"), self.corpus)
        except OSError as exc:
            raise InputError(f"cannot read schedule {path}: {exc}")
        except ScheduleError as exc:
            raise InputError(f"schedule {path}: {exc}")
        t_end = (self.config.sim_duration or schedule.duration_seconds
                 or rotation_end(schedule))
        if t_end is None:
            raise ConfigError("schedule has no rotation; set sim_duration or "
                              "duration_seconds")
        events: list[_FlowEvent | _RoomEvent] = [
            _FlowEvent(e.timestamp, e.flow, e.device_id) for e in generate(
                schedule, self.corpus, t_end)
        ]
        windows = rotation_windows(schedule)
        if windows:
            self.cube.select_room(windows[0][0])
            for room, start, _end in windows[1:]:
                events.append(_RoomEvent(start, room))
            events.append(_RoomEvent(windows[-1][2], None))
        events.sort(key=lambda e: (e.ts, e.order))
        return events

    # -- run loop ----------------------------------------------------------------

    def run(self) -> int:
        with EventLogWriter(self.run_dir, self.config.rotate_bytes) as log:
            self._log = log
            self._start_transports()
            try:
                if self.config.live_interface:
                    self._run_live()
                else:
                    events = (self._sim_events() if self.config.schedule_path
                              else self._file_events())
                    start_ts = events[0].ts if events else 0.0
                    self._publish_state("Start", start_ts, always=True)
                    for event in events:
                        self.cube.tick(event.ts)
                        self._publish_state("Tick", event.ts)
                        if isinstance(event, _RoomEvent):
                            self._handle_room(event)
                        else:
                            self._handle_flow(event)
                    if self.config.serve:
                        self._serve_taps()
            finally:
                self._stop_transports()
        return 0

    def _start_transports(self) -> None:
        if self.config.listen:
            host, _, port = self.config.listen.rpartition(":")
            try:
                port = int(port)
            except ValueError:
                raise ConfigError(f"bad listen address {self.config.listen!r}")
            self._ws = StateStreamServer(self.bus, host or "127.0.0.1", port)
            self._ws.start()
        if self.config.broker:
            host, _, port = self.config.broker.rpartition(":")
            try:
                port = int(port)
            except ValueError:
                raise ConfigError(f"bad broker address {self.config.broker!r}")
            self._mqtt = MqttPublisher(host or "127.0.0.1", port)
            try:
                self._mqtt.connect()
            except MqttError as exc:
                raise InputError(str(exc))

    def _stop_transports(self) -> None:
        if self._ws is not None:
            self._ws.stop()
        if self._mqtt is not None:
            self._mqtt.close()

    def install_signal_handlers(self) -> None:
        for sig in (signal.SIGINT, signal.SIGTERM):
            signal.signal(sig, lambda *_: self._stop.set())

    def shutdown(self) -> None:
        self._stop.set()

    def _serve_taps(self) -> None:
        """Keep the state stream alive after file exhaustion, applying taps.

        Taps are applied without a clock tick so wall-clock tap timestamps
        cannot expire contributions accumulated in logical time.
        """
        taps = self.bus.subscribe(TOPIC_TAPS)
        while not self._stop.is_set():
            try:
                msg = taps.get(timeout=0.2)
            except Exception:
                continue
            self._handle_tap(json.loads(msg.payload), time.time())

    def _run_live(self) -> None:
        taps = self.bus.subscribe(TOPIC_TAPS)
        coalescer = FlowCoalescer(local_prefix_set(self.corpus))
        packets = read_capture(LiveInterface(self.config.live_interface))
        packet_queue: list = []
        lock = threading.Lock()

        def reader():
            try:
                for pkt in packets:
                    with lock:
                        packet_queue.append(pkt)
                    if self._stop.is_set():
                        return
            except OSError as exc:
                self._append("Error", {"Error": str(exc)}, time.time())
                self._stop.set()

        threading.Thread(target=reader, name="live-capture", daemon=True).start()
        refresher = threading.Thread(target=self._refresh_loop, name="geo-refresh",
                                     daemon=True)
        refresher.start()
        last_tick = time.time()
        while not self._stop.is_set():
            now = time.time()
            with lock:
                batch, packet_queue[:] = packet_queue[:], []
            for pkt in batch:
                for flow in coalescer.feed(pkt):
                    self._handle_flow(_FlowEvent(flow.timestamp, flow))
            msg = taps.try_get()
            if msg is not None:
                self._handle_tap(json.loads(msg.payload), now)
            if now - last_tick >= 1.0:
                self.cube.tick(now)
                self._publish_state("Tick", now)
                last_tick = now
            time.sleep(0.05)
        for flow in coalescer.flush():
            self._handle_flow(_FlowEvent(flow.timestamp, flow))

    def _refresh_loop(self) -> None:
        while not self._stop.wait(self.config.ip2c_refresh_seconds):
            installed, error = self.geo.refresh(self.config.ip2c_path)
            payload = {"Outcome": "installed" if installed else "kept-previous",
                       "SourceVersion": self.geo.table.source_version}
            if error:
                payload["Error"] = error
            self._append("GeoRefresh", payload, time.time())


def run(config: GatewayConfig) -> int:
    gateway = Gateway(config)
    return gateway.run()


replay_verify = eventlog.replay_verify
