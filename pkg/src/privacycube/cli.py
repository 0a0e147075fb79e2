"""Command-line entry point.

Exit codes: 0 ok, 1 replay divergence (--verify), 2 config error,
3 input error.
"""
from __future__ import annotations

import argparse
import os
import sys
from importlib import resources

from .eventlog import MalformedLog, replay_verify
from .gateway import ConfigError, Gateway, GatewayConfig, InputError, config_from_file

CONFIG_ENV = "PRIVACYCUBE_CONFIG"

EXIT_OK = 0
EXIT_DIVERGED = 1
EXIT_CONFIG = 2
EXIT_INPUT = 3


def bundled_data_path(name: str) -> str:
    return str(resources.files("privacycube").joinpath("data", name))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privacycube",
        description="Smart-home privacy notice gateway: monitors device "
                    "activity and drives the virtual cube state stream.")
    parser.add_argument("--config", help=f"config JSON (or ${CONFIG_ENV})")
    source = parser.add_argument_group("source (pick one)")
    source.add_argument("--capture", metavar="FILE", help="replay a libpcap capture file")
    source.add_argument("--flowlog", metavar="FILE", help="replay a JSONL flow log")
    source.add_argument("--live", metavar="IFACE", help="sniff a live interface")
    source.add_argument("--simulate", metavar="SCHEDULE", help="run a simulation schedule")
    parser.add_argument("--corpus", metavar="FILE", help="device policy corpus JSON "
                        "(default: bundled 17-device corpus)")
    parser.add_argument("--ip2c", metavar="FILE", help="IP range -> country CSV "
                        "(default: bundled sample table)")
    parser.add_argument("--continents", metavar="FILE", help="country -> continent overrides CSV")
    parser.add_argument("--broker", metavar="HOST:PORT", help="mirror topics to an MQTT broker")
    parser.add_argument("--listen", metavar="HOST:PORT", help="serve the WebSocket state stream")
    parser.add_argument("--log-dir", metavar="DIR", help="event log directory (default: logs)")
    parser.add_argument("--emit-window", metavar="S", type=float,
                        help="per-device notification window (default 60)")
    parser.add_argument("--led-timeout", metavar="S", type=float,
                        help="LED activity timeout (default 30)")
    parser.add_argument("--ip2c-refresh", metavar="S", type=float,
                        help="geo table refresh period (default 86400)")
    parser.add_argument("--sim-duration", metavar="S", type=float,
                        help="simulation horizon for schedules without a rotation")
    parser.add_argument("--serve", action="store_true",
                        help="keep the state stream alive after the source is exhausted")
    parser.add_argument("--verify", nargs=2, metavar=("LOGA", "LOGB"),
                        help="compare two event logs and exit")
    return parser


def _build_config(args: argparse.Namespace) -> GatewayConfig:
    kwargs: dict = {}
    config_path = args.config or os.environ.get(CONFIG_ENV)
    if config_path:
        kwargs.update(config_from_file(config_path))
    overrides = {
        "corpus_path": args.corpus,
        "ip2c_path": args.ip2c,
        "continents_path": args.continents,
        "capture_path": args.capture,
        "flowlog_path": args.flowlog,
        "live_interface": args.live,
        "schedule_path": args.simulate,
        "broker": args.broker,
        "listen": args.listen,
        "log_dir": args.log_dir,
        "emit_window_seconds": args.emit_window,
        "led_timeout_seconds": args.led_timeout,
        "ip2c_refresh_seconds": args.ip2c_refresh,
        "sim_duration": args.sim_duration,
    }
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    if args.serve:
        kwargs["serve"] = True
    kwargs.setdefault("corpus_path", bundled_data_path("corpus.json"))
    kwargs.setdefault("ip2c_path", bundled_data_path("ip2c.csv"))
    return GatewayConfig(**kwargs)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.verify:
        try:
            result = replay_verify(args.verify[0], args.verify[1])
        except MalformedLog as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        if result.equal:
            print("equal")
            return EXIT_OK
        print(f"diverged at seq {result.seq}: {result.reason}")
        return EXIT_DIVERGED

    try:
        config = _build_config(args)
        gateway = Gateway(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TypeError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    gateway.install_signal_handlers()
    print(f"event log: {gateway.run_dir}")
    try:
        return gateway.run()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
