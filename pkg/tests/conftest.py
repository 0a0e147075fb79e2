from __future__ import annotations

import json
from pathlib import Path

import pytest

from privacycube.geo import GeoStore, load_ip2c
from privacycube.policy import load_corpus

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "privacycube" / "data"

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _acceptance_results.append((name, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in sorted(_acceptance_results):
        terminalreporter.write_line(f"{name}: {outcome}")


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def corpus_text() -> str:
    return (DATA_DIR / "corpus.json").read_text()


@pytest.fixture(scope="session")
def corpus(corpus_text):
    return load_corpus(corpus_text)


@pytest.fixture(scope="session")
def ip2c_text() -> str:
    return (DATA_DIR / "ip2c.csv").read_text()


@pytest.fixture(scope="session")
def ip2c_table(ip2c_text):
    return load_ip2c(ip2c_text, source_version="ip2c.csv", loaded_at=0.0)


@pytest.fixture()
def geo_store(ip2c_table):
    return GeoStore(ip2c_table)


def minimal_corpus(devices=None, rooms=None, prefixes=None) -> str:
    """One-device corpus JSON, overridable per test."""
    doc = {
        "local_prefixes": prefixes or ["192.168.1.0/24", "10.0.0.0/8"],
        "rooms": rooms if rooms is not None else {"LivingRoom": ["cam"]},
        "devices": devices if devices is not None else [minimal_device("cam")],
    }
    return json.dumps(doc)


def minimal_device(device_id: str, **overrides) -> dict:
    device = {
        "device_id": device_id,
        "display_name": device_id.title(),
        "device_icon": "camera",
        "policy_url": "https://example.test/privacy",
        "accent_color": "#123456",
        "bindings": [f"ip:10.0.0.{sum(map(ord, device_id)) % 200 + 10}"],
        "data_types": {"Visual": "PII", "Usage": "Neutral"},
        "access": ["ResourceOwner", "ServiceProvider"],
        "usage": ["Security", "Analytics"],
        "retention": "OneMonth",
        "cadence": "EventBased",
    }
    device.update(overrides)
    return device
