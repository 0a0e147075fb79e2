"""Minimal MQTT 3.1.1 publisher (QoS 0) for external-broker interop.

The embedded bus is the default transport; this client exists so the same
canonical payloads can be mirrored to a standard broker when one is
configured. Publish-only, clean session, no keepalive pings (the gateway
publishes frequently enough or disconnects).
"""
from __future__ import annotations

import socket
import struct


class MqttError(ConnectionError):
    pass


def _varint(n: int) -> bytes:
    out = bytearray()
    while True:
        byte = n % 128
        n //= 128
        if n:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def _utf8(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack(">H", len(raw)) + raw


def connect_packet(client_id: str, keepalive: int = 60) -> bytes:
    variable = _utf8("MQTT") + bytes([0x04, 0x02]) + struct.pack(">H", keepalive)
    payload = _utf8(client_id)
    body = variable + payload
    return bytes([0x10]) + _varint(len(body)) + body


def publish_packet(topic: str, payload: bytes) -> bytes:
    body = _utf8(topic) + payload
    return bytes([0x30]) + _varint(len(body)) + body


DISCONNECT_PACKET = bytes([0xE0, 0x00])


class MqttPublisher:
    def __init__(self, host: str, port: int, client_id: str = "privacycube-gateway",
                 timeout: float = 5.0):
        self.host = host
        self.port = port
        self.client_id = client_id
        self.timeout = timeout
        self._sock: socket.socket | None = None

    def connect(self) -> None:
        try:
            sock = socket.create_connection((self.host, self.port), timeout=self.timeout)
        except OSError as exc:
            raise MqttError(f"cannot reach broker {self.host}:{self.port}: {exc}")
        sock.sendall(connect_packet(self.client_id))
        ack = self._recv_exact(sock, 4)
        if ack[0] != 0x20 or ack[3] != 0x00:
            sock.close()
            raise MqttError(f"broker refused connection (CONNACK {ack.hex()})")
        self._sock = sock

    def publish(self, topic: str, payload: bytes) -> None:
        if self._sock is None:
            raise MqttError("not connected")
        try:
            self._sock.sendall(publish_packet(topic, payload))
        except OSError as exc:
            raise MqttError(f"publish failed: {exc}")

    def close(self) -> None:
        if self._sock is not None:
            try:
                self._sock.sendall(DISCONNECT_PACKET)
            except OSError:
                pass
            self._sock.close()
            self._sock = None

    @staticmethod
    def _recv_exact(sock: socket.socket, n: int) -> bytes:
        buf = b""
        while len(buf) < n:
            chunk = sock.recv(n - len(buf))
            if not chunk:
                raise MqttError("broker closed the connection during handshake")
            buf += chunk
        return buf

    def __enter__(self):
        self.connect()
        return self

    def __exit__(self, *exc):
        self.close()
