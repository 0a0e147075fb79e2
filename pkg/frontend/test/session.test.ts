// Criterion test: the UI applies the golden snapshot from the bridge,
// emits the exact tap JSON, and changes state only on the next snapshot.
import { readFileSync } from "node:fs";
import { AddressInfo } from "node:net";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { WebSocket, WebSocketServer } from "ws";

import { UiSession } from "../src/session.js";
import { Snapshot } from "../src/types.js";
import { litSets, toViewModel } from "../src/viewmodel.js";

function fixture(name: string): string {
  return readFileSync(new URL(`../fixtures/${name}`, import.meta.url), "utf-8");
}

function until(cond: () => boolean, ms = 4000): Promise<void> {
  return new Promise((resolve, reject) => {
    const started = Date.now();
    const poll = () => {
      if (cond()) return resolve();
      if (Date.now() - started > ms) return reject(new Error("timeout"));
      setTimeout(poll, 10);
    };
    poll();
  });
}

describe("UiSession against a mock bridge", () => {
  let server: WebSocketServer;
  let url: string;
  let received: string[];
  let conn: WebSocket | null;

  beforeEach(async () => {
    server = new WebSocketServer({ host: "127.0.0.1", port: 0 });
    received = [];
    conn = null;
    server.on("connection", (socket) => {
      conn = socket;
      socket.on("message", (data) => received.push(String(data)));
    });
    await until(() => server.address() !== null);
    const { port } = server.address() as AddressInfo;
    url = `ws://127.0.0.1:${port}`;
  });

  afterEach(() => {
    server.close();
  });

  function makeSession() {
    const snapshots: { snapshot: Snapshot; seq: number }[] = [];
    const toasts: string[] = [];
    const errors: string[] = [];
    const session = new UiSession(
      url,
      {
        onSnapshot: (snapshot, seq) => snapshots.push({ snapshot, seq }),
        onToast: (m) => toasts.push(m),
        onError: (m) => errors.push(m),
      },
      (u) => new WebSocket(u) as never,
      () => 1700000005_000,
    );
    return { session, snapshots, toasts, errors };
  }

  it("renders the golden lit sets, taps slot 2 exactly, and stays "
     + "non-optimistic until the next snapshot", async () => {
    const { session, snapshots } = makeSession();
    session.connect();
    await until(() => conn !== null);

    // bridge replays the fresh snapshot, then the golden one
    conn!.send(fixture("fresh_snapshot.json"));
    await until(() => snapshots.length === 1);
    expect(litSets(toViewModel(snapshots[0].snapshot)).slots).toEqual([]);

    conn!.send(fixture("golden_snapshot.json"));
    await until(() => snapshots.length === 2);
    const lit = litSets(toViewModel(snapshots[1].snapshot));
    expect(lit.slots).toEqual([2]);
    expect(lit.cellsByTag.Location).toEqual([2]);
    expect(new Set(lit.access)).toEqual(new Set([
      "ResourceOwner", "TrustedParty", "ServiceProvider", "DeviceManufacturer",
      "LawEnforcement", "ThirdParty", "MarketingOrganisation"]));
    expect(lit.usage).toHaveLength(8);
    expect(lit.map).toEqual(["NA"]);
    expect(lit.timeBar).toEqual(["OneYear"]);

    session.tap("LivingRoom", 2);
    await until(() => received.length === 1);
    expect(JSON.parse(received[0])).toEqual(
      { room: "LivingRoom", slot: 2, ts: 1700000005 });
    // no optimistic state: nothing changed client-side yet
    expect(snapshots).toHaveLength(2);

    session.close();
  });

  it("turns the icon green only after the next snapshot arrives", async () => {
    const { session, snapshots } = makeSession();
    session.connect();
    await until(() => conn !== null);

    conn!.send(fixture("fresh_snapshot.json"));
    await until(() => snapshots.length === 1);
    expect(litSets(toViewModel(snapshots[0].snapshot)).slots).toEqual([]);

    session.tap("LivingRoom", 2);
    await until(() => received.length === 1);
    expect(snapshots).toHaveLength(1);   // still idle: tap echoed nothing yet

    conn!.send(fixture("lock_selected_snapshot.json"));
    await until(() => snapshots.length === 2);
    const vm = toViewModel(snapshots[1].snapshot);
    expect(vm.top[1].State).toBe("Lit");
    expect(litSets(vm).slots).toEqual([2]);

    session.close();
  });

  it("discards stale snapshots with lower seq", async () => {
    const { session, snapshots } = makeSession();
    session.connect();
    await until(() => conn !== null);
    conn!.send(fixture("golden_snapshot.json"));   // seq 3
    await until(() => snapshots.length === 1);
    conn!.send(fixture("fresh_snapshot.json"));    // seq 1: stale
    await new Promise((r) => setTimeout(r, 100));
    expect(snapshots).toHaveLength(1);
    expect(session.lastSeq).toBe(3);
    session.close();
  });

  it("reports schema mismatches and keeps the previous frame", async () => {
    const { session, snapshots, errors } = makeSession();
    session.connect();
    await until(() => conn !== null);
    conn!.send(fixture("golden_snapshot.json"));
    await until(() => snapshots.length === 1);
    conn!.send(JSON.stringify({ topic: "privacycube/state", seq: 9,
                                payload: { bogus: true } }));
    await until(() => errors.length === 1);
    expect(snapshots).toHaveLength(1);
    session.close();
  });

  it("drops taps queued beyond five seconds with a toast", async () => {
    vi.useFakeTimers();
    try {
      const toasts: string[] = [];
      const session = new UiSession(
        "ws://127.0.0.1:1",   // never connects
        { onSnapshot: () => {}, onToast: (m) => toasts.push(m) },
        () => ({ onopen: null, onclose: null, onmessage: null,
                 readyState: 3, send: () => {}, close: () => {} }),
      );
      session.tap("Kitchen", 1);
      vi.advanceTimersByTime(4999);
      expect(toasts).toHaveLength(0);
      vi.advanceTimersByTime(2);
      expect(toasts).toEqual(["tap dropped: not connected"]);
    } finally {
      vi.useRealTimers();
    }
  });

  it("flushes a tap queued briefly before connecting", async () => {
    const { session } = makeSession();
    session.tap("Kitchen", 1);    // queued: not yet connected
    session.connect();
    await until(() => received.length === 1);
    expect(JSON.parse(received[0]).room).toBe("Kitchen");
    session.close();
  });

  it("reconnects with backoff after a drop", async () => {
    vi.useFakeTimers();
    try {
      let attempts = 0;
      let socket: { onopen: null | (() => void); onclose: null | (() => void);
                    onmessage: null; readyState: number;
                    send: () => void; close: () => void };
      const factory = () => {
        attempts += 1;
        socket = { onopen: null, onclose: null, onmessage: null,
                   readyState: 0, send: () => {}, close: () => {} };
        return socket as never;
      };
      const session = new UiSession("ws://x", { onSnapshot: () => {} }, factory);
      session.connect();
      expect(attempts).toBe(1);
      socket!.onclose!();              // dropped: schedule retry at 1 s
      vi.advanceTimersByTime(999);
      expect(attempts).toBe(1);
      vi.advanceTimersByTime(2);
      expect(attempts).toBe(2);
      socket!.onclose!();              // second retry at 2 s
      vi.advanceTimersByTime(2001);
      expect(attempts).toBe(3);
      session.close();
    } finally {
      vi.useRealTimers();
    }
  });
});
