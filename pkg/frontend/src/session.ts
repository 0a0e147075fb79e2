// WebSocket session: applies snapshots by seq, queues taps while offline
// (up to 5 s), and reconnects with exponential backoff. No optimistic
// state: the UI changes only when the next snapshot arrives.

import { Envelope, Snapshot, TapPayload, validateEnvelope, validateSnapshot } from "./types.js";

const STATE_TOPIC = "privacycube/state";
const TAP_QUEUE_MS = 5000;
const BACKOFF_BASE_MS = 1000;
const BACKOFF_CAP_MS = 30000;

export interface SessionHooks {
  onSnapshot: (snapshot: Snapshot, seq: number) => void;
  onStatus?: (connected: boolean) => void;
  onToast?: (message: string) => void;
  onError?: (message: string) => void;
}

interface WebSocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  readyState: number;
  send(data: string): void;
  close(): void;
}

export type WsFactory = (url: string) => WebSocketLike;

interface QueuedTap {
  payload: TapPayload;
  timer: ReturnType<typeof setTimeout>;
}

export class UiSession {
  lastSeq = -1;
  connected = false;

  private ws: WebSocketLike | null = null;
  private queue: QueuedTap[] = [];
  private reconnectAttempts = 0;
  private closed = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private url: string,
    private hooks: SessionHooks,
    private wsFactory: WsFactory = (u) => new WebSocket(u) as unknown as WebSocketLike,
    private now: () => number = () => Date.now(),
  ) {}

  connect(): void {
    this.closed = false;
    const ws = this.wsFactory(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.connected = true;
      this.reconnectAttempts = 0;
      this.hooks.onStatus?.(true);
      this.flushQueue();
    };
    ws.onclose = () => {
      this.connected = false;
      this.hooks.onStatus?.(false);
      if (!this.closed) this.scheduleReconnect();
    };
    ws.onmessage = (ev) => this.handleMessage(String(ev.data));
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer) clearTimeout(this.reconnectTimer);
    this.ws?.close();
  }

  tap(room: string, slot: number): void {
    const payload: TapPayload = { room, slot, ts: this.now() / 1000 };
    if (this.connected && this.ws) {
      this.ws.send(JSON.stringify(payload));
      return;
    }
    const entry: QueuedTap = {
      payload,
      timer: setTimeout(() => {
        this.queue = this.queue.filter((q) => q !== entry);
        this.hooks.onToast?.("tap dropped: not connected");
      }, TAP_QUEUE_MS),
    };
    this.queue.push(entry);
  }

  private flushQueue(): void {
    for (const entry of this.queue.splice(0)) {
      clearTimeout(entry.timer);
      this.ws?.send(JSON.stringify(entry.payload));
    }
  }

  private handleMessage(raw: string): void {
    let envelope: Envelope;
    let snapshot: Snapshot;
    try {
      envelope = validateEnvelope(raw);
      if (envelope.topic !== STATE_TOPIC) return;
      snapshot = validateSnapshot(envelope.payload);
    } catch (err) {
      this.hooks.onError?.(String(err));
      return;           // previous frame stays up
    }
    if (envelope.seq <= this.lastSeq) return;   // stale snapshot
    this.lastSeq = envelope.seq;
    this.hooks.onSnapshot(snapshot, envelope.seq);
  }

  private scheduleReconnect(): void {
    const delay = Math.min(BACKOFF_BASE_MS * 2 ** this.reconnectAttempts,
                           BACKOFF_CAP_MS);
    this.reconnectAttempts += 1;
    this.reconnectTimer = setTimeout(() => this.connect(), delay);
  }
}
