// WebSocket session: applies snapshots by seq, queues taps while offline
// (up to 5 s), and reconnects with exponential backoff. No optimistic
// state: the UI changes only when the next snapshot arrives.
import { validateEnvelope, validateSnapshot } from "./types.js";
const STATE_TOPIC = "privacycube/state";
const TAP_QUEUE_MS = 5000;
const BACKOFF_BASE_MS = 1000;
const BACKOFF_CAP_MS = 30000;
export class UiSession {
    constructor(url, hooks, wsFactory = (u) => new WebSocket(u), now = () => Date.now()) {
        this.url = url;
        this.hooks = hooks;
        this.wsFactory = wsFactory;
        this.now = now;
        this.lastSeq = -1;
        this.connected = false;
        this.ws = null;
        this.queue = [];
        this.reconnectAttempts = 0;
        this.closed = false;
        this.reconnectTimer = null;
    }
    connect() {
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
            if (!this.closed)
                this.scheduleReconnect();
        };
        ws.onmessage = (ev) => this.handleMessage(String(ev.data));
    }
    close() {
        this.closed = true;
        if (this.reconnectTimer)
            clearTimeout(this.reconnectTimer);
        this.ws?.close();
    }
    tap(room, slot) {
        const payload = { room, slot, ts: this.now() / 1000 };
        if (this.connected && this.ws) {
            this.ws.send(JSON.stringify(payload));
            return;
        }
        const entry = {
            payload,
            timer: setTimeout(() => {
                this.queue = this.queue.filter((q) => q !== entry);
                this.hooks.onToast?.("tap dropped: not connected");
            }, TAP_QUEUE_MS),
        };
        this.queue.push(entry);
    }
    flushQueue() {
        for (const entry of this.queue.splice(0)) {
            clearTimeout(entry.timer);
            this.ws?.send(JSON.stringify(entry.payload));
        }
    }
    handleMessage(raw) {
        let envelope;
        let snapshot;
        try {
            envelope = validateEnvelope(raw);
            if (envelope.topic !== STATE_TOPIC)
                return;
            snapshot = validateSnapshot(envelope.payload);
        }
        catch (err) {
            this.hooks.onError?.(String(err));
            return; // previous frame stays up
        }
        if (envelope.seq <= this.lastSeq)
            return; // stale snapshot
        this.lastSeq = envelope.seq;
        this.hooks.onSnapshot(snapshot, envelope.seq);
    }
    scheduleReconnect() {
        const delay = Math.min(BACKOFF_BASE_MS * 2 ** this.reconnectAttempts, BACKOFF_CAP_MS);
        this.reconnectAttempts += 1;
        this.reconnectTimer = setTimeout(() => this.connect(), delay);
    }
}
//# sourceMappingURL=session.js.map