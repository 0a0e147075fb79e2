// Wire types for the gateway's state stream. The UI renders these verbatim:
// every color and on/off decision arrives inside the snapshot.

export interface EmptySlot {
  Slot: number;
  State: "Empty";
}

export interface DeviceSlot {
  Slot: number;
  State: "Lit" | "Idle";
  DeviceId: string;
  DeviceName: string;
  Icon: string;
  AccentColor: string;
}

export type Slot = EmptySlot | DeviceSlot;

export interface RoomBadge {
  Room: string;
  ActiveDevices: number;
  Selected: boolean;
}

export interface Snapshot {
  SelectedRoom: string;
  Rooms: RoomBadge[];
  Faces: {
    T: Slot[];
    D: Record<string, string[]>;
    A: Record<string, boolean>;
    U: Record<string, boolean>;
    L: { Map: Record<string, boolean>; TimeBar: Record<string, boolean> };
  };
}

export interface Envelope {
  topic: string;
  payload: unknown;
  seq: number;
}

export interface TapPayload {
  room: string;
  slot: number;
  ts: number;
}

export class SchemaMismatch extends Error {}

function fail(path: string, why: string): never {
  throw new SchemaMismatch(`${path}: ${why}`);
}

function isRecord(x: unknown): x is Record<string, unknown> {
  return typeof x === "object" && x !== null && !Array.isArray(x);
}

export function validateEnvelope(raw: string): Envelope {
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch {
    fail("envelope", "not valid JSON");
  }
  if (!isRecord(parsed)) fail("envelope", "must be an object");
  if (typeof parsed.topic !== "string") fail("envelope.topic", "missing");
  if (typeof parsed.seq !== "number") fail("envelope.seq", "missing");
  return parsed as unknown as Envelope;
}

export function validateSnapshot(x: unknown): Snapshot {
  if (!isRecord(x)) fail("snapshot", "must be an object");
  if (typeof x.SelectedRoom !== "string") fail("SelectedRoom", "missing");
  if (!Array.isArray(x.Rooms)) fail("Rooms", "must be an array");
  if (!isRecord(x.Faces)) fail("Faces", "must be an object");
  const faces = x.Faces;
  if (!Array.isArray(faces.T) || faces.T.length !== 8) {
    fail("Faces.T", "must be 8 slots");
  }
  for (const [i, slot] of faces.T.entries()) {
    if (!isRecord(slot) || typeof slot.State !== "string") {
      fail(`Faces.T[${i}]`, "bad slot");
    }
    if (!["Empty", "Lit", "Idle"].includes(slot.State as string)) {
      fail(`Faces.T[${i}].State`, `unknown state ${slot.State}`);
    }
  }
  if (!isRecord(faces.D)) fail("Faces.D", "must be an object");
  for (const [tag, cells] of Object.entries(faces.D)) {
    if (!Array.isArray(cells) || cells.length !== 8) {
      fail(`Faces.D.${tag}`, "must be 8 cells");
    }
    for (const cell of cells) {
      if (!["Red", "Yellow", "Green", "Off"].includes(cell as string)) {
        fail(`Faces.D.${tag}`, `unknown cell color ${cell}`);
      }
    }
  }
  if (!isRecord(faces.A)) fail("Faces.A", "must be an object");
  if (!isRecord(faces.U)) fail("Faces.U", "must be an object");
  if (!isRecord(faces.L) || !isRecord((faces.L as Record<string, unknown>).Map) ||
      !isRecord((faces.L as Record<string, unknown>).TimeBar)) {
    fail("Faces.L", "must carry Map and TimeBar");
  }
  return x as unknown as Snapshot;
}
