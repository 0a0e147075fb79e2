// Wire types for the gateway's state stream. The UI renders these verbatim:
// every color and on/off decision arrives inside the snapshot.
export class SchemaMismatch extends Error {
}
function fail(path, why) {
    throw new SchemaMismatch(`${path}: ${why}`);
}
function isRecord(x) {
    return typeof x === "object" && x !== null && !Array.isArray(x);
}
export function validateEnvelope(raw) {
    let parsed;
    try {
        parsed = JSON.parse(raw);
    }
    catch {
        fail("envelope", "not valid JSON");
    }
    if (!isRecord(parsed))
        fail("envelope", "must be an object");
    if (typeof parsed.topic !== "string")
        fail("envelope.topic", "missing");
    if (typeof parsed.seq !== "number")
        fail("envelope.seq", "missing");
    return parsed;
}
export function validateSnapshot(x) {
    if (!isRecord(x))
        fail("snapshot", "must be an object");
    if (typeof x.SelectedRoom !== "string")
        fail("SelectedRoom", "missing");
    if (!Array.isArray(x.Rooms))
        fail("Rooms", "must be an array");
    if (!isRecord(x.Faces))
        fail("Faces", "must be an object");
    const faces = x.Faces;
    if (!Array.isArray(faces.T) || faces.T.length !== 8) {
        fail("Faces.T", "must be 8 slots");
    }
    for (const [i, slot] of faces.T.entries()) {
        if (!isRecord(slot) || typeof slot.State !== "string") {
            fail(`Faces.T[${i}]`, "bad slot");
        }
        if (!["Empty", "Lit", "Idle"].includes(slot.State)) {
            fail(`Faces.T[${i}].State`, `unknown state ${slot.State}`);
        }
    }
    if (!isRecord(faces.D))
        fail("Faces.D", "must be an object");
    for (const [tag, cells] of Object.entries(faces.D)) {
        if (!Array.isArray(cells) || cells.length !== 8) {
            fail(`Faces.D.${tag}`, "must be 8 cells");
        }
        for (const cell of cells) {
            if (!["Red", "Yellow", "Green", "Off"].includes(cell)) {
                fail(`Faces.D.${tag}`, `unknown cell color ${cell}`);
            }
        }
    }
    if (!isRecord(faces.A))
        fail("Faces.A", "must be an object");
    if (!isRecord(faces.U))
        fail("Faces.U", "must be an object");
    if (!isRecord(faces.L) || !isRecord(faces.L.Map) ||
        !isRecord(faces.L.TimeBar)) {
        fail("Faces.L", "must carry Map and TimeBar");
    }
    return x;
}
//# sourceMappingURL=types.js.map