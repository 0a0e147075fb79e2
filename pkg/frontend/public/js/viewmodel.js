// Pure snapshot -> view model projection. Fixed display orders only; no
// policy decisions happen here.
export const DATA_TYPE_ORDER = [
    "Location", "Presence", "Visual", "Audio",
    "Biometrics", "Health", "Usage", "Environment",
];
export const ACCESS_ORDER = [
    "ResourceOwner", "TrustedParty", "ServiceProvider", "DeviceManufacturer",
    "LawEnforcement", "Public", "ThirdParty", "MarketingOrganisation",
];
export const USAGE_ORDER = [
    "Revenue", "Analytics", "Research", "Surveillance",
    "Security", "TargetedAds", "Lifestyle", "Productivity",
];
export const TIME_BAR_ORDER = [
    "EventBased", "OneMonth", "ThreeMonths", "OneYear", "Indefinite",
];
// AN exists in the snapshot but the map face does not draw Antarctica.
export const MAP_ORDER = ["NA", "SA", "EU", "AF", "AS", "OC"];
export function toViewModel(snapshot) {
    const faces = snapshot.Faces;
    return {
        selectedRoom: snapshot.SelectedRoom,
        rooms: snapshot.Rooms.map((r) => ({
            room: r.Room,
            activeDevices: r.ActiveDevices,
            selected: r.Selected,
        })),
        top: faces.T,
        dataTypes: DATA_TYPE_ORDER.map((tag) => ({
            tag,
            cells: faces.D[tag] ?? Array(8).fill("Off"),
        })),
        access: ACCESS_ORDER.map((name) => ({ name, on: faces.A[name] === true })),
        usage: USAGE_ORDER.map((name) => ({ name, on: faces.U[name] === true })),
        map: MAP_ORDER.map((name) => ({ name, on: faces.L.Map[name] === true })),
        timeBar: TIME_BAR_ORDER.map((name) => ({
            name,
            on: faces.L.TimeBar[name] === true,
        })),
    };
}
export function litSets(vm) {
    return {
        slots: vm.top.filter((s) => s.State === "Lit").map((s) => s.Slot),
        cellsByTag: Object.fromEntries(vm.dataTypes.map((row) => [
            row.tag,
            row.cells.flatMap((c, i) => (c === "Off" ? [] : [i + 1])),
        ])),
        access: vm.access.filter((i) => i.on).map((i) => i.name),
        usage: vm.usage.filter((i) => i.on).map((i) => i.name),
        map: vm.map.filter((i) => i.on).map((i) => i.name),
        timeBar: vm.timeBar.filter((i) => i.on).map((i) => i.name),
    };
}
//# sourceMappingURL=viewmodel.js.map