// View model -> DOM. Renders the five faces into face containers that the
// cube3d module positions; the flat layout reuses the same nodes.
const DEVICE_GLYPHS = {
    light: "\u{1F4A1}", lock: "\u{1F512}", speaker: "\u{1F50A}", tv: "\u{1F4FA}",
    thermostat: "\u{1F321}", camera: "\u{1F4F7}", air_purifier: "\u{1F32C}",
    vacuum: "\u{1F9F9}", fridge: "\u{1F9CA}", coffee: "☕", fan: "\u{1F300}",
    faucet: "\u{1F6B0}", sleep_monitor: "\u{1F634}", mirror: "\u{1FA9E}",
    bath: "\u{1F6C1}", soap: "\u{1F9FC}", toothbrush: "\u{1FAA5}",
};
function el(tag, className, text = "") {
    const node = document.createElement(tag);
    node.className = className;
    if (text)
        node.textContent = text;
    return node;
}
function renderTop(vm, options) {
    const face = el("section", "face face-t");
    face.appendChild(el("h2", "face-label", "T"));
    const grid = el("div", "slot-grid");
    for (const slot of vm.top) {
        const button = el("button", "slot");
        button.dataset.slot = String(slot.Slot);
        if (slot.State === "Empty") {
            button.classList.add("empty");
            button.disabled = true;
        }
        else {
            button.classList.add(slot.State === "Lit" ? "lit" : "idle");
            button.dataset.deviceId = slot.DeviceId;
            button.title = slot.DeviceName;
            const accent = el("span", "accent");
            accent.style.background = slot.AccentColor;
            button.appendChild(accent);
            button.appendChild(el("span", "glyph", DEVICE_GLYPHS[slot.Icon] ?? "▢"));
            button.appendChild(el("span", "name", slot.DeviceName));
            button.addEventListener("click", () => options.onTap?.(vm.selectedRoom, slot.Slot));
        }
        grid.appendChild(button);
    }
    face.appendChild(grid);
    return face;
}
function renderTypes(vm) {
    const face = el("section", "face face-d");
    face.appendChild(el("h2", "face-label", "D"));
    for (const row of vm.dataTypes) {
        const line = el("div", "type-row");
        line.dataset.tag = row.tag;
        line.appendChild(el("span", "type-name", row.tag));
        const bar = el("span", "cells");
        for (const [i, color] of row.cells.entries()) {
            const cell = el("span", `cell ${color.toLowerCase()}`);
            cell.dataset.cell = String(i + 1);
            bar.appendChild(cell);
        }
        line.appendChild(bar);
        face.appendChild(line);
    }
    return face;
}
function renderIcons(label, cls, icons, glyphs) {
    const face = el("section", `face ${cls}`);
    face.appendChild(el("h2", "face-label", label));
    const grid = el("div", "icon-grid");
    for (const icon of icons) {
        const item = el("div", `icon ${icon.on ? "on" : "off"}`);
        item.dataset.name = icon.name;
        item.appendChild(el("span", "glyph", glyphs[icon.name] ?? "•"));
        item.appendChild(el("span", "name", icon.name));
        grid.appendChild(item);
    }
    face.appendChild(grid);
    return face;
}
const ACCESS_GLYPHS = {
    ResourceOwner: "\u{1F3E0}", TrustedParty: "\u{1F91D}",
    ServiceProvider: "\u{1F6E0}", DeviceManufacturer: "\u{1F3ED}",
    LawEnforcement: "⚖", Public: "\u{1F310}", ThirdParty: "\u{1F465}",
    MarketingOrganisation: "\u{1F4E3}",
};
const USAGE_GLYPHS = {
    Revenue: "\u{1F4B0}", Analytics: "\u{1F4CA}", Research: "\u{1F52C}",
    Surveillance: "\u{1F441}", Security: "\u{1F6E1}", TargetedAds: "\u{1F3AF}",
    Lifestyle: "\u{1F6CB}", Productivity: "⏱",
};
function renderLocation(vm) {
    const face = el("section", "face face-l");
    face.appendChild(el("h2", "face-label", "L"));
    const map = el("div", "world-map");
    for (const region of vm.map) {
        const block = el("div", `region region-${region.name.toLowerCase()} ${region.on ? "on" : "off"}`, region.name);
        block.dataset.region = region.name;
        map.appendChild(block);
    }
    face.appendChild(map);
    const bar = el("div", "time-bar");
    for (const segment of vm.timeBar) {
        const node = el("div", `segment ${segment.on ? "on" : "off"}`);
        node.dataset.period = segment.name;
        node.appendChild(el("span", "name", segment.name));
        bar.appendChild(node);
    }
    face.appendChild(bar);
    return face;
}
function renderRooms(vm, options) {
    const nav = el("nav", "rooms");
    for (const tab of vm.rooms) {
        const button = el("button", `room ${tab.selected ? "selected" : ""}`);
        button.dataset.room = tab.room;
        button.appendChild(el("span", "name", tab.room));
        button.appendChild(el("span", "badge", String(tab.activeDevices)));
        button.addEventListener("click", () => options.onTap?.(tab.room, 0));
        nav.appendChild(button);
    }
    return nav;
}
export function render(vm, root, options) {
    root.replaceChildren();
    root.classList.toggle("colorblind", options.colorblind);
    root.appendChild(renderRooms(vm, options));
    const faces = el("div", "faces");
    faces.appendChild(renderTop(vm, options));
    faces.appendChild(renderTypes(vm));
    faces.appendChild(renderIcons("A", "face-a", vm.access, ACCESS_GLYPHS));
    faces.appendChild(renderIcons("U", "face-u", vm.usage, USAGE_GLYPHS));
    faces.appendChild(renderLocation(vm));
    root.appendChild(faces);
}
export function showErrorBanner(root, message) {
    let banner = root.querySelector(".error-banner");
    if (!banner) {
        banner = el("div", "error-banner");
        root.prepend(banner);
    }
    banner.textContent = message;
}
export function clearErrorBanner(root) {
    root.querySelector(".error-banner")?.remove();
}
//# sourceMappingURL=render.js.map