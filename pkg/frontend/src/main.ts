import { CubeView } from "./cube3d.js";
import { clearErrorBanner, render, showErrorBanner } from "./render.js";
import { UiSession } from "./session.js";
import { toViewModel } from "./viewmodel.js";

const params = new URLSearchParams(location.search);
const url = params.get("ws") ?? `ws://${location.hostname || "127.0.0.1"}:8765`;

const root = document.getElementById("app")!;
const scene = document.getElementById("scene")!;
const status = document.getElementById("status")!;
const toast = document.getElementById("toast")!;

let colorblind = false;
const cube = new CubeView(scene);

const session = new UiSession(url, {
  onSnapshot: (snapshot) => {
    clearErrorBanner(root);
    render(toViewModel(snapshot), root, {
      colorblind,
      onTap: (room, slot) => session.tap(room, slot),
    });
    cube.layout();
  },
  onStatus: (connected) => {
    status.textContent = connected ? `connected to ${url}` : "disconnected";
    status.className = connected ? "ok" : "down";
  },
  onToast: (message) => {
    toast.textContent = message;
    toast.classList.add("visible");
    setTimeout(() => toast.classList.remove("visible"), 4000);
  },
  onError: (message) => showErrorBanner(root, message),
});

document.getElementById("flat-toggle")!.addEventListener("click", () =>
  cube.toggleFlat());
document.getElementById("cb-toggle")!.addEventListener("click", () => {
  colorblind = !colorblind;
  root.classList.toggle("colorblind", colorblind);
});

session.connect();
