// Interactive cube: five face panels on a CSS-3D carousel with
// drag-to-rotate and face snapping, plus a flat all-faces layout.
const FACE_ANGLES = [0, -90, -180, -270]; // T, D, A, U around the Y axis
const SNAP = 90;
export class CubeView {
    constructor(container) {
        this.container = container;
        this.rotationY = 0;
        this.dragging = false;
        this.dragStartX = 0;
        this.dragStartRotation = 0;
        this.flat = false;
        container.addEventListener("pointerdown", (ev) => this.start(ev));
        container.addEventListener("pointermove", (ev) => this.move(ev));
        container.addEventListener("pointerup", () => this.end());
        container.addEventListener("pointercancel", () => this.end());
    }
    layout() {
        const scene = this.container;
        scene.classList.toggle("flat", this.flat);
        const faces = Array.from(scene.querySelectorAll(".faces > .face"));
        if (this.flat) {
            for (const face of faces)
                face.style.transform = "";
            return;
        }
        const radius = scene.clientWidth / 2 || 180;
        faces.forEach((face, i) => {
            if (i < 4) {
                face.style.transform =
                    `rotateY(${-FACE_ANGLES[i]}deg) translateZ(${radius}px)`;
            }
            else {
                // L face lies on top, seen by tilting the cube
                face.style.transform = `rotateX(90deg) translateZ(${radius}px)`;
            }
        });
        this.apply();
    }
    toggleFlat() {
        this.flat = !this.flat;
        this.layout();
    }
    apply() {
        const faces = this.container.querySelector(".faces");
        if (faces && !this.flat) {
            faces.style.transform = `rotateX(-12deg) rotateY(${this.rotationY}deg)`;
        }
    }
    start(ev) {
        if (this.flat || ev.target.closest("button"))
            return;
        this.dragging = true;
        this.dragStartX = ev.clientX;
        this.dragStartRotation = this.rotationY;
    }
    move(ev) {
        if (!this.dragging)
            return;
        this.rotationY = this.dragStartRotation + (ev.clientX - this.dragStartX) / 2;
        this.apply();
    }
    end() {
        if (!this.dragging)
            return;
        this.dragging = false;
        this.rotationY = Math.round(this.rotationY / SNAP) * SNAP;
        this.apply();
    }
}
//# sourceMappingURL=cube3d.js.map