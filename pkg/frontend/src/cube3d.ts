// Interactive cube: five face panels on a CSS-3D carousel with
// drag-to-rotate and face snapping, plus a flat all-faces layout.

const FACE_ANGLES = [0, -90, -180, -270];   // T, D, A, U around the Y axis
const SNAP = 90;

export class CubeView {
  private rotationY = 0;
  private dragging = false;
  private dragStartX = 0;
  private dragStartRotation = 0;
  flat = false;

  constructor(private container: HTMLElement) {
    container.addEventListener("pointerdown", (ev) => this.start(ev));
    container.addEventListener("pointermove", (ev) => this.move(ev));
    container.addEventListener("pointerup", () => this.end());
    container.addEventListener("pointercancel", () => this.end());
  }

  layout(): void {
    const scene = this.container;
    scene.classList.toggle("flat", this.flat);
    const faces = Array.from(
      scene.querySelectorAll<HTMLElement>(".faces > .face"));
    if (this.flat) {
      for (const face of faces) face.style.transform = "";
      return;
    }
    const radius = scene.clientWidth / 2 || 180;
    faces.forEach((face, i) => {
      if (i < 4) {
        face.style.transform =
          `rotateY(${-FACE_ANGLES[i]}deg) translateZ(${radius}px)`;
      } else {
        // L face lies on top, seen by tilting the cube
        face.style.transform = `rotateX(90deg) translateZ(${radius}px)`;
      }
    });
    this.apply();
  }

  toggleFlat(): void {
    this.flat = !this.flat;
    this.layout();
  }

  private apply(): void {
    const faces = this.container.querySelector<HTMLElement>(".faces");
    if (faces && !this.flat) {
      faces.style.transform = `rotateX(-12deg) rotateY(${this.rotationY}deg)`;
    }
  }

  private start(ev: PointerEvent): void {
    if (this.flat || (ev.target as HTMLElement).closest("button")) return;
    this.dragging = true;
    this.dragStartX = ev.clientX;
    this.dragStartRotation = this.rotationY;
  }

  private move(ev: PointerEvent): void {
    if (!this.dragging) return;
    this.rotationY = this.dragStartRotation + (ev.clientX - this.dragStartX) / 2;
    this.apply();
  }

  private end(): void {
    if (!this.dragging) return;
    this.dragging = false;
    this.rotationY = Math.round(this.rotationY / SNAP) * SNAP;
    this.apply();
  }
}
