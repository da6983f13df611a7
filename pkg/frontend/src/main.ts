/** DOM wiring: shape picker, canvas, pointer capture, record controls. */
import { draw } from "./render.js";
import { fetchScenes, objectContextFor, type SceneCatalog, type SceneShape } from "./scene.js";
import { SessionController } from "./session.js";

const SERVICE_HTTP = `${location.protocol}//${location.hostname}:8099`;
const SERVICE_WS = `ws://${location.hostname}:8099/session`;

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const shapeSelect = document.getElementById("shape") as HTMLSelectElement;
const jitterInput = document.getElementById("jitter") as HTMLInputElement;
const recordLabel = document.getElementById("record-label") as HTMLSelectElement;
const recordButton = document.getElementById("record") as HTMLButtonElement;
const downloadButton = document.getElementById("download") as HTMLButtonElement;
const statusLine = document.getElementById("status") as HTMLElement;

const CENTER: [number, number] = [canvas.width / 2, canvas.height / 2 - 40];

let catalog: SceneCatalog | null = null;
let shape: SceneShape | null = null;
let controller: SessionController | null = null;
let recordingActive = false;

function startSession(): void {
  if (catalog === null) return;
  controller?.close();
  shape = catalog.shapes[shapeSelect.value];
  controller = new SessionController({
    url: SERVICE_WS,
    object: objectContextFor(shape, CENTER),
    jitterPx: Number(jitterInput.value),
  });
  controller.connect(performance.now());
}

async function boot(): Promise<void> {
  try {
    catalog = await fetchScenes(SERVICE_HTTP);
  } catch (err) {
    statusLine.textContent = `service unreachable (${err}); retrying...`;
    setTimeout(boot, 1500);
    return;
  }
  for (const sid of [...catalog.train_shapes, ...catalog.test_shapes]) {
    const opt = document.createElement("option");
    opt.value = sid;
    opt.textContent = `${sid} (${catalog.shapes[sid].role})`;
    shapeSelect.appendChild(opt);
  }
  shapeSelect.onchange = startSession;
  jitterInput.onchange = startSession;
  startSession();
}

canvas.addEventListener("pointermove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  controller?.setPointer(ev.clientX - rect.left, ev.clientY - rect.top);
});
canvas.addEventListener("pointerleave", () => controller?.setPointer(null, null));

recordButton.addEventListener("click", () => {
  if (controller === null) return;
  if (!recordingActive) {
    controller.startRecording(recordLabel.value as "GRASP" | "VIEW");
    recordButton.textContent = "stop recording";
    recordingActive = true;
  } else {
    const line = controller.stopRecording();
    recordButton.textContent = "record trial";
    recordingActive = false;
    statusLine.textContent = line === null ? "trial empty, discarded" : "trial saved";
  }
});

downloadButton.addEventListener("click", () => {
  if (controller === null) return;
  const blob = new Blob([controller.datasetText()], { type: "application/jsonl" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "recorded_trials.jsonl";
  a.click();
  URL.revokeObjectURL(a.href);
});

function frame(): void {
  const now = performance.now();
  controller?.advance(now);
  if (controller !== null) {
    draw(canvas, controller.state, shape, CENTER, now);
    if (!recordingActive) {
      statusLine.textContent =
        controller.state.phase === "streaming"
          ? `streaming (${controller.state.fixations.length} fixations on screen)`
          : `${controller.state.phase}${controller.state.lastError ? `: ${controller.state.lastError}` : ""}`;
    }
  }
  requestAnimationFrame(frame);
}

boot();
requestAnimationFrame(frame);
