/**
 * Steering panel wiring: WebSocket stream in, control messages out, canvas
 * heatmap with per-block flash overlay, live log-log histogram, shuffling
 * media panel, and corpus grain playback through WebAudio. All display
 * logic lives in the pure modules; this file only touches the DOM.
 */

import { GrainScheduler, playGrain } from "./audio.js";
import { GridSnapshot, parseSnapshot, valueColor } from "./heatmap.js";
import { MediaPanel, placeholderImages } from "./media.js";
import { decodeMessage, encodeMessage, GrainsMessage, Message } from "./protocol.js";
import {
  applyMessage, decayFlashes, flashIntensity, logBinnedHistogram, mediaMode,
  newViewState, siteKey, ViewState,
} from "./state.js";
import { DriveThrottle } from "./throttle.js";

const state: ViewState = newViewState();
let socket: WebSocket | null = null;
let throttle = new DriveThrottle(0.05);
let scheduler = new GrainScheduler(0.05);
let audioCtx: AudioContext | null = null;
let corpusBuffer: AudioBuffer | null = null;
let snapshot: GridSnapshot | null = null;
let dragging = false;
let dragOrigin: [number, number] = [0, 0];

const $ = (id: string) => document.getElementById(id)!;
const gridCanvas = $("grid") as HTMLCanvasElement;
const histCanvas = $("hist") as HTMLCanvasElement;
const mediaImg = $("media") as HTMLImageElement;
const statusEl = $("status");
const statsEl = $("stats");
const bannerEl = $("banner");
const media = new MediaPanel(placeholderImages(24));

function send(msg: Message): void {
  if (socket && socket.readyState === WebSocket.OPEN) {
    socket.send(encodeMessage(msg));
  }
}

function setStatus(text: string): void {
  statusEl.textContent = text;
}

function connect(): void {
  const url = `ws://${location.host}/session`;
  state.connection = "connecting";
  setStatus(`connecting to ${url}`);
  socket = new WebSocket(url);
  socket.addEventListener("open", () => {
    state.connection = "open";
    setStatus("connected");
    send({ t: "hello" });
  });
  socket.addEventListener("message", (event) => {
    for (const line of String(event.data).split("\n")) {
      if (!line.trim()) continue;
      let msg: Message;
      try {
        msg = decodeMessage(line);
      } catch (err) {
        state.errorBanner = (err as Error).message;
        continue;
      }
      handleMessage(msg);
    }
  });
  socket.addEventListener("close", () => {
    state.connection = "closed";
    setStatus("disconnected, retrying in 2 s");
    setTimeout(connect, 2000);
  });
  socket.addEventListener("error", () => {
    state.connection = "error";
  });
}

function handleMessage(msg: Message): void {
  applyMessage(state, msg, performance.now());
  if (msg.t === "config") {
    const tick = Number((state.config?.tick_seconds as number) ?? 0.05);
    throttle = new DriveThrottle(tick);
    scheduler = new GrainScheduler(tick);
    void loadCorpus();
  } else if (msg.t === "grains" && audioCtx && corpusBuffer) {
    const grains = msg as GrainsMessage;
    for (const grain of scheduler.schedule(grains.k, grains.entries, audioCtx.currentTime)) {
      playGrain(audioCtx, corpusBuffer, grain);
    }
  }
}

async function loadCorpus(): Promise<void> {
  if (corpusBuffer || !state.config?.corpus) return;
  try {
    const resp = await fetch("/corpus");
    if (!resp.ok) return;
    audioCtx = audioCtx ?? new AudioContext();
    corpusBuffer = await audioCtx.decodeAudioData(await resp.arrayBuffer());
  } catch {
    corpusBuffer = null; // audio stays off; the panel still works
  }
}

async function pollSnapshot(): Promise<void> {
  try {
    const resp = await fetch("/snapshot");
    if (resp.ok) {
      snapshot = parseSnapshot(await resp.text());
    }
  } catch {
    /* endpoint not ready yet */
  }
  setTimeout(pollSnapshot, 500);
}

function drawGrid(nowMs: number): void {
  const ctx = gridCanvas.getContext("2d")!;
  const { width, height } = gridCanvas;
  ctx.clearRect(0, 0, width, height);
  if (!snapshot) return;
  const cw = width / snapshot.cols;
  const ch = height / snapshot.rows;
  for (let r = 0; r < snapshot.rows; r++) {
    for (let c = 0; c < snapshot.cols; c++) {
      const v = snapshot.values[r * snapshot.cols + c] ?? 0;
      const [red, green, blue] = valueColor(v, snapshot.ceiling);
      ctx.fillStyle = `rgb(${red},${green},${blue})`;
      ctx.fillRect(c * cw, r * ch, cw - 1, ch - 1);
      const key = snapshot.kind === "oslo" ? siteKey([c]) : siteKey([r, c]);
      const glow = flashIntensity(state, key, nowMs);
      if (glow > 0) {
        ctx.fillStyle = `rgba(255,255,255,${glow.toFixed(3)})`;
        ctx.fillRect(c * cw, r * ch, cw - 1, ch - 1);
      }
    }
  }
}

function drawHistogram(): void {
  const ctx = histCanvas.getContext("2d")!;
  const { width, height } = histCanvas;
  ctx.clearRect(0, 0, width, height);
  const points = logBinnedHistogram(state.sizeCounts);
  if (points.length === 0) return;
  const xs = points.map((p) => Math.log10(p.center));
  const ys = points.map((p) => Math.log10(p.density));
  const xMin = Math.min(...xs), xMax = Math.max(...xs, xMin + 1);
  const yMin = Math.min(...ys), yMax = Math.max(...ys, yMin + 1);
  ctx.fillStyle = "#9fd3ff";
  for (let i = 0; i < points.length; i++) {
    const px = 8 + ((xs[i] - xMin) / (xMax - xMin)) * (width - 16);
    const py = height - 8 - ((ys[i] - yMin) / (yMax - yMin)) * (height - 16);
    ctx.fillRect(px - 2, py - 2, 4, 4);
  }
}

function frame(): void {
  const nowMs = performance.now();
  decayFlashes(state, nowMs);
  const pending = throttle.poll(nowMs);
  if (pending) send({ t: "control.set_drive", v: pending });
  drawGrid(nowMs);
  drawHistogram();
  mediaImg.src = media.advance(mediaMode(state, nowMs) === "shuffling");
  bannerEl.textContent = state.errorBanner ?? "";
  bannerEl.style.display = state.errorBanner ? "block" : "none";
  if (state.stats) {
    const s = state.stats;
    statsEl.textContent =
      `tick ${state.tick} | events ${state.totalEvents}` +
      (s.tau != null ? ` | tau ${Number(s.tau).toFixed(3)}` : "") +
      (s.decades != null ? ` | decades ${Number(s.decades).toFixed(2)}` : "");
  } else {
    statsEl.textContent = `tick ${state.tick} | events ${state.totalEvents}`;
  }
  requestAnimationFrame(frame);
}

function canvasVector(e: PointerEvent): [number, number] {
  const rect = gridCanvas.getBoundingClientRect();
  const scale = 60 / Math.max(rect.width, rect.height);
  return [
    (e.clientX - dragOrigin[0]) * scale,
    (e.clientY - dragOrigin[1]) * scale,
  ];
}

function wirePointer(): void {
  gridCanvas.addEventListener("pointerdown", (e) => {
    dragging = true;
    dragOrigin = [e.clientX, e.clientY];
    gridCanvas.setPointerCapture(e.pointerId);
    if (audioCtx?.state === "suspended") void audioCtx.resume();
  });
  gridCanvas.addEventListener("pointermove", (e) => {
    if (!dragging) return;
    const v = throttle.update(canvasVector(e), performance.now());
    if (v) send({ t: "control.set_drive", v });
    state.driveVector = canvasVector(e);
  });
  gridCanvas.addEventListener("pointerup", (e) => {
    if (!dragging) return;
    dragging = false;
    const moved = Math.hypot(e.clientX - dragOrigin[0], e.clientY - dragOrigin[1]);
    if (moved < 4 && snapshot && snapshot.kind !== "springblock") {
      const rect = gridCanvas.getBoundingClientRect();
      const c = Math.floor(((e.clientX - rect.left) / rect.width) * snapshot.cols);
      const r = Math.floor(((e.clientY - rect.top) / rect.height) * snapshot.rows);
      send({ t: "control.drop", site: snapshot.kind === "oslo" ? [0] : [r, c] });
    }
    const v = throttle.release(performance.now());
    if (v) send({ t: "control.set_drive", v });
    state.driveVector = [0, 0];
  });
}

function wireButtons(): void {
  $("pause").addEventListener("click", () => send({ t: "control.pause" }));
  $("reset").addEventListener("click", () => send({ t: "control.reset" }));
  $("stop").addEventListener("click", () => send({ t: "control.stop" }));
}

wirePointer();
wireButtons();
connect();
void pollSnapshot();
requestAnimationFrame(frame);
