/**
 * View state reducer: a pure consumer of protocol messages. Everything shown
 * on screen (flashes, histogram, media mode, status) is derived from the
 * received stream plus the clock, so replaying the same lines reproduces the
 * same visuals.
 */

import { EventMessage, Message } from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed" | "error";
export type MediaMode = "shuffling" | "frozen";

export interface ViewState {
  connection: ConnectionStatus;
  config: Record<string, unknown> | null;
  tick: number;
  totalEvents: number;
  /** site key -> flash birth time (ms); decayed out after flashMs */
  flashes: Map<string, number>;
  /** avalanche size -> count, accumulated from event messages only */
  sizeCounts: Map<number, number>;
  lastEventWall: number;
  driveVector: [number, number];
  stats: Message | null;
  errorBanner: string | null;
  flashMs: number;
  freezeMs: number;
}

export function newViewState(flashMs = 450, freezeMs = 800): ViewState {
  return {
    connection: "connecting",
    config: null,
    tick: 0,
    totalEvents: 0,
    flashes: new Map(),
    sizeCounts: new Map(),
    lastEventWall: -Infinity,
    driveVector: [0, 0],
    stats: null,
    errorBanner: null,
    flashMs,
    freezeMs,
  };
}

export function siteKey(site: number[]): string {
  return site.join(",");
}

/** Distinct slipped sites of one event; length always equals the area. */
export function eventFlashSites(msg: EventMessage): number[][] {
  const seen = new Map<string, number[]>();
  for (const step of msg.steps ?? []) {
    for (const [site] of step) {
      seen.set(siteKey(site), site);
    }
  }
  return [...seen.values()];
}

export function applyMessage(state: ViewState, msg: Message, nowMs: number): void {
  switch (msg.t) {
    case "config":
      state.config = (msg.config as Record<string, unknown>) ?? null;
      break;
    case "tick":
      state.tick = msg.k ?? state.tick;
      break;
    case "event": {
      const ev = msg as EventMessage;
      if (ev.size >= 1) {
        state.totalEvents += 1;
        state.sizeCounts.set(ev.size, (state.sizeCounts.get(ev.size) ?? 0) + 1);
        state.lastEventWall = nowMs;
        for (const site of eventFlashSites(ev)) {
          state.flashes.set(siteKey(site), nowMs);
        }
      }
      break;
    }
    case "stats":
      state.stats = msg;
      break;
    case "error":
      state.errorBanner = String(msg.message ?? "protocol error");
      break;
    case "bye":
      state.connection = "closed";
      break;
    default:
      break; // grains handled by the audio layer, controls never arrive inbound
  }
}

/** Drop flashes older than flashMs; returns surviving flash keys. */
export function decayFlashes(state: ViewState, nowMs: number): string[] {
  for (const [key, born] of state.flashes) {
    if (nowMs - born > state.flashMs) {
      state.flashes.delete(key);
    }
  }
  return [...state.flashes.keys()];
}

/** Remaining flash intensity in [0, 1] (exponential decay over flashMs). */
export function flashIntensity(state: ViewState, key: string, nowMs: number): number {
  const born = state.flashes.get(key);
  if (born === undefined) return 0;
  const age = (nowMs - born) / state.flashMs;
  return age >= 1 ? 0 : Math.exp(-3 * age);
}

/** Shuffling iff a nonzero event arrived within the last freezeMs. */
export function mediaMode(state: ViewState, nowMs: number): MediaMode {
  return nowMs - state.lastEventWall <= state.freezeMs ? "shuffling" : "frozen";
}

export interface HistogramPoint {
  center: number;
  density: number;
}

/** Log-binned density histogram of the accumulated sizes (for the live plot). */
export function logBinnedHistogram(
  sizeCounts: Map<number, number>,
  binsPerDecade = 4,
): HistogramPoint[] {
  if (sizeCounts.size === 0) return [];
  const sizes = [...sizeCounts.keys()];
  const lo = Math.min(...sizes);
  const hi = Math.max(...sizes);
  let nBins = Math.floor(Math.log10(hi / lo) * binsPerDecade) + 1;
  const edge = (i: number) => lo * 10 ** (i / binsPerDecade);
  while (edge(nBins) <= hi) nBins += 1;
  const counts = new Array<number>(nBins).fill(0);
  let total = 0;
  for (const [size, count] of sizeCounts) {
    const bin = Math.min(
      nBins - 1,
      Math.max(0, Math.floor(Math.log10(size / lo) * binsPerDecade)),
    );
    counts[bin] += count;
    total += count;
  }
  const points: HistogramPoint[] = [];
  for (let i = 0; i < nBins; i++) {
    if (counts[i] === 0) continue;
    const width = edge(i + 1) - edge(i);
    points.push({
      center: Math.sqrt(edge(i) * edge(i + 1)),
      density: counts[i] / (width * total),
    });
  }
  return points;
}
