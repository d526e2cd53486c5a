/**
 * Client-side grain playback scheduling. The corpus WAV is fetched once from
 * /corpus; grains message entries reference grain indices into the same
 * fixed segmentation the server uses (80 ms grains on a 20 ms hop), so the
 * client reconstructs sample offsets locally and schedules buffer slices on
 * the audio clock.
 */

import { GrainsEntry } from "./protocol.js";

export const GRAIN_SECONDS = 0.08;
export const HOP_SECONDS = 0.02;

export interface ScheduledGrain {
  entry: GrainsEntry;
  /** audio-clock time the grain starts */
  when: number;
  /** offset into the corpus buffer, seconds */
  offset: number;
  /** playback duration after pitch scaling, seconds */
  duration: number;
  playbackRate: number;
  gain: number;
}

/**
 * Maps protocol onsets (session seconds, tick k starting at k*tickSeconds)
 * onto the audio clock. The anchor is set when the first grains message
 * arrives and drifts only if re-anchored.
 */
export class GrainScheduler {
  private readonly tickSeconds: number;
  private readonly lead: number;
  private anchorSession: number | null = null;
  private anchorAudio = 0;

  constructor(tickSeconds: number, lead = 0.06) {
    this.tickSeconds = tickSeconds;
    this.lead = lead;
  }

  get anchored(): boolean {
    return this.anchorSession !== null;
  }

  anchor(tickIndex: number, audioNow: number): void {
    this.anchorSession = tickIndex * this.tickSeconds;
    this.anchorAudio = audioNow + this.lead;
  }

  /**
   * Schedule every entry of one grains message (tick k). Entries map
   * one-for-one; times land within one tick of their onset field relative
   * to the session-to-audio anchor (late arrivals are clamped to "now").
   */
  schedule(tickIndex: number, entries: GrainsEntry[], audioNow: number): ScheduledGrain[] {
    if (this.anchorSession === null) {
      this.anchor(tickIndex, audioNow);
    }
    const out: ScheduledGrain[] = [];
    for (const entry of entries) {
      const ideal = this.anchorAudio + (entry.onset - (this.anchorSession as number));
      out.push({
        entry,
        when: Math.max(ideal, audioNow),
        offset: entry.grain * HOP_SECONDS,
        duration: GRAIN_SECONDS / entry.pitch,
        playbackRate: entry.pitch,
        gain: entry.amp,
      });
    }
    return out;
  }
}

/** Fire one scheduled grain through WebAudio (thin, untested wrapper). */
export function playGrain(
  ctx: AudioContext,
  corpus: AudioBuffer,
  grain: ScheduledGrain,
): void {
  const source = ctx.createBufferSource();
  source.buffer = corpus;
  source.playbackRate.value = grain.playbackRate;
  const gain = ctx.createGain();
  // short equal-power ramp approximating the renderer's Hann window
  const atk = Math.min(0.015, grain.duration / 2);
  gain.gain.setValueAtTime(0, grain.when);
  gain.gain.linearRampToValueAtTime(grain.gain, grain.when + atk);
  gain.gain.setValueAtTime(grain.gain, grain.when + grain.duration - atk);
  gain.gain.linearRampToValueAtTime(0, grain.when + grain.duration);
  source.connect(gain).connect(ctx.destination);
  source.start(grain.when, grain.offset, GRAIN_SECONDS);
}
