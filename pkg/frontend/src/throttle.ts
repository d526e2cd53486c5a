/**
 * Drive-control throttle: pointer drags arrive per mouse event, but the wire
 * carries at most one control.set_drive per tick interval. A release always
 * results in a final zero vector (queued if the window is still closed).
 */

export type Vector = [number, number];

export class DriveThrottle {
  private readonly intervalMs: number;
  private lastSentAt = -Infinity;
  private pending: Vector | null = null;

  constructor(tickSeconds: number) {
    this.intervalMs = tickSeconds * 1000;
  }

  private emit(v: Vector, nowMs: number): Vector {
    this.lastSentAt = nowMs;
    this.pending = null;
    return v;
  }

  /** Pointer moved; returns a vector to send now, or null (kept as pending). */
  update(v: Vector, nowMs: number): Vector | null {
    if (nowMs - this.lastSentAt >= this.intervalMs) {
      return this.emit(v, nowMs);
    }
    this.pending = v;
    return null;
  }

  /** Pointer released; the zero vector must eventually go out. */
  release(nowMs: number): Vector | null {
    return this.update([0, 0], nowMs);
  }

  /** Poll from the render loop; flushes a pending vector once allowed. */
  poll(nowMs: number): Vector | null {
    if (this.pending !== null && nowMs - this.lastSentAt >= this.intervalMs) {
      return this.emit(this.pending, nowMs);
    }
    return null;
  }
}
