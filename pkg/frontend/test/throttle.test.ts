import { describe, expect, it } from "vitest";
import { DriveThrottle, Vector } from "../src/throttle.js";

const TICK = 0.05; // 50 ms

function drag(
  throttle: DriveThrottle,
  moves: { t: number; v: Vector }[],
  releaseAt: number,
  pollEvery = 5,
): { t: number; v: Vector }[] {
  const sent: { t: number; v: Vector }[] = [];
  const horizon = releaseAt + 200;
  let mi = 0;
  let released = false;
  for (let now = 0; now <= horizon; now += pollEvery) {
    while (mi < moves.length && moves[mi].t <= now) {
      const v = throttle.update(moves[mi].v, moves[mi].t);
      if (v) sent.push({ t: moves[mi].t, v });
      mi++;
    }
    if (!released && now >= releaseAt) {
      released = true;
      const v = throttle.release(releaseAt);
      if (v) sent.push({ t: releaseAt, v });
    }
    const pending = throttle.poll(now);
    if (pending) sent.push({ t: now, v: pending });
  }
  return sent;
}

describe("drive throttle", () => {
  it("sends nothing without a drag", () => {
    const throttle = new DriveThrottle(TICK);
    for (let now = 0; now < 1000; now += 5) {
      expect(throttle.poll(now)).toBeNull();
    }
  });

  it("emits at most one message per tick under a dense pointer stream", () => {
    const throttle = new DriveThrottle(TICK);
    const moves = Array.from({ length: 500 }, (_, i) => ({
      t: i * 2, // a move every 2 ms for 1 s
      v: [i % 9, (i * 3) % 7] as Vector,
    }));
    const sent = drag(throttle, moves, 1000);
    expect(sent.length).toBeGreaterThan(0);
    for (let i = 1; i < sent.length; i++) {
      expect(sent[i].t - sent[i - 1].t).toBeGreaterThanOrEqual(TICK * 1000);
    }
    // ~1/tick over the second of dragging, never more
    expect(sent.length).toBeLessThanOrEqual(Math.ceil(1200 / (TICK * 1000)) + 1);
  });

  it("drag then release ends with the zero vector", () => {
    const throttle = new DriveThrottle(TICK);
    const moves = Array.from({ length: 40 }, (_, i) => ({
      t: i * 10,
      v: [5, 5] as Vector,
    }));
    const sent = drag(throttle, moves, 400);
    expect(sent[sent.length - 1].v).toEqual([0, 0]);
  });

  it("release inside a closed window is queued, not dropped", () => {
    const throttle = new DriveThrottle(TICK);
    expect(throttle.update([3, 3], 0)).toEqual([3, 3]);
    expect(throttle.release(10)).toBeNull(); // window still closed
    expect(throttle.poll(20)).toBeNull();
    expect(throttle.poll(50)).toEqual([0, 0]); // flushed at the boundary
    expect(throttle.poll(55)).toBeNull(); // and only once
  });
});
