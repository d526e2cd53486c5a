/**
 * Grid snapshot parsing and color mapping for the lattice heatmap.
 * Snapshots come from the /snapshot endpoint in the models' text formats.
 */

export interface GridSnapshot {
  kind: "sandpile" | "springblock" | "oslo";
  rows: number;
  cols: number;
  /** row-major values; grain counts or forces */
  values: number[];
  /** natural display ceiling: z_c for piles, the failure threshold for blocks */
  ceiling: number;
}

export function parseSnapshot(text: string): GridSnapshot | null {
  const lines = text.trim().split("\n").filter((ln) => ln.length > 0);
  if (lines.length === 0) return null;
  const header = lines[0].split(/\s+/);
  const body = lines.slice(1).map((ln) => ln.split(/\s+/).map(Number));
  if (header[0] === "sandpile") {
    const cols = parseInt(header[1], 10);
    const rows = parseInt(header[2], 10);
    const zc = parseInt(header[3], 10);
    return { kind: "sandpile", rows, cols, values: body.flat(), ceiling: zc };
  }
  if (header[0] === "springblock") {
    const side = parseInt(header[1], 10);
    return { kind: "springblock", rows: side, cols: side, values: body.flat(), ceiling: 1.0 };
  }
  if (header[0] === "oslo") {
    const cols = parseInt(header[1], 10);
    const values = body[0] ?? [];
    const ceiling = Math.max(1, ...values);
    return { kind: "oslo", rows: 1, cols, values, ceiling };
  }
  return null;
}

/** Dark-blue -> amber ramp; v is clamped to [0, ceiling]. */
export function valueColor(v: number, ceiling: number): [number, number, number] {
  const x = Math.max(0, Math.min(1, v / (ceiling || 1)));
  const r = Math.round(20 + 225 * x);
  const g = Math.round(24 + 140 * x);
  const b = Math.round(70 + 40 * (1 - x));
  return [r, g, b];
}
