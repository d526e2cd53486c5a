/**
 * Wire protocol mirror: one JSON object per newline-terminated line,
 * {"t": type, "k": tick, ...}. Unknown fields pass through; unknown types
 * are rejected. encodeMessage produces the canonical form (sorted keys,
 * compact separators) used everywhere on the wire.
 */

export const MESSAGE_TYPES = new Set([
  "hello", "config", "tick", "event", "grains", "stats",
  "control.set_drive", "control.drop", "control.pause",
  "control.reset", "control.stop", "error", "bye",
]);

export interface Message {
  t: string;
  k?: number;
  [field: string]: unknown;
}

export interface EventMessage extends Message {
  t: "event";
  k: number;
  id: number;
  site: number[] | null;
  size: number;
  area: number;
  duration: number;
  loss: number;
  mag: number;
  step_sizes: number[];
  steps?: [number[], number][][];
  moment?: number;
}

export interface GrainsEntry {
  onset: number;
  grain: number;
  amp: number;
  pitch: number;
}

export interface GrainsMessage extends Message {
  t: "grains";
  k: number;
  entries: GrainsEntry[];
}

export class ProtocolError extends Error {}

function sortedStringify(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(sortedStringify).join(",")}]`;
  }
  if (value !== null && typeof value === "object") {
    const keys = Object.keys(value as Record<string, unknown>).sort();
    const body = keys.map(
      (key) => `${JSON.stringify(key)}:${sortedStringify((value as Record<string, unknown>)[key])}`,
    );
    return `{${body.join(",")}}`;
  }
  return JSON.stringify(value);
}

export function encodeMessage(msg: Message): string {
  if (!MESSAGE_TYPES.has(msg.t)) {
    throw new ProtocolError(`unknown message type ${JSON.stringify(msg.t)}`);
  }
  return sortedStringify(msg) + "\n";
}

export function decodeMessage(line: string): Message {
  const stripped = line.replace(/[\r\n]+$/, "");
  let obj: unknown;
  try {
    obj = JSON.parse(stripped);
  } catch (err) {
    throw new ProtocolError(
      `malformed JSON in bytes 0..${stripped.length}: ${(err as Error).message}`,
    );
  }
  if (obj === null || typeof obj !== "object" || Array.isArray(obj)) {
    throw new ProtocolError(`expected a JSON object in bytes 0..${stripped.length}`);
  }
  const msg = obj as Message;
  if (!MESSAGE_TYPES.has(msg.t)) {
    throw new ProtocolError(`unknown message type ${JSON.stringify(msg.t)}`);
  }
  if (msg.k !== undefined && (!Number.isInteger(msg.k) || (msg.k as number) < 0)) {
    throw new ProtocolError(`tick index must be a non-negative integer, got ${msg.k}`);
  }
  return msg;
}
