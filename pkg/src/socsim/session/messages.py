"""Wire protocol: one JSON object per newline-terminated line.

Every message is {"t": <type>, "k": <tick_index>, ...}. The canonical wire
form (what encode_message produces, and what logs and exports contain) is
compact JSON with sorted keys, so identical message dicts serialize to
identical bytes. Unknown fields are ignored on decode; unknown types are
rejected. Client-originated messages (hello, control.*) may omit "k"; the
session stamps them on receipt.
"""

import json

from ..errors import ProtocolError

MESSAGE_TYPES = frozenset({
    "hello", "config", "tick", "event", "grains", "stats",
    "control.set_drive", "control.drop", "control.pause",
    "control.reset", "control.stop", "error", "bye",
})
CONTROL_TYPES = frozenset(t for t in MESSAGE_TYPES if t.startswith("control."))


def encode_message(msg: dict) -> str:
    """Canonical newline-terminated encoding; validates the type tag."""
    t = msg.get("t")
    if t not in MESSAGE_TYPES:
        raise ProtocolError(f"unknown message type {t!r}")
    return json.dumps(msg, sort_keys=True, separators=(",", ":")) + "\n"


def decode_message(line) -> dict:
    """Parse one protocol line; errors carry the offending byte range."""
    if isinstance(line, bytes):
        text = line.decode("utf-8", errors="replace")
    else:
        text = line
    stripped = text.strip("\r\n")
    try:
        obj = json.loads(stripped)
    except json.JSONDecodeError as exc:
        raise ProtocolError(
            f"malformed JSON at bytes {exc.pos}..{len(stripped.encode('utf-8'))}: "
            f"{exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError(f"expected a JSON object at bytes 0..{len(stripped.encode('utf-8'))}")
    t = obj.get("t")
    if t not in MESSAGE_TYPES:
        raise ProtocolError(f"unknown message type {t!r}")
    k = obj.get("k")
    if k is not None and (not isinstance(k, int) or k < 0):
        raise ProtocolError(f"tick index must be a non-negative integer, got {k!r}")
    return obj


def _round12(x: float) -> float:
    """Trim floats that pass through libm (log10 etc.) so exported bytes do
    not depend on last-ulp differences between platforms."""
    return float(f"{x:.12g}")


def event_message(event, tick_index: int, include_steps: bool = True) -> dict:
    """Serialize a CascadeEvent as an event message.

    step_sizes always travel (the sonifier needs per-sweep slip counts);
    full step coordinates only when recorded and requested.
    """
    msg = {
        "t": "event",
        "k": tick_index,
        "id": event.event_id,
        "site": list(event.trigger_site) if event.trigger_site is not None else None,
        "size": event.size,
        "area": event.area,
        "duration": event.duration,
        "loss": _round12(float(event.boundary_loss)),
        "mag": _round12(event.magnitude),
        "step_sizes": list(event.step_sizes),
    }
    if event.moment is not None:
        msg["moment"] = _round12(event.moment)
    if include_steps and event.steps_recorded:
        msg["steps"] = [[[list(site), _round12(float(rel))] for site, rel in step]
                        for step in event.steps]
    return msg


def grains_message(schedule_entries, tick_index: int) -> dict:
    return {
        "t": "grains",
        "k": tick_index,
        "entries": [{"onset": _round12(e.onset), "grain": e.grain_index,
                     "amp": _round12(e.amplitude), "pitch": _round12(e.pitch_ratio)}
                    for e in schedule_entries],
    }
