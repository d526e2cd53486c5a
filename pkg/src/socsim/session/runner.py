"""Tick-driven interactive session: applies queued controls at tick
boundaries, advances the model one drive step, and emits tick/event/grains/
stats messages to a sink. Everything is derived from the seeded config plus
the logged control stream, so a saved log replays bitwise.
"""

import json
import math
import time
from dataclasses import dataclass, field, replace

from ..errors import ConfigError, DivergenceError, ProtocolError, SocsimError
from ..rng import Rng
from ..sandpile import (add_grain, add_grain_oslo, new_oslo, new_sandpile,
                        snapshot_oslo, snapshot_sandpile)
from ..springblock import (load_step, new_springblock, set_plate_rate,
                           snapshot_springblock)
from ..sonify import (MappingConfig, crackle_noise, events_to_schedule,
                      ingest_corpus, mapping_config_from_dict, read_wav)
from ..stats import fit_power_law
from .config import SessionConfig
from .messages import CONTROL_TYPES, encode_message, event_message, grains_message

# Keeps the sonification stream distinct from the model stream for any seed.
SONIFY_SEED_XOR = 0x536F6E6966792121


@dataclass
class SessionLog:
    """Seeded config plus every control exactly as applied; sufficient for
    bitwise replay of the emitted stream."""

    config: SessionConfig
    records: list = field(default_factory=list)  # (tick_index, control msg)
    n_ticks: int = 0

    def save(self, path: str) -> None:
        with open(path, "w") as f:
            header = {"v": 1, "ticks": self.n_ticks, "config": self.config.to_dict()}
            f.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
            for k, msg in self.records:
                f.write(json.dumps({"k": k, "msg": msg}, sort_keys=True,
                                   separators=(",", ":")) + "\n")

    @classmethod
    def load(cls, path: str) -> "SessionLog":
        with open(path) as f:
            lines = [ln for ln in f.read().splitlines() if ln.strip()]
        if not lines:
            raise ConfigError(f"empty session log {path}")
        header = json.loads(lines[0])
        config = SessionConfig.from_dict(header["config"])
        records = []
        for ln in lines[1:]:
            rec = json.loads(ln)
            records.append((int(rec["k"]), rec["msg"]))
        return cls(config=config, records=records, n_ticks=int(header.get("ticks", 0)))


class ScriptedControls:
    """Replays (tick_index, msg) records; poll(k) returns tick k's messages."""

    def __init__(self, records):
        self._by_tick: dict = {}
        for k, msg in records:
            self._by_tick.setdefault(int(k), []).append(msg)

    def poll(self, tick_index: int) -> list:
        return self._by_tick.get(tick_index, [])


class QueueControls:
    """Thread-safe control feed for live transports; poll drains the queue."""

    def __init__(self):
        import threading
        self._lock = threading.Lock()
        self._pending: list = []

    def push(self, msg: dict) -> None:
        with self._lock:
            self._pending.append(msg)

    def poll(self, tick_index: int) -> list:
        with self._lock:
            out = self._pending
            self._pending = []
        return out


class _PileAdapter:
    """Drives a 2D sandpile by dropping grains at the configured rate."""

    def __init__(self, cfg: SessionConfig):
        self.cfg = cfg
        self.state = new_sandpile(cfg.size, cfg.size, cfg.z_c, cfg.seed)
        self.rate = cfg.drive_rate
        self.acc = 0.0

    def set_drive(self, v) -> None:
        self.rate = self.cfg.drive_gain * math.hypot(float(v[0]), float(v[1]))

    def drop(self, site):
        if site is None:
            r = self.state.rng.randbelow(self.state.height)
            c = self.state.rng.randbelow(self.state.width)
            site = (r, c)
        return add_grain(self.state, tuple(site))

    def drive(self) -> list:
        self.acc += self.rate
        n = int(self.acc)
        self.acc -= n
        return [self.drop(None) for _ in range(n)]

    def snapshot(self) -> str:
        return snapshot_sandpile(self.state)


class _OsloAdapter:
    def __init__(self, cfg: SessionConfig):
        self.cfg = cfg
        self.state = new_oslo(cfg.size, cfg.seed)
        self.rate = cfg.drive_rate
        self.acc = 0.0

    def set_drive(self, v) -> None:
        self.rate = self.cfg.drive_gain * math.hypot(float(v[0]), float(v[1]))

    def drop(self, site):
        # Grains enter the 1D pile only at column 0; any site is ignored.
        return add_grain_oslo(self.state)

    def drive(self) -> list:
        self.acc += self.rate
        n = int(self.acc)
        self.acc -= n
        return [self.drop(None) for _ in range(n)]

    def snapshot(self) -> str:
        return snapshot_oslo(self.state)


class _SpringBlockAdapter:
    """Loads the plate at the rate set by the latest drive vector; starts
    quiescent until a control arrives."""

    def __init__(self, cfg: SessionConfig):
        self.cfg = cfg
        self.state = new_springblock(cfg.size, cfg.alpha, cfg.seed,
                                     residual_sigma=cfg.residual_sigma,
                                     rate_scale=cfg.rate_scale)

    def set_drive(self, v) -> None:
        set_plate_rate(self.state, (float(v[0]), float(v[1])))

    def drop(self, site):
        raise ProtocolError("control.drop is not defined for the spring-block model")

    def drive(self) -> list:
        return [load_step(self.state, self.state.plate_rate)]

    def snapshot(self) -> str:
        return snapshot_springblock(self.state)


_ADAPTERS = {"sandpile": _PileAdapter, "oslo": _OsloAdapter,
             "springblock": _SpringBlockAdapter}


def _load_corpus(cfg: SessionConfig):
    if not cfg.corpus:
        return None
    mapping = mapping_config_from_dict(cfg.mapping) if cfg.mapping else MappingConfig()
    if cfg.corpus == "synthetic":
        signal, rate = crackle_noise(2.0, 22050, seed=cfg.seed), 22050
    else:
        signal, rate = read_wav(cfg.corpus)
    return ingest_corpus(signal, rate), mapping


class Session:
    """One logical execution line owning the model. Call tick() repeatedly,
    or use run_session for the whole loop."""

    def __init__(self, config: SessionConfig, control_source=None, event_sink=None,
                 snapshot_sink=None):
        config.validate()
        self.config = config
        self.controls = control_source
        self.sink = event_sink or (lambda msg: None)
        self.snapshot_sink = snapshot_sink
        self.log = SessionLog(config=config)
        self.tick_index = 0
        self.paused = False
        self.stopping = False
        self._reset_state()
        self.sink({"t": "config", "k": 0, "config": config.to_dict()})

    def _reset_state(self) -> None:
        self.adapter = _ADAPTERS[self.config.model](self.config)
        loaded = _load_corpus(self.config)
        if loaded:
            self.corpus, self.mapping = loaded
            self.sonify_rng = Rng(self.config.seed ^ SONIFY_SEED_XOR)
        else:
            self.corpus = None
        self.sizes: list = []

    def _apply_control(self, msg: dict) -> list:
        """Apply one control; returns any events it produced immediately."""
        t = msg["t"]
        if t == "control.set_drive":
            v = msg.get("v", (0.0, 0.0))
            self.adapter.set_drive(v)
        elif t == "control.drop":
            ev = self.adapter.drop(msg.get("site"))
            return [ev]
        elif t == "control.pause":
            self.paused = not self.paused
        elif t == "control.reset":
            self._reset_state()
            self.paused = False
        elif t == "control.stop":
            self.stopping = True
        return []

    def _emit_stats(self) -> None:
        msg = {"t": "stats", "k": self.tick_index, "events": len(self.sizes),
               "decades": None, "tau": None, "stderr": None, "n_tail": None}
        if self.sizes:
            lo, hi = min(self.sizes), max(self.sizes)
            msg["decades"] = round(math.log10(hi / lo), 6)
            try:
                fit = fit_power_law(self.sizes, self.config.stats_s_min)
                msg["tau"] = round(fit.tau_hat, 6)
                msg["stderr"] = round(fit.stderr, 6)
                msg["n_tail"] = fit.n_tail
            except SocsimError:
                pass
        self.sink(msg)

    def tick(self) -> None:
        k = self.tick_index
        events = []
        for msg in (self.controls.poll(k) if self.controls else []):
            if msg.get("t") not in CONTROL_TYPES:
                raise ProtocolError(f"not a control message: {msg.get('t')!r}")
            self.log.records.append((k, msg))
            try:
                events.extend(self._apply_control(msg))
            except ProtocolError as exc:
                self.sink({"t": "error", "k": k, "message": str(exc)})
        if not self.paused and not self.stopping:
            events.extend(self.adapter.drive())
        nonzero = [e for e in events if e.size >= 1]
        for ev in nonzero:
            self.sink(event_message(ev, k))
            self.sizes.append(ev.size)
        if self.corpus is not None and nonzero:
            per_event = replace(self.mapping, tick_seconds=self.config.tick_seconds / len(nonzero))
            sched = events_to_schedule(nonzero, self.corpus, per_event,
                                       rng=self.sonify_rng)
            base = k * self.config.tick_seconds
            for e in sched.entries:
                e.onset += base
            self.sink(grains_message(sched.entries, k))
        if (k + 1) % self.config.stats_every == 0:
            self._emit_stats()
        self.sink({"t": "tick", "k": k, "n": len(nonzero),
                   "size": sum(e.size for e in nonzero)})
        if self.snapshot_sink is not None:
            self.snapshot_sink(self.adapter.snapshot())
        self.tick_index = k + 1
        self.log.n_ticks = self.tick_index

    def run(self, pacing: bool = False, max_ticks: int | None = None) -> SessionLog:
        limit = self.config.max_ticks
        if max_ticks is not None:
            limit = max_ticks if limit is None else min(limit, max_ticks)
        try:
            while not self.stopping and (limit is None or self.tick_index < limit):
                started = time.monotonic()
                self.tick()
                if pacing:
                    remaining = self.config.tick_seconds - (time.monotonic() - started)
                    if remaining > 0:
                        time.sleep(remaining)
        except DivergenceError as exc:
            self.sink({"t": "error", "k": self.tick_index, "message": str(exc)})
            self.sink({"t": "bye", "k": self.tick_index})
            raise
        self.sink({"t": "bye", "k": self.tick_index})
        return self.log


def run_session(config: SessionConfig, control_source=None, event_sink=None,
                pacing: bool = False, snapshot_sink=None,
                max_ticks: int | None = None) -> SessionLog:
    """Run a full session; returns the replayable log."""
    session = Session(config, control_source, event_sink, snapshot_sink)
    return session.run(pacing=pacing, max_ticks=max_ticks)


def replay_session(log: SessionLog, event_sink=None) -> SessionLog:
    """Re-run a recorded session; the emitted stream is bitwise identical.

    The recorded tick count bounds the rerun (the config is left untouched so
    the replayed config message matches the original bytes); recorded stop
    controls fire at their original ticks anyway.
    """
    return run_session(log.config, ScriptedControls(log.records), event_sink,
                       max_ticks=log.n_ticks)


def session_stream_lines(config: SessionConfig, control_source=None,
                         pacing: bool = False) -> list:
    """Convenience: run a session and return the encoded protocol lines."""
    lines: list = []
    run_session(config, control_source, lambda m: lines.append(encode_message(m)),
                pacing=pacing)
    return lines
