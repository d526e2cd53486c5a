"""Operator entry point.

Exit codes: 0 success, 1 configuration/validation error, 2 I/O error,
3 model divergence. No subcommand mutates its input files.
"""

import argparse
import json
import sys

from .errors import (ConfigError, DivergenceError, DomainError,
                     EstimationError, IngestError, ProtocolError,
                     WavFormatError)
from .events import CascadeEvent
from .sandpile import (add_grain_oslo, drive_sandpile, new_oslo, new_sandpile,
                       snapshot_oslo, snapshot_sandpile)
from .springblock import drive_extremal, new_springblock, snapshot_springblock
from .sonify import (MappingConfig, crackle_noise, events_to_schedule,
                     ingest_corpus, mapping_config_from_dict, read_wav,
                     render, write_wav)
from .stats import EventEnsemble, criticality_report, histogram_csv
from .session import (SessionConfig, SessionLog, decode_message,
                      encode_message, event_message, parse_kv_text,
                      replay_session)

_CONFIG_ERRORS = (ConfigError, DomainError, EstimationError, ProtocolError,
                  WavFormatError, IngestError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit 2; 2 means I/O here
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _cmd_simulate(args) -> None:
    if args.events < 0:
        raise ConfigError(f"--events must be >= 0, got {args.events}")
    record = not args.no_steps
    if args.model == "sandpile":
        state = new_sandpile(args.size, args.size, args.z_c, args.seed)
        make = lambda: drive_sandpile(state, 1, record_steps=record)[0]
        snap = lambda: snapshot_sandpile(state)
    elif args.model == "oslo":
        state = new_oslo(args.size, args.seed)
        make = lambda: add_grain_oslo(state, record_steps=record)
        snap = lambda: snapshot_oslo(state)
    else:
        state = new_springblock(args.size, args.alpha, args.seed)
        make = lambda: drive_extremal(state, record_steps=record)
        snap = lambda: snapshot_springblock(state)
    with open(args.out, "w") as f:
        for i in range(args.events):
            ev = make()
            f.write(encode_message(event_message(ev, i, include_steps=record)))
    snapshot_path = args.snapshot or (args.out + ".snapshot")
    with open(snapshot_path, "w") as f:
        f.write(snap())


def _read_events(path: str) -> list:
    """Load event messages back into lightweight CascadeEvents."""
    events = []
    with open(path) as f:
        for line in f:
            if not line.strip():
                continue
            msg = decode_message(line)
            if msg["t"] != "event":
                continue
            steps = [[(tuple(site), rel) for site, rel in step]
                     for step in msg.get("steps", [])]
            events.append(CascadeEvent(
                event_id=msg["id"],
                trigger_site=tuple(msg["site"]) if msg.get("site") is not None else None,
                size=msg["size"], area=msg["area"], duration=msg["duration"],
                boundary_loss=msg["loss"], magnitude=msg["mag"],
                steps=steps, steps_recorded=bool(steps) or msg["size"] == 0,
                step_sizes=list(msg["step_sizes"]), moment=msg.get("moment")))
    return events


def _cmd_stats(args) -> None:
    events = _read_events(args.infile)
    ensemble = EventEnsemble.from_events(events, source={"file": args.infile})
    report = criticality_report(ensemble, s_min=args.s_min,
                                bins_per_decade=args.bins_per_decade)
    with open(args.report, "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    if args.csv:
        with open(args.csv, "w") as f:
            f.write(histogram_csv([tuple(row) for row in report["histogram"]]))


def _cmd_sonify(args) -> None:
    events = _read_events(args.infile)
    if args.corpus == "synthetic":
        signal, rate = crackle_noise(2.0, 22050, seed=0), 22050
    else:
        signal, rate = read_wav(args.corpus)
    mapping = MappingConfig()
    if args.config:
        with open(args.config) as f:
            mapping = mapping_config_from_dict(parse_kv_text(f.read()))
    corpus = ingest_corpus(signal, rate)
    schedule = events_to_schedule(events, corpus, mapping)
    write_wav(render(schedule, corpus, rate), rate, args.out)


def _cmd_serve(args) -> None:
    with open(args.config) as f:
        config = SessionConfig.from_kv(parse_kv_text(f.read()))
    config.validate()
    from .session.server import build_app
    import uvicorn
    app = build_app(config, log_dir=args.log_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


def _cmd_replay(args) -> None:
    log = SessionLog.load(args.log)
    with open(args.out, "w") as f:
        def sink(msg: dict) -> None:
            if msg["t"] == "event":
                f.write(encode_message(msg))
        replay_session(log, sink)


def build_parser() -> _Parser:
    parser = _Parser(prog="socsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="drive a model and write events as JSONL")
    p.add_argument("--model", required=True, choices=("sandpile", "oslo", "springblock"))
    p.add_argument("--size", type=int, default=64, help="grid side / pile length")
    p.add_argument("--z-c", type=int, default=4, dest="z_c")
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--events", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--snapshot", default=None, help="default: <out>.snapshot")
    p.add_argument("--no-steps", action="store_true",
                   help="skip per-sweep coordinates (smaller files, faster)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("stats", help="criticality report from an events file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--s-min", type=int, default=1, dest="s_min")
    p.add_argument("--bins-per-decade", type=int, default=4)
    p.add_argument("--report", required=True)
    p.add_argument("--csv", default=None, help="also write the histogram as CSV")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("sonify", help="render an events file through a corpus")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--corpus", required=True,
                   help="WAV path, or 'synthetic' for the built-in crackle")
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None, help="mapping config (key = value)")
    p.set_defaults(func=_cmd_sonify)

    p = sub.add_parser("serve", help="serve the live session protocol")
    p.add_argument("--config", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", default=None, help="static UI directory to mount at /")
    p.add_argument("--log-dir", default=None, help="write .slog files here")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("replay", help="re-run a session log into an events file")
    p.add_argument("--log", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_replay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"socsim: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"socsim: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"socsim: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
