"""Interactive tick-driven sessions: wire protocol, runner, replayable logs,
and the live WebSocket server."""

from .config import SessionConfig, parse_kv_text
from .messages import (CONTROL_TYPES, MESSAGE_TYPES, decode_message,
                       encode_message, event_message, grains_message)
from .runner import (QueueControls, ScriptedControls, Session, SessionLog,
                     replay_session, run_session, session_stream_lines)

__all__ = [
    "CONTROL_TYPES", "MESSAGE_TYPES", "QueueControls", "ScriptedControls",
    "Session", "SessionConfig", "SessionLog", "decode_message",
    "encode_message", "event_message", "grains_message", "parse_kv_text",
    "replay_session", "run_session", "session_stream_lines",
]
