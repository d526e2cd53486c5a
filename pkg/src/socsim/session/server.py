"""Live transport: WebSocket JSONL at /session, plus /corpus (active grain
corpus as WAV) and /snapshot (current grid, text format). One session at a
time; the model runs on its own thread and talks to the socket through
ordered queues, so it is never touched from two execution lines.
"""

import asyncio
import struct
import threading

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse, Response

from ..errors import ProtocolError, SocsimError
from ..sonify import crackle_noise, read_wav
from .config import SessionConfig
from .messages import CONTROL_TYPES, decode_message, encode_message
from .runner import QueueControls, Session


def _corpus_wav_bytes(config: SessionConfig) -> bytes | None:
    if not config.corpus:
        return None
    if config.corpus == "synthetic":
        signal, rate = crackle_noise(2.0, 22050, seed=config.seed), 22050
    else:
        signal, rate = read_wav(config.corpus)
    pcm = np.round(np.clip(signal, -1.0, 1.0) * 32767.0).astype("<i2").tobytes()
    head = (b"RIFF" + struct.pack("<I", 36 + len(pcm)) + b"WAVE"
            + b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16)
            + b"data" + struct.pack("<I", len(pcm)))
    return head + pcm


class SessionHub:
    """Owns the single live session and its thread."""

    def __init__(self, config: SessionConfig, log_dir: str | None = None):
        config.validate()
        self.config = config
        self.log_dir = log_dir
        self.lock = threading.Lock()
        self.active = False
        self.snapshot_text = ""
        self.session_count = 0

    def start(self) -> bool:
        with self.lock:
            if self.active:
                return False
            self.active = True
            self.session_count += 1
            return True

    def finish(self) -> None:
        with self.lock:
            self.active = False


def build_app(config: SessionConfig, log_dir: str | None = None,
              ui_dir: str | None = None) -> FastAPI:
    app = FastAPI()
    hub = SessionHub(config, log_dir)
    app.state.hub = hub

    @app.get("/snapshot", response_class=PlainTextResponse)
    def snapshot() -> str:
        return hub.snapshot_text

    @app.get("/corpus")
    def corpus() -> Response:
        data = _corpus_wav_bytes(hub.config)
        if data is None:
            return Response(status_code=404, content="no corpus configured")
        return Response(content=data, media_type="audio/wav")

    @app.websocket("/session")
    async def session_socket(ws: WebSocket) -> None:
        await ws.accept()
        if not hub.start():
            await ws.send_text(encode_message(
                {"t": "error", "k": 0, "message": "a session is already active"}))
            await ws.close()
            return
        loop = asyncio.get_running_loop()
        outbox: asyncio.Queue = asyncio.Queue()
        controls = QueueControls()

        def sink(msg: dict) -> None:
            loop.call_soon_threadsafe(outbox.put_nowait, encode_message(msg))

        def snapshot_sink(text: str) -> None:
            hub.snapshot_text = text

        def run() -> None:
            try:
                session = Session(hub.config, controls, sink, snapshot_sink)
                log = session.run(pacing=True)
                if hub.log_dir:
                    import os
                    path = os.path.join(hub.log_dir, f"session-{hub.session_count}.slog")
                    log.save(path)
            except SocsimError as exc:
                sink({"t": "error", "k": 0, "message": str(exc)})
            finally:
                loop.call_soon_threadsafe(outbox.put_nowait, None)

        worker = threading.Thread(target=run, daemon=True)
        worker.start()

        async def pump_out() -> None:
            while True:
                line = await outbox.get()
                if line is None:
                    break
                await ws.send_text(line)

        out_task = asyncio.create_task(pump_out())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = decode_message(raw)
                except ProtocolError as exc:
                    await ws.send_text(encode_message(
                        {"t": "error", "k": 0, "message": str(exc)}))
                    continue
                if msg["t"] == "hello":
                    continue  # config already went out with the stream
                if msg["t"] in CONTROL_TYPES:
                    controls.push(msg)
                else:
                    await ws.send_text(encode_message(
                        {"t": "error", "k": 0,
                         "message": f"client may only send hello/control, got {msg['t']}"}))
        except WebSocketDisconnect:
            controls.push({"t": "control.stop"})
        finally:
            controls.push({"t": "control.stop"})
            worker.join(timeout=10.0)
            await out_task
            hub.finish()
            try:
                await ws.close()
            except RuntimeError:
                pass  # already closed by the peer

    if ui_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
