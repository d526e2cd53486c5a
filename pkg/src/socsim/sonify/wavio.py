"""Minimal RIFF/WAVE codec.

Writes 16-bit PCM little-endian mono. Reads 16-bit PCM and 32-bit IEEE float,
mono or stereo (stereo is averaged down to mono). A hand-rolled parser so
that malformed files fail with the exact byte offset, which the stdlib and
scipy readers do not report.
"""

import struct

import numpy as np

from .. import errors

_PCM = 1
_FLOAT = 3


def write_wav(signal, sample_rate: int, path: str) -> None:
    """Write a mono float signal in [-1, 1] as 16-bit PCM."""
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise errors.DomainError(f"expected mono 1-D signal, got shape {x.shape}")
    if x.size and not np.isfinite(x).all():
        raise errors.DomainError("signal contains non-finite samples")
    pcm = np.round(np.clip(x, -1.0, 1.0) * 32767.0).astype("<i2")
    data = pcm.tobytes()
    with open(path, "wb") as f:
        f.write(b"RIFF")
        f.write(struct.pack("<I", 36 + len(data)))
        f.write(b"WAVE")
        f.write(b"fmt ")
        f.write(struct.pack("<IHHIIHH", 16, _PCM, 1, sample_rate,
                            sample_rate * 2, 2, 16))
        f.write(b"data")
        f.write(struct.pack("<I", len(data)))
        f.write(data)


def _need(buf: bytes, offset: int, n: int, what: str) -> bytes:
    if offset + n > len(buf):
        raise errors.WavFormatError(f"truncated file while reading {what}", offset)
    return buf[offset:offset + n]


def read_wav(path: str):
    """Read a WAV file; returns (mono float64 signal, sample_rate)."""
    with open(path, "rb") as f:
        buf = f.read()
    if _need(buf, 0, 4, "RIFF magic") != b"RIFF":
        raise errors.WavFormatError("not a RIFF file", 0)
    if _need(buf, 8, 4, "WAVE magic") != b"WAVE":
        raise errors.WavFormatError("RIFF payload is not WAVE", 8)

    fmt = None
    data = None
    pos = 12
    while pos < len(buf):
        header = _need(buf, pos, 8, "chunk header")
        cid = header[:4]
        (clen,) = struct.unpack("<I", header[4:])
        body_at = pos + 8
        if cid == b"fmt ":
            body = _need(buf, body_at, 16, "fmt chunk")
            fmt = struct.unpack("<HHIIHH", body) + (body_at,)
        elif cid == b"data":
            data = (_need(buf, body_at, clen, "data chunk"), body_at)
        pos = body_at + clen + (clen & 1)  # chunks are word-aligned

    if fmt is None:
        raise errors.WavFormatError("missing fmt chunk", len(buf))
    if data is None:
        raise errors.WavFormatError("missing data chunk", len(buf))
    audio_format, channels, sample_rate, _, _, bits, fmt_at = fmt
    if channels not in (1, 2):
        raise errors.WavFormatError(f"unsupported channel count {channels}", fmt_at)

    raw, data_at = data
    if audio_format == _PCM and bits == 16:
        samples = np.frombuffer(raw[: len(raw) - len(raw) % 2], dtype="<i2")
        x = samples.astype(np.float64) / 32767.0
    elif audio_format == _FLOAT and bits == 32:
        samples = np.frombuffer(raw[: len(raw) - len(raw) % 4], dtype="<f4")
        x = samples.astype(np.float64)
    else:
        raise errors.WavFormatError(
            f"unsupported format (code {audio_format}, {bits}-bit); "
            "need 16-bit PCM or 32-bit float", fmt_at)
    if channels == 2:
        x = x[: len(x) - len(x) % 2].reshape(-1, 2).mean(axis=1)
    return np.clip(x, -1.0, 1.0), int(sample_rate)
