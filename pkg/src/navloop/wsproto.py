"""Minimal WebSocket framing so a browser can speak the operator protocol.

Implements just what the console needs from RFC 6455: the opening
handshake, unfragmented text frames, close, and ping/pong. The payloads
inside the frames are the same newline terminated JSON lines as the raw
TCP transport. No extensions, no compression, no TLS.
"""

from __future__ import annotations

import base64
import hashlib
import os
import struct

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_CONT = 0x0
OP_TEXT = 0x1
OP_BINARY = 0x2
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


class HandshakeError(ValueError):
    pass


def parse_http_headers(request: bytes) -> tuple[str, dict[str, str]]:
    """Split a raw HTTP request head into the request line and headers."""
    try:
        head = request.decode("latin-1")
    except UnicodeDecodeError as exc:
        raise HandshakeError("request is not HTTP") from exc
    lines = head.split("\r\n")
    if not lines or not lines[0]:
        raise HandshakeError("empty request")
    headers: dict[str, str] = {}
    for line in lines[1:]:
        if not line:
            break
        name, sep, value = line.partition(":")
        if sep:
            headers[name.strip().lower()] = value.strip()
    return lines[0], headers


def accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def handshake_response(request: bytes) -> bytes:
    """Build the 101 response for a client upgrade request."""
    request_line, headers = parse_http_headers(request)
    if not request_line.startswith("GET "):
        raise HandshakeError(f"expected GET, got {request_line!r}")
    if headers.get("upgrade", "").lower() != "websocket":
        raise HandshakeError("missing websocket upgrade header")
    key = headers.get("sec-websocket-key")
    if not key:
        raise HandshakeError("missing sec-websocket-key")
    return (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {accept_key(key)}\r\n"
        "\r\n"
    ).encode("latin-1")


def encode_frame(payload: bytes, opcode: int = OP_TEXT, mask: bool = False) -> bytes:
    """One unfragmented frame. Servers send unmasked, clients must mask."""
    header = bytearray([0x80 | opcode])
    length = len(payload)
    mask_bit = 0x80 if mask else 0x00
    if length < 126:
        header.append(mask_bit | length)
    elif length < 1 << 16:
        header.append(mask_bit | 126)
        header += struct.pack(">H", length)
    else:
        header.append(mask_bit | 127)
        header += struct.pack(">Q", length)
    if mask:
        key = os.urandom(4)
        header += key
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
    return bytes(header) + payload


def encode_text(text: str, mask: bool = False) -> bytes:
    return encode_frame(text.encode("utf-8"), OP_TEXT, mask)


def encode_close(mask: bool = False) -> bytes:
    return encode_frame(b"", OP_CLOSE, mask)


def decode_frames(buffer: bytes) -> tuple[list[tuple[int, bytes]], bytes]:
    """Parse as many complete frames as the buffer holds.

    Returns (frames, remainder) where each frame is (opcode, payload) with
    masking already undone. Incomplete trailing bytes stay in the remainder
    for the next read.
    """
    frames: list[tuple[int, bytes]] = []
    pos = 0
    n = len(buffer)
    while True:
        if n - pos < 2:
            break
        b0 = buffer[pos]
        b1 = buffer[pos + 1]
        opcode = b0 & 0x0F
        masked = bool(b1 & 0x80)
        length = b1 & 0x7F
        offset = pos + 2
        if length == 126:
            if n - offset < 2:
                break
            (length,) = struct.unpack_from(">H", buffer, offset)
            offset += 2
        elif length == 127:
            if n - offset < 8:
                break
            (length,) = struct.unpack_from(">Q", buffer, offset)
            offset += 8
        key = b""
        if masked:
            if n - offset < 4:
                break
            key = buffer[offset : offset + 4]
            offset += 4
        if n - offset < length:
            break
        payload = buffer[offset : offset + length]
        if masked:
            payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        frames.append((opcode, payload))
        pos = offset + length
    return frames, buffer[pos:]
