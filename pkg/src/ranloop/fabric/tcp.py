"""Length-prefixed JSON-RPC framing over TCP.

Each frame is a 4-byte big-endian length followed by one UTF-8 envelope.
The server routes "tools/list" and "tools/call" to a ToolServer and
"a2a/send" to a MessageBus; the client is a simple blocking caller.
"""

from __future__ import annotations

import socket
import socketserver
import struct
import threading
from typing import Any, Callable

from .bus import A2aMessage, MessageBus
from .envelope import (
    ProtocolError,
    RpcEnvelope,
    RpcErrorCode,
    decode_envelope,
    encode_envelope,
)
from .tools import ToolError, ToolServer

MAX_FRAME_BYTES = 16 * 1024 * 1024
_LEN = struct.Struct(">I")


def write_frame(sock: socket.socket, env: RpcEnvelope) -> None:
    payload = encode_envelope(env)
    sock.sendall(_LEN.pack(len(payload)) + payload)


def _read_exact(sock: socket.socket, n: int) -> bytes | None:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None
        buf += chunk
    return buf


def read_frame(sock: socket.socket) -> RpcEnvelope | None:
    header = _read_exact(sock, _LEN.size)
    if header is None:
        return None
    (length,) = _LEN.unpack(header)
    if length > MAX_FRAME_BYTES:
        raise ProtocolError(RpcErrorCode.INVALID_REQUEST, f"frame too large: {length}")
    payload = _read_exact(sock, length)
    if payload is None:
        return None
    return decode_envelope(payload)


def make_dispatcher(
    tool_server: ToolServer | None = None,
    bus: MessageBus | None = None,
) -> Callable[[RpcEnvelope], RpcEnvelope | None]:
    """Route one request envelope to its handler; returns the response
    envelope, or None for notifications."""

    def dispatch(env: RpcEnvelope) -> RpcEnvelope | None:
        if not env.is_request:
            return RpcEnvelope.failure(
                env.id, RpcErrorCode.INVALID_REQUEST, "expected a request frame"
            )
        try:
            result = _invoke(env.method, env.params or {})
        except ToolError as exc:
            return None if env.is_notification else RpcEnvelope.failure(env.id, exc.code, exc.message)
        except ProtocolError as exc:
            return None if env.is_notification else RpcEnvelope.failure(env.id, exc.code, exc.message)
        return None if env.is_notification else RpcEnvelope.response(env.id, result)

    def _invoke(method: str, params: Any):
        if method == "tools/list":
            if tool_server is None:
                raise ToolError(RpcErrorCode.METHOD_NOT_FOUND, "no tool server attached")
            return {"tools": [d.to_dict() for d in tool_server.list_tools()]}
        if method == "tools/call":
            if tool_server is None:
                raise ToolError(RpcErrorCode.METHOD_NOT_FOUND, "no tool server attached")
            if not isinstance(params, dict) or "name" not in params:
                raise ToolError(RpcErrorCode.INVALID_PARAMS, "field 'name': required")
            return tool_server.call_tool(params["name"], params.get("arguments") or {})
        if method == "a2a/send":
            if bus is None:
                raise ToolError(RpcErrorCode.METHOD_NOT_FOUND, "no bus attached")
            try:
                msg = A2aMessage.from_dict(params)
            except (KeyError, TypeError, ValueError) as exc:
                raise ToolError(RpcErrorCode.INVALID_PARAMS, f"bad message: {exc}") from exc
            bus.send_message(msg)
            return {"accepted": True}
        raise ToolError(RpcErrorCode.METHOD_NOT_FOUND, f"unknown method {method!r}")

    return dispatch


class _FrameHandler(socketserver.BaseRequestHandler):
    def handle(self):
        dispatch = self.server.dispatcher  # type: ignore[attr-defined]
        while True:
            try:
                env = read_frame(self.request)
            except ProtocolError as exc:
                write_frame(self.request, RpcEnvelope.failure(None, exc.code, exc.message))
                continue
            except OSError:
                return
            if env is None:
                return
            response = dispatch(env)
            if response is not None:
                write_frame(self.request, response)


class _Server(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


def serve_dispatcher(
    dispatcher: Callable[[RpcEnvelope], RpcEnvelope | None],
    host: str = "127.0.0.1",
    port: int = 0,
) -> tuple[_Server, threading.Thread]:
    """Start a framing server on (host, port); port 0 picks a free one.
    Returns the server (with .server_address) and its thread."""
    server = _Server((host, port), _FrameHandler)
    server.dispatcher = dispatcher  # type: ignore[attr-defined]
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread


class FrameClient:
    """Blocking JSON-RPC client over the length-prefixed transport."""

    def __init__(self, host: str, port: int, timeout_s: float = 5.0):
        self._sock = socket.create_connection((host, port), timeout=timeout_s)
        self._next_id = 0
        self._lock = threading.Lock()

    def close(self) -> None:
        self._sock.close()

    def call(self, method: str, params: Any = None) -> Any:
        with self._lock:
            self._next_id += 1
            req = RpcEnvelope.request(method, params=params, id=self._next_id)
            write_frame(self._sock, req)
            resp = read_frame(self._sock)
        if resp is None:
            raise ConnectionError("server closed the connection")
        if resp.error is not None:
            raise ToolError(resp.error.code, resp.error.message)
        if resp.id != req.id:
            raise ProtocolError(RpcErrorCode.INVALID_REQUEST, "response id mismatch")
        return resp.result

    def list_tools(self) -> list[dict]:
        return self.call("tools/list")["tools"]

    def call_tool(self, name: str, **arguments: Any) -> Any:
        return self.call("tools/call", {"name": name, "arguments": arguments})
