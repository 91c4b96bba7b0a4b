"""JSON-RPC 2.0 envelope model and codec.

One envelope = one frame on every transport. Requests carry a method;
responses carry exactly one of result/error and echo the request id.
Responses with a JSON null result are not used by this system, so "result
present" can be modeled as "result is not None".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum
from typing import Any


class RpcErrorCode(IntEnum):
    PARSE_ERROR = -32700
    INVALID_REQUEST = -32600
    METHOD_NOT_FOUND = -32601
    INVALID_PARAMS = -32602
    INTERNAL_ERROR = -32603


@dataclass(frozen=True)
class RpcError:
    code: int
    message: str


class ProtocolError(Exception):
    """Raised when bytes cannot be turned into a valid envelope."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass(frozen=True)
class RpcEnvelope:
    method: str | None = None
    id: int | str | None = None
    params: Any = None
    result: Any = None
    error: RpcError | None = None

    @property
    def is_request(self) -> bool:
        return self.method is not None

    @property
    def is_notification(self) -> bool:
        return self.method is not None and self.id is None

    @property
    def is_response(self) -> bool:
        return self.method is None

    @classmethod
    def request(cls, method: str, params: Any = None, id: int | str | None = None):
        return cls(method=method, params=params, id=id)

    @classmethod
    def response(cls, id: int | str, result: Any):
        return cls(id=id, result=result)

    @classmethod
    def failure(cls, id: int | str | None, code: int, message: str):
        return cls(id=id, error=RpcError(int(code), message))


def _validate(env: RpcEnvelope) -> None:
    if env.method is not None:
        if not isinstance(env.method, str) or not env.method:
            raise ProtocolError(RpcErrorCode.INVALID_REQUEST, "method must be a non-empty string")
        if env.result is not None or env.error is not None:
            raise ProtocolError(
                RpcErrorCode.INVALID_REQUEST, "request cannot carry result or error"
            )
    else:
        if env.result is None and env.error is None:
            raise ProtocolError(
                RpcErrorCode.INVALID_REQUEST, "response must carry result or error"
            )
        if env.result is not None and env.error is not None:
            raise ProtocolError(
                RpcErrorCode.INVALID_REQUEST, "response must carry exactly one of result/error"
            )
    if env.id is not None and not isinstance(env.id, (int, str)):
        raise ProtocolError(RpcErrorCode.INVALID_REQUEST, "id must be an integer or string")


def encode_envelope(env: RpcEnvelope) -> bytes:
    _validate(env)
    frame: dict[str, Any] = {"jsonrpc": "2.0"}
    if env.method is not None:
        frame["method"] = env.method
        if env.params is not None:
            frame["params"] = env.params
        if env.id is not None:
            frame["id"] = env.id
    else:
        frame["id"] = env.id
        if env.error is not None:
            frame["error"] = {"code": env.error.code, "message": env.error.message}
        else:
            frame["result"] = env.result
    return json.dumps(frame, sort_keys=True, separators=(",", ":")).encode("utf-8")


def decode_envelope(data: bytes | str) -> RpcEnvelope:
    try:
        obj = json.loads(data)
    except (ValueError, UnicodeDecodeError) as exc:
        raise ProtocolError(RpcErrorCode.PARSE_ERROR, f"unparseable frame: {exc}") from exc

    if not isinstance(obj, dict):
        raise ProtocolError(RpcErrorCode.INVALID_REQUEST, "frame must be a JSON object")
    if obj.get("jsonrpc") != "2.0":
        raise ProtocolError(RpcErrorCode.INVALID_REQUEST, "missing jsonrpc 2.0 marker")

    known = {"jsonrpc", "method", "params", "id", "result", "error"}
    unknown = set(obj) - known
    if unknown:
        raise ProtocolError(
            RpcErrorCode.INVALID_REQUEST, f"unknown frame fields: {sorted(unknown)}"
        )

    env_id = obj.get("id")
    if env_id is not None and not isinstance(env_id, (int, str)):
        raise ProtocolError(RpcErrorCode.INVALID_REQUEST, "id must be an integer or string")

    if "method" in obj:
        method = obj["method"]
        if not isinstance(method, str) or not method:
            raise ProtocolError(RpcErrorCode.INVALID_REQUEST, "method must be a non-empty string")
        if "result" in obj or "error" in obj:
            raise ProtocolError(
                RpcErrorCode.INVALID_REQUEST, "request cannot carry result or error"
            )
        return RpcEnvelope(method=method, params=obj.get("params"), id=env_id)

    has_result = "result" in obj
    has_error = "error" in obj
    if has_result == has_error:
        raise ProtocolError(
            RpcErrorCode.INVALID_REQUEST,
            "response must carry exactly one of result/error",
        )
    if has_error:
        err = obj["error"]
        if (
            not isinstance(err, dict)
            or not isinstance(err.get("code"), int)
            or isinstance(err.get("code"), bool)
            or not isinstance(err.get("message"), str)
        ):
            raise ProtocolError(
                RpcErrorCode.INVALID_REQUEST, "error must be {code: int, message: str}"
            )
        return RpcEnvelope(id=env_id, error=RpcError(err["code"], err["message"]))
    if obj["result"] is None:
        raise ProtocolError(RpcErrorCode.INVALID_REQUEST, "null results are not supported")
    return RpcEnvelope(id=env_id, result=obj["result"])
