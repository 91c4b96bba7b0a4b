from .envelope import (
    RpcEnvelope,
    RpcError,
    RpcErrorCode,
    ProtocolError,
    decode_envelope,
    encode_envelope,
)
from .tools import ParamSpec, ToolDescriptor, ToolError, ToolServer, validate_args
from .bus import A2aMessage, DeadLetter, MessageBus, Subscription, MESSAGE_KINDS
from .tcp import FrameClient, serve_dispatcher, read_frame, write_frame

__all__ = [
    "RpcEnvelope",
    "RpcError",
    "RpcErrorCode",
    "ProtocolError",
    "decode_envelope",
    "encode_envelope",
    "ParamSpec",
    "ToolDescriptor",
    "ToolError",
    "ToolServer",
    "validate_args",
    "A2aMessage",
    "DeadLetter",
    "MessageBus",
    "Subscription",
    "MESSAGE_KINDS",
    "FrameClient",
    "serve_dispatcher",
    "read_frame",
    "write_frame",
]
