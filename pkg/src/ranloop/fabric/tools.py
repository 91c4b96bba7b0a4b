"""Tool discovery and invocation: the network-function control surface.

A ToolServer holds named handlers with declared parameter schemas; callers
discover descriptors via list_tools and invoke via call. Schema violations
surface as invalid-params errors naming the offending field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .envelope import RpcErrorCode

_TYPE_CHECKS = {
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "string": lambda v: isinstance(v, str),
    "boolean": lambda v: isinstance(v, bool),
}


class ToolError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass(frozen=True)
class ParamSpec:
    type: str
    required: bool = True
    minimum: float | None = None
    maximum: float | None = None
    description: str = ""

    def __post_init__(self):
        if self.type not in _TYPE_CHECKS:
            raise ValueError(f"unsupported param type {self.type!r}")


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    description_text: str
    param_schema: dict[str, ParamSpec] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description_text": self.description_text,
            "param_schema": {
                k: {
                    "type": p.type,
                    "required": p.required,
                    "minimum": p.minimum,
                    "maximum": p.maximum,
                    "description": p.description,
                }
                for k, p in self.param_schema.items()
            },
        }


def validate_args(schema: dict[str, ParamSpec], args: dict[str, Any]) -> None:
    """Raise ToolError(-32602) naming the first offending field."""
    if not isinstance(args, dict):
        raise ToolError(RpcErrorCode.INVALID_PARAMS, "arguments must be an object")
    for name in args:
        if name not in schema:
            raise ToolError(RpcErrorCode.INVALID_PARAMS, f"field '{name}': unknown parameter")
    for name, spec in schema.items():
        if name not in args:
            if spec.required:
                raise ToolError(RpcErrorCode.INVALID_PARAMS, f"field '{name}': required")
            continue
        value = args[name]
        if not _TYPE_CHECKS[spec.type](value):
            raise ToolError(
                RpcErrorCode.INVALID_PARAMS,
                f"field '{name}': expected {spec.type}, got {type(value).__name__}",
            )
        if spec.minimum is not None and value < spec.minimum:
            raise ToolError(
                RpcErrorCode.INVALID_PARAMS,
                f"field '{name}': {value} below minimum {spec.minimum}",
            )
        if spec.maximum is not None and value > spec.maximum:
            raise ToolError(
                RpcErrorCode.INVALID_PARAMS,
                f"field '{name}': {value} above maximum {spec.maximum}",
            )


class ToolServer:
    def __init__(self, name: str = "dapp"):
        self.name = name
        self._tools: dict[str, tuple[ToolDescriptor, Callable[..., Any]]] = {}

    def register_tool(self, desc: ToolDescriptor, handler: Callable[..., Any]) -> None:
        if desc.name in self._tools:
            raise ValueError(f"tool {desc.name!r} already registered")
        self._tools[desc.name] = (desc, handler)

    def list_tools(self) -> list[ToolDescriptor]:
        return [desc for desc, _ in self._tools.values()]

    def call_tool(self, name: str, args: dict[str, Any] | None = None) -> Any:
        args = args or {}
        entry = self._tools.get(name)
        if entry is None:
            raise ToolError(RpcErrorCode.METHOD_NOT_FOUND, f"unknown tool {name!r}")
        desc, handler = entry
        validate_args(desc.param_schema, args)
        try:
            result = handler(**args)
        except ToolError:
            raise
        except Exception as exc:  # handler bug surfaces as internal error
            raise ToolError(RpcErrorCode.INTERNAL_ERROR, f"tool {name!r} failed: {exc}") from exc
        return result if result is not None else {}
