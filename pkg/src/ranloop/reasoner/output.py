"""Reasoner output schema and strict validation.

Nothing a backend produces reaches the guardrail stage unvalidated: kinds
must match expectations, numeric fields must be finite numbers, and unknown
fields are rejected outright. Range checking stays with the guardrails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

OUTPUT_KINDS = ("actions", "sub_intents", "report")

_ACTION_FIELDS = {"kind", "ue_id", "slice_id", "value"}
_SUB_INTENT_FIELDS = {"recipient_role", "body_text", "requirements"}
_REQUIREMENT_FIELDS = {
    "slice_id",
    "priority",
    "min_throughput_bps",
    "max_delay_s",
    "battery_saving",
    "spectral_efficiency_focus",
}
_REPORT_FIELDS = {"summary_text", "metrics", "constraints"}


class OutputValidationError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"field '{field}': {message}")
        self.field = field


@dataclass(frozen=True)
class ReasonerOutput:
    kind: str
    payload: Any
    rationale_text: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "payload": self.payload,
                "rationale_text": self.rationale_text}

    @classmethod
    def from_dict(cls, d: dict) -> "ReasonerOutput":
        missing = {"kind", "payload", "rationale_text"} - set(d)
        if missing:
            raise OutputValidationError(sorted(missing)[0], "required")
        extra = set(d) - {"kind", "payload", "rationale_text"}
        if extra:
            raise OutputValidationError(sorted(extra)[0], "unknown field")
        return cls(kind=d["kind"], payload=d["payload"], rationale_text=d["rationale_text"])


def _require_finite_number(field: str, value: Any) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise OutputValidationError(field, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise OutputValidationError(field, f"not finite: {value!r}")


def _validate_action(i: int, action: Any) -> None:
    prefix = f"payload[{i}]"
    if not isinstance(action, dict):
        raise OutputValidationError(prefix, "action must be an object")
    extra = set(action) - _ACTION_FIELDS
    if extra:
        raise OutputValidationError(f"{prefix}.{sorted(extra)[0]}", "unknown field")
    kind = action.get("kind")
    if kind == "snr_target":
        if not isinstance(action.get("ue_id"), int) or isinstance(action.get("ue_id"), bool):
            raise OutputValidationError(f"{prefix}.ue_id", "expected an integer")
    elif kind == "throttle_limit":
        if not isinstance(action.get("slice_id"), int) or isinstance(action.get("slice_id"), bool):
            raise OutputValidationError(f"{prefix}.slice_id", "expected an integer")
    else:
        raise OutputValidationError(f"{prefix}.kind", f"unknown action kind {kind!r}")
    if "value" not in action:
        raise OutputValidationError(f"{prefix}.value", "required")
    _require_finite_number(f"{prefix}.value", action["value"])


def _validate_sub_intent(i: int, sub: Any) -> None:
    prefix = f"payload[{i}]"
    if not isinstance(sub, dict):
        raise OutputValidationError(prefix, "sub-intent must be an object")
    extra = set(sub) - _SUB_INTENT_FIELDS
    if extra:
        raise OutputValidationError(f"{prefix}.{sorted(extra)[0]}", "unknown field")
    if not isinstance(sub.get("recipient_role"), str) or not sub.get("recipient_role"):
        raise OutputValidationError(f"{prefix}.recipient_role", "required string")
    if not isinstance(sub.get("body_text"), str) or not sub.get("body_text"):
        raise OutputValidationError(f"{prefix}.body_text", "required non-empty string")
    reqs = sub.get("requirements", [])
    if not isinstance(reqs, list):
        raise OutputValidationError(f"{prefix}.requirements", "expected a list")
    for j, req in enumerate(reqs):
        if not isinstance(req, dict):
            raise OutputValidationError(f"{prefix}.requirements[{j}]", "expected an object")
        extra = set(req) - _REQUIREMENT_FIELDS
        if extra:
            raise OutputValidationError(
                f"{prefix}.requirements[{j}].{sorted(extra)[0]}", "unknown field"
            )
        for numeric in ("min_throughput_bps", "max_delay_s"):
            if req.get(numeric) is not None:
                _require_finite_number(f"{prefix}.requirements[{j}].{numeric}", req[numeric])


def validate_output(output: ReasonerOutput, expected_kind: str) -> ReasonerOutput:
    if expected_kind not in OUTPUT_KINDS:
        raise ValueError(f"expected_kind {expected_kind!r} not in {OUTPUT_KINDS}")
    if output.kind != expected_kind:
        raise OutputValidationError("kind", f"expected {expected_kind!r}, got {output.kind!r}")
    if not isinstance(output.rationale_text, str) or not output.rationale_text:
        raise OutputValidationError("rationale_text", "required non-empty string")

    if output.kind == "actions":
        if not isinstance(output.payload, list):
            raise OutputValidationError("payload", "expected a list of actions")
        for i, action in enumerate(output.payload):
            _validate_action(i, action)
    elif output.kind == "sub_intents":
        if not isinstance(output.payload, list):
            raise OutputValidationError("payload", "expected a list of sub-intents")
        for i, sub in enumerate(output.payload):
            _validate_sub_intent(i, sub)
    else:
        if not isinstance(output.payload, dict):
            raise OutputValidationError("payload", "expected a report object")
        extra = set(output.payload) - _REPORT_FIELDS
        if extra:
            raise OutputValidationError(f"payload.{sorted(extra)[0]}", "unknown field")
        if not output.payload.get("summary_text"):
            raise OutputValidationError("payload.summary_text", "required non-empty string")
    return output
