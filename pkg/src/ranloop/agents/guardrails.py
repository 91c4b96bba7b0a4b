"""Hard bounds applied to every proposed control action before dispatch.

Clamp, don't reject: an out-of-range proposal is pulled to the nearest
allowed value so a misbehaving reasoner can never push the network outside
its safety envelope, only slow it down.
"""

from __future__ import annotations

import math

from .types import ControlAction, GuardrailConfig


class GuardrailViolation(ValueError):
    """A proposal was malformed beyond repair (non-finite value)."""


def apply_guardrails(
    proposed: ControlAction,
    current: float,
    guardrails: GuardrailConfig,
) -> ControlAction:
    """Clamp one proposal against the current applied value.

    SNR targets move at most max_snr_delta_per_cycle_db from `current` per
    cycle and always land inside the absolute bounds; throttle limits are
    clamped to their configured range.
    """
    if not math.isfinite(proposed.value):
        raise GuardrailViolation(f"non-finite proposal {proposed.value!r}")
    if not math.isfinite(current):
        raise GuardrailViolation(f"non-finite current value {current!r}")

    if proposed.kind == "snr_target":
        delta = guardrails.max_snr_delta_per_cycle_db
        lo, hi = guardrails.snr_target_bounds_db
        value = min(max(proposed.value, current - delta), current + delta)
        value = min(max(value, lo), hi)
    else:
        lo, hi = guardrails.throttle_bounds_bps
        value = min(max(proposed.value, lo), hi)

    return ControlAction(
        kind=proposed.kind,
        value=value,
        ue_id=proposed.ue_id,
        slice_id=proposed.slice_id,
        previous=current,
    )
