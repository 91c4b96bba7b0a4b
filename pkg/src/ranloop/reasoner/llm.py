"""Remote chat-completion backend.

The prompt is posted to a configurable endpoint; the reply must contain
exactly one fenced JSON block matching the reasoner output schema. Schema
failures earn up to two corrective re-prompts, then the caller holds policy.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass

import httpx

from .output import OutputValidationError, ReasonerOutput
from .prompt import PromptContext

_FENCED_JSON = re.compile(r"```json\s*(.*?)```", re.DOTALL)

SCHEMA_REMINDER = (
    "Reply with exactly one fenced ```json block containing an object with "
    'fields "kind" (one of "actions", "sub_intents", "report"), "payload", '
    'and "rationale_text". No other fenced blocks.'
)


class BackendError(RuntimeError):
    """Transport failure or persistent schema failure; hold current policy."""


@dataclass(frozen=True)
class EndpointConfig:
    url: str
    model: str
    max_tokens: int = 1024
    temperature: float = 0.0
    auth_env: str = ""  # name of the env var holding the bearer token
    timeout_s: float = 30.0
    max_schema_retries: int = 2

    @classmethod
    def from_dict(cls, d: dict) -> "EndpointConfig":
        return cls(
            url=d["url"],
            model=d["model"],
            max_tokens=int(d.get("max_tokens", 1024)),
            temperature=float(d.get("temperature", 0.0)),
            auth_env=d.get("auth_env", ""),
            timeout_s=float(d.get("timeout_s", 30.0)),
            max_schema_retries=int(d.get("max_schema_retries", 2)),
        )


def extract_json_block(text: str) -> dict:
    blocks = _FENCED_JSON.findall(text)
    if len(blocks) != 1:
        raise OutputValidationError(
            "response", f"expected exactly one fenced json block, found {len(blocks)}"
        )
    try:
        obj = json.loads(blocks[0])
    except ValueError as exc:
        raise OutputValidationError("response", f"fenced block is not valid JSON: {exc}")
    if not isinstance(obj, dict):
        raise OutputValidationError("response", "fenced block must hold an object")
    return obj


def llm_decide(
    prompt: PromptContext,
    endpoint: EndpointConfig,
    transport: httpx.BaseTransport | None = None,
) -> ReasonerOutput:
    """One decision round-trip, with schema-failure re-prompts.

    Returns a parsed (not yet kind-validated) output; raises BackendError
    when the endpoint is unreachable or never produces valid structure.
    """
    headers = {"content-type": "application/json"}
    if endpoint.auth_env:
        token = os.environ.get(endpoint.auth_env, "")
        if token:
            headers["authorization"] = f"Bearer {token}"

    messages = [
        {"role": "system", "content": prompt.render()},
        {"role": "user", "content": prompt.task_text + "\n\n" + SCHEMA_REMINDER},
    ]

    client = httpx.Client(transport=transport, timeout=endpoint.timeout_s)
    retries = 0
    try:
        while True:
            body = {
                "model": endpoint.model,
                "max_tokens": endpoint.max_tokens,
                "temperature": endpoint.temperature,
                "messages": messages,
            }
            try:
                response = client.post(endpoint.url, json=body, headers=headers)
                response.raise_for_status()
                content = response.json()["choices"][0]["message"]["content"]
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                raise BackendError(f"chat endpoint failure: {exc}") from exc

            try:
                parsed = extract_json_block(content)
                output = ReasonerOutput.from_dict(parsed)
                if retries:
                    output = ReasonerOutput(
                        kind=output.kind,
                        payload=output.payload,
                        rationale_text=output.rationale_text
                        + f" [after {retries} schema retr{'y' if retries == 1 else 'ies'}]",
                    )
                return output
            except OutputValidationError as exc:
                retries += 1
                if retries > endpoint.max_schema_retries:
                    raise BackendError(
                        f"no schema-conformant reply after {retries} attempts: {exc}"
                    ) from exc
                messages.append({"role": "assistant", "content": content})
                messages.append(
                    {"role": "user", "content": f"Your reply was rejected ({exc}). {SCHEMA_REMINDER}"}
                )
    finally:
        client.close()


class LlmReasoner:
    """Backend adapter with the same decide() surface as the rule engine."""

    def __init__(self, endpoint: EndpointConfig, transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint
        self.transport = transport

    def decide(self, prompt: PromptContext, structured=None) -> ReasonerOutput:
        return llm_decide(prompt, self.endpoint, self.transport)
