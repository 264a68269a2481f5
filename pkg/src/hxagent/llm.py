"""Uniform access to the reasoning model.

Two backends: a deterministic scripted table for offline runs and tests, and
a chat-style HTTP backend for real providers. Every call flows through the
gateway, which owns retries, the per-purpose token ledger, and the append-only
prompt log.
"""
from __future__ import annotations

import base64
import csv
import json
import logging
import math
import os
import re
import threading
import time
from dataclasses import dataclass

import requests

from .errors import (
    DecisionParseError,
    LlmTimeoutError,
    LlmUnavailableError,
    ScriptedNoMatchError,
)

logger = logging.getLogger(__name__)

PURPOSE_NEXT_ACTION = "next_action"
PURPOSE_DUPLICATE = "duplicate_disambiguation"
PURPOSE_INPUT_CONTENT = "input_content"
PURPOSE_RULE_EXTRACTION = "rule_extraction"
PURPOSE_STATE_SUMMARY = "state_summary"

PURPOSES = (
    PURPOSE_NEXT_ACTION,
    PURPOSE_DUPLICATE,
    PURPOSE_INPUT_CONTENT,
    PURPOSE_RULE_EXTRACTION,
    PURPOSE_STATE_SUMMARY,
)

IMAGE_PURPOSES = frozenset({PURPOSE_DUPLICATE, PURPOSE_STATE_SUMMARY})

DEFAULT_MAX_OUTPUT = 1024
RETRY_ATTEMPTS = 3
RETRY_BASE_DELAY_S = 1.0


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    purpose: str
    images: tuple[bytes, ...] = ()
    temperature: float = 0.0
    max_output: int = DEFAULT_MAX_OUTPUT


@dataclass
class Completion:
    text: str
    prompt_tokens: int
    output_tokens: int


def estimate_tokens(text: str) -> int:
    """Deterministic fallback estimate when the backend reports no usage:
    ceil(characters / 4)."""
    return math.ceil(len(text) / 4)


class TokenLedger:
    """Per-purpose counters of calls and token usage; updates are atomic."""

    def __init__(self):
        self._lock = threading.Lock()
        self._rows: dict[str, dict[str, int]] = {
            purpose: {"calls": 0, "prompt_tokens": 0, "output_tokens": 0} for purpose in PURPOSES
        }

    def record(self, purpose: str, prompt_tokens: int, output_tokens: int) -> None:
        with self._lock:
            row = self._rows.setdefault(
                purpose, {"calls": 0, "prompt_tokens": 0, "output_tokens": 0}
            )
            row["calls"] += 1
            row["prompt_tokens"] += prompt_tokens
            row["output_tokens"] += output_tokens

    def snapshot(self) -> dict[str, dict[str, int]]:
        with self._lock:
            return {purpose: dict(row) for purpose, row in self._rows.items()}

    def totals(self) -> dict[str, int]:
        snap = self.snapshot()
        return {
            "calls": sum(r["calls"] for r in snap.values()),
            "prompt_tokens": sum(r["prompt_tokens"] for r in snap.values()),
            "output_tokens": sum(r["output_tokens"] for r in snap.values()),
        }

    def export_csv(self, path: str) -> None:
        snap = self.snapshot()
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["purpose", "calls", "prompt_tokens", "output_tokens"])
            for purpose in sorted(snap):
                row = snap[purpose]
                writer.writerow([purpose, row["calls"], row["prompt_tokens"], row["output_tokens"]])
            totals = self.totals()
            writer.writerow(["total", totals["calls"], totals["prompt_tokens"], totals["output_tokens"]])


class PromptLog:
    """Append-only record of every request/response, one JSON object per line."""

    def __init__(self, path: str | None = None):
        self.path = path
        self.entries: list[dict] = []
        self._lock = threading.Lock()
        if path:
            os.makedirs(os.path.dirname(path) or ".", exist_ok=True)

    def record(self, episode_id: str, request: CompletionRequest, completion: Completion) -> None:
        entry = {
            "episode_id": episode_id,
            "purpose": request.purpose,
            "prompt": request.prompt,
            "images": len(request.images),
            "response": completion.text,
            "prompt_tokens": completion.prompt_tokens,
            "output_tokens": completion.output_tokens,
        }
        with self._lock:
            self.entries.append(entry)
            if self.path:
                with open(self.path, "a") as handle:
                    handle.write(json.dumps(entry, ensure_ascii=False) + "\n")


# --- backends ---------------------------------------------------------------


@dataclass
class ScriptEntry:
    """One row of the scripted table. Matches when the purpose agrees, every
    ``contains`` string occurs in the prompt, every ``regex`` pattern finds a
    match, and no ``not_contains`` string does."""

    response: str
    purpose: str | None = None
    contains: tuple[str, ...] = ()
    not_contains: tuple[str, ...] = ()
    regex: tuple[str, ...] = ()

    def matches(self, request: CompletionRequest) -> bool:
        if self.purpose is not None and self.purpose != request.purpose:
            return False
        if any(needle not in request.prompt for needle in self.contains):
            return False
        if any(needle in request.prompt for needle in self.not_contains):
            return False
        if any(re.search(pattern, request.prompt) is None for pattern in self.regex):
            return False
        return True

    @staticmethod
    def from_dict(raw: dict) -> "ScriptEntry":
        return ScriptEntry(
            response=raw["response"],
            purpose=raw.get("purpose"),
            contains=tuple(raw.get("contains", ())),
            not_contains=tuple(raw.get("not_contains", ())),
            regex=tuple(raw.get("regex", ())),
        )

    def to_dict(self) -> dict:
        raw: dict = {"response": self.response}
        if self.purpose is not None:
            raw["purpose"] = self.purpose
        if self.contains:
            raw["contains"] = list(self.contains)
        if self.not_contains:
            raw["not_contains"] = list(self.not_contains)
        if self.regex:
            raw["regex"] = list(self.regex)
        return raw


class ScriptedBackend:
    """Table-driven backend: first matching entry wins. In strict mode an
    unmatched prompt is an error rather than a silent default."""

    kind = "scripted"

    def __init__(self, entries: list[ScriptEntry], strict: bool = True, default_response: str = "{}"):
        self.entries = list(entries)
        self.strict = strict
        self.default_response = default_response

    @staticmethod
    def from_file(path: str, strict: bool = True) -> "ScriptedBackend":
        with open(path) as handle:
            raw = json.load(handle)
        return ScriptedBackend([ScriptEntry.from_dict(item) for item in raw], strict=strict)

    def complete(self, request: CompletionRequest) -> Completion:
        for entry in self.entries:
            if entry.matches(request):
                return Completion(text=entry.response, prompt_tokens=0, output_tokens=0)
        if self.strict:
            raise ScriptedNoMatchError(
                f"no scripted entry matches purpose={request.purpose!r}; "
                f"prompt starts: {request.prompt[:120]!r}"
            )
        return Completion(text=self.default_response, prompt_tokens=0, output_tokens=0)


class RemoteBackend:
    """Chat-completions HTTP backend. One system+user exchange per call;
    images are inlined as base64 data URLs. Provider specifics stay in
    configuration (endpoint, model, credential environment variable)."""

    kind = "remote"

    def __init__(
        self,
        endpoint: str,
        model: str,
        credential_env: str = "HXAGENT_LLM_API_KEY",
        timeout_s: float = 60.0,
        system_prompt: str = "You are a precise web testing assistant.",
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.credential_env = credential_env
        self.timeout_s = timeout_s
        self.system_prompt = system_prompt
        self.session = session or requests.Session()

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        credential = os.environ.get(self.credential_env, "")
        if credential:
            headers["Authorization"] = f"Bearer {credential}"
        return headers

    def _user_content(self, request: CompletionRequest):
        if not request.images:
            return request.prompt
        content: list[dict] = [{"type": "text", "text": request.prompt}]
        for image in request.images:
            encoded = base64.b64encode(image).decode("ascii")
            content.append(
                {"type": "image_url", "image_url": {"url": f"data:image/png;base64,{encoded}"}}
            )
        return content

    def complete(self, request: CompletionRequest) -> Completion:
        payload = {
            "model": self.model,
            "temperature": request.temperature,
            "max_tokens": request.max_output,
            "messages": [
                {"role": "system", "content": self.system_prompt},
                {"role": "user", "content": self._user_content(request)},
            ],
        }
        try:
            response = self.session.post(
                self.endpoint, json=payload, headers=self._headers(), timeout=self.timeout_s
            )
        except requests.Timeout as exc:
            raise LlmTimeoutError(str(exc)) from exc
        except requests.RequestException as exc:
            raise LlmUnavailableError(str(exc)) from exc
        if response.status_code >= 500:
            raise LlmUnavailableError(f"backend returned {response.status_code}")
        if response.status_code >= 400:
            raise LlmUnavailableError(
                f"backend rejected the request ({response.status_code}): {response.text[:300]}"
            )
        body = response.json()
        text = body["choices"][0]["message"]["content"]
        usage = body.get("usage", {})
        return Completion(
            text=text,
            prompt_tokens=int(usage.get("prompt_tokens", 0)),
            output_tokens=int(usage.get("completion_tokens", 0)),
        )


class LLMGateway:
    """Single entry point for completions: validates requests, retries
    transient transport failures with exponential backoff, fills in token
    estimates when the backend reports none, and logs every exchange."""

    def __init__(
        self,
        backend,
        ledger: TokenLedger | None = None,
        prompt_log: PromptLog | None = None,
        retry_attempts: int = RETRY_ATTEMPTS,
        retry_base_delay_s: float = RETRY_BASE_DELAY_S,
        sleeper=time.sleep,
    ):
        if backend is None:
            raise LlmUnavailableError("no backend configured")
        self.backend = backend
        self.ledger = ledger or TokenLedger()
        self.prompt_log = prompt_log or PromptLog()
        self.retry_attempts = retry_attempts
        self.retry_base_delay_s = retry_base_delay_s
        self.sleeper = sleeper
        self.episode_id = ""

    def set_episode(self, episode_id: str) -> None:
        self.episode_id = episode_id

    def complete(self, request: CompletionRequest) -> Completion:
        if not request.prompt:
            raise ValueError("prompt must be non-empty")
        if request.images and request.purpose not in IMAGE_PURPOSES:
            raise ValueError(f"images are not permitted for purpose {request.purpose!r}")

        last_error: Exception | None = None
        for attempt in range(self.retry_attempts):
            try:
                completion = self.backend.complete(request)
                break
            except LlmTimeoutError:
                raise
            except LlmUnavailableError as exc:
                last_error = exc
                if attempt + 1 < self.retry_attempts:
                    self.sleeper(self.retry_base_delay_s * (2 ** attempt))
        else:
            raise LlmUnavailableError(
                f"backend failed after {self.retry_attempts} attempts: {last_error}"
            )

        if completion.prompt_tokens == 0 and completion.output_tokens == 0:
            completion.prompt_tokens = estimate_tokens(request.prompt)
            completion.output_tokens = estimate_tokens(completion.text)
        self.ledger.record(request.purpose, completion.prompt_tokens, completion.output_tokens)
        self.prompt_log.record(self.episode_id, request, completion)
        return completion

    def complete_decision(self, request: CompletionRequest, candidate_count: int) -> dict:
        """Completion plus decision parsing, with one repair round-trip: on a
        parse failure the error is appended to the prompt and the model gets a
        second try before the failure surfaces."""
        completion = self.complete(request)
        try:
            return parse_decision(completion.text, candidate_count=candidate_count)
        except DecisionParseError as first_error:
            repair_prompt = (
                f"{request.prompt}\n\nYour previous response could not be used: {first_error}. "
                "Respond with only the required JSON object."
            )
            repair = CompletionRequest(
                prompt=repair_prompt,
                purpose=request.purpose,
                images=request.images,
                temperature=request.temperature,
                max_output=request.max_output,
            )
            completion = self.complete(repair)
            return parse_decision(completion.text, candidate_count=candidate_count)


def _first_json_object(raw: str) -> dict | None:
    decoder = json.JSONDecoder()
    for index, char in enumerate(raw):
        if char != "{":
            continue
        try:
            value, _ = decoder.raw_decode(raw, index)
        except ValueError:
            continue
        if isinstance(value, dict):
            return value
    return None


def parse_decision(raw: str, candidate_count: int | None = None) -> dict:
    """Extract {chosen_action, action_description, reason} from model text.

    The first well-formed JSON object wins, so prose wrappers are tolerated.
    ``chosen_action`` must be an integer from 1 to ``candidate_count`` when a
    count is supplied; anything else is a parse failure.
    """
    obj = _first_json_object(raw)
    if obj is None:
        raise DecisionParseError("no JSON object found in model response")
    missing = [key for key in ("chosen_action", "action_description", "reason") if key not in obj]
    if missing:
        raise DecisionParseError(f"response JSON lacks fields: {', '.join(missing)}")
    chosen = obj["chosen_action"]
    if isinstance(chosen, str) and chosen.strip().isdigit():
        chosen = int(chosen.strip())
    if not isinstance(chosen, int) or isinstance(chosen, bool):
        raise DecisionParseError(f"chosen_action is not an integer: {obj['chosen_action']!r}")
    if chosen < 1 or (candidate_count is not None and chosen > candidate_count):
        raise DecisionParseError(
            f"chosen_action {chosen} outside the candidate range 1..{candidate_count}"
        )
    return {
        "chosen_action": chosen,
        "action_description": str(obj["action_description"]),
        "reason": str(obj["reason"]),
    }
