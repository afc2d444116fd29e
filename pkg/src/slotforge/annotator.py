"""Whole-call annotation prompts and the completion-client contract.

The prompt hands an external LLM the entire call and asks for turn-by-turn
slot maps over an open label set: real-world entities, events, dates, times,
and numerals only, never abstract notions (issues, solutions, concepts,
advice, ideas). Completions come back in the same lenient dict format the
generation parser accepts, one line per turn, keyed by turn index:

    0: {'payment_amount': '€30'}
    1: {}

Live API clients are out of scope; :class:`MockCompletionClient` replays a
script file (JSONL mapping call_id to completion text) for tests and offline
pipelines. Retries are idempotent and bounded by :class:`RetryPolicy`.
"""

from __future__ import annotations

import json
import re
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

from .corpus import SLOT_LABEL_RE, Call, Turn
from .findings import Finding
from .genparse import ParseError, parse_slot_dict

DEFAULT_DENYLIST = ("issue", "solution", "concept", "advice", "idea")

_TURN_LINE_RE = re.compile(r"^\s*(\d+)\s*:\s*(.+)$")
_CALL_ID_RE = re.compile(r"^Call ID: (.+)$", re.MULTILINE)


class AnnotatorError(Exception):
    pass


class EmptyCall(AnnotatorError):
    pass


class TransportError(AnnotatorError):
    """The completion service failed; retrying is safe."""


class UnparseableAnnotation(AnnotatorError):
    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw  # kept verbatim for audit


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    base_delay: float = 0.5
    multiplier: float = 2.0

    def delays(self) -> list[float]:
        """Backoff before each retry (max_attempts - 1 entries)."""
        return [self.base_delay * self.multiplier**i for i in range(self.max_attempts - 1)]


class CompletionClient(ABC):
    """Text-completion service boundary.

    ``complete`` must be total: it returns text or raises TransportError, and
    repeating a request has no side effects beyond cost.
    """

    max_input_chars: int = 1_000_000
    timeout_s: float = 120.0

    @abstractmethod
    def complete(self, instruction: str) -> str: ...


class MockCompletionClient(CompletionClient):
    """Deterministic client replaying scripted completions keyed by call_id."""

    def __init__(self, script: Mapping[str, str] | str | Path):
        if isinstance(script, (str, Path)):
            loaded: dict[str, str] = {}
            with open(script, "r", encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        rec = json.loads(line)
                        loaded[rec["call_id"]] = rec["completion"]
            self.script = loaded
        else:
            self.script = dict(script)
        self.calls_made = 0

    def complete(self, instruction: str) -> str:
        self.calls_made += 1
        match = _CALL_ID_RE.search(instruction)
        if not match:
            raise TransportError("prompt carries no call id to script against")
        call_id = match.group(1)
        if call_id not in self.script:
            raise TransportError(f"no scripted completion for call {call_id!r}")
        return self.script[call_id]


def build_annotation_prompt(call: Call) -> str:
    """Whole-call, turn-by-turn slot-filling instruction.

    Deliberately names no slot labels: the annotator invents labels for
    whatever real-world mentions it finds.
    """
    if not call.turns:
        raise EmptyCall(f"call {call.call_id!r} has no turns")
    for turn in call.turns:
        if not turn.transcript.strip():
            raise EmptyCall(f"call {call.call_id!r} turn {turn.index} has an empty transcript")

    rendered = "\n".join(f"Turn {t.index} ({t.speaker}): {t.transcript}" for t in call.turns)
    return (
        "You are annotating a call-center conversation for slot filling.\n"
        f"Call ID: {call.call_id}\n"
        "Go through the call turn by turn and extract every mention that reflects "
        "a real-world entity, event, date, time, or numeral, choosing whatever slot "
        "label fits each mention best.\n"
        "Do not label abstract notions such as issues, solutions, broader concepts, "
        "advice, or ideas.\n"
        "Slot labels must be snake_case; slot values must quote the mention verbatim. "
        "If a turn contains no slots, give it an empty map; never invent values.\n"
        "Answer with one line per turn, nothing else, in the form\n"
        "<turn index>: {'label': 'value', ...}\n"
        "using the same turn indices as below.\n\n"
        f"{rendered}\n"
    )


def _parse_turn_lines(raw: str) -> tuple[dict[int, dict[str, str]], list[Finding]]:
    per_turn: dict[int, dict[str, str]] = {}
    findings: list[Finding] = []
    for line in raw.splitlines():
        match = _TURN_LINE_RE.match(line)
        if not match:
            continue
        index = int(match.group(1))
        try:
            slots, _repairs = parse_slot_dict(match.group(2))
        except ParseError as exc:
            findings.append(
                Finding("unparseable-turn", f"turn {index}: {exc}", turn_index=index)
            )
            continue
        per_turn[index] = slots
    return per_turn, findings


def validate_annotation(raw: str, call: Call, denylist=DEFAULT_DENYLIST) -> list[Finding]:
    """Advisory findings over a raw completion; never raises."""
    per_turn, findings = _parse_turn_lines(raw)
    if not per_turn and not findings:
        return [Finding("unparseable", "no turn annotations found in completion")]
    known = {t.index for t in call.turns}
    deny = {d.lower() for d in denylist}
    for index in sorted(per_turn):
        if index not in known:
            findings.append(
                Finding("unknown-turn", f"turn index {index} not in call", turn_index=index)
            )
        for label, value in per_turn[index].items():
            if not SLOT_LABEL_RE.fullmatch(label):
                findings.append(
                    Finding("bad-label", f"label {label!r} is not snake_case",
                            turn_index=index, label=label)
                )
            if label.lower() in deny:
                findings.append(
                    Finding("denylisted-label", f"label {label!r} names an abstract notion",
                            turn_index=index, label=label)
                )
            if not value:
                findings.append(
                    Finding("empty-value", f"label {label!r} has an empty value",
                            turn_index=index, label=label)
                )
    return findings


def _clean_slots(slots: dict[str, str]) -> dict[str, str]:
    # Keep only entries that survive corpus validation; the rest stay visible
    # through validate_annotation findings.
    return {
        label: value
        for label, value in slots.items()
        if SLOT_LABEL_RE.fullmatch(label) and value and value != "None"
    }


def complete_with_retries(
    client: CompletionClient,
    instruction: str,
    policy: RetryPolicy = RetryPolicy(),
    sleep: Callable[[float], None] = time.sleep,
) -> str:
    """Run one completion with bounded, backed-off retries."""
    if len(instruction) > client.max_input_chars:
        raise TransportError(
            f"prompt length {len(instruction)} exceeds client capability {client.max_input_chars}"
        )
    delays = policy.delays()
    for attempt in range(policy.max_attempts):
        try:
            return client.complete(instruction)
        except TransportError:
            if attempt >= policy.max_attempts - 1:
                raise
            sleep(delays[attempt])
    raise AssertionError("unreachable")


def apply_annotation(call: Call, raw: str) -> Call:
    """Materialize a raw completion as a validated, slot-populated call.

    Turns the completion does not mention keep empty slot maps; entries that
    would not validate as gold (bad labels, empty or 'None' values) are
    dropped. Raises UnparseableAnnotation when no turn line parses at all.
    """
    per_turn, _findings = _parse_turn_lines(raw)
    if not per_turn:
        raise UnparseableAnnotation(
            f"completion for call {call.call_id!r} has no parseable turn lines", raw
        )

    turns = tuple(
        Turn(
            index=t.index,
            speaker=t.speaker,
            audio_ref=t.audio_ref,
            transcript=t.transcript,
            slots=_clean_slots(per_turn.get(t.index, {})),
            meta=t.meta,
        )
        for t in call.turns
    )
    return Call(call_id=call.call_id, domain=call.domain, turns=turns, meta=call.meta)


def annotate_call(
    call: Call,
    client: CompletionClient,
    policy: RetryPolicy = RetryPolicy(),
    sleep: Callable[[float], None] = time.sleep,
) -> Call:
    """Prompt the client for the whole call and populate its gold slots.

    Raises TransportError once the retry budget is exhausted.
    """
    raw = complete_with_retries(client, build_annotation_prompt(call), policy, sleep)
    return apply_annotation(call, raw)
