"""Load, validate, and split slot-annotated call corpora.

Interchange format is JSON Lines, one call per line:

    {"call_id": "c1", "domain": "banking", "turns": [
        {"index": 0, "speaker": "agent", "audio": "clips/c1_t0.wav",
         "text": "...", "slots": {"payment_amount": "€30"}}]}

Unknown fields are preserved under ``meta`` on both calls and turns, so
loading and re-serializing a canonical file is byte-identical. Gold slot
values are never the literal string "None": absence of a slot is absence of
the key. Loaded objects are immutable and safe to share across threads.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ._kernels import SplitMix64, fnv1a64

DOMAINS = ("banking", "telecom", "insurance", "retail", "other")
SPEAKERS = ("agent", "customer")

SLOT_LABEL_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


class CorpusError(Exception):
    """Base class for corpus validation failures."""


class MalformedLine(CorpusError):
    def __init__(self, lineno: int, cause: str):
        super().__init__(f"line {lineno}: {cause}")
        self.lineno = lineno
        self.cause = cause


class DuplicateCallId(CorpusError):
    def __init__(self, call_id: str, lineno: int):
        super().__init__(f"line {lineno}: duplicate call_id {call_id!r}")
        self.call_id = call_id
        self.lineno = lineno


class NonContiguousTurns(CorpusError):
    def __init__(self, call_id: str, detail: str):
        super().__init__(f"call {call_id!r}: {detail}")
        self.call_id = call_id


class InvalidRatios(CorpusError):
    pass


@dataclass(frozen=True)
class Turn:
    index: int
    speaker: str
    audio_ref: str
    transcript: str
    slots: dict[str, str] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def gold_labels(self) -> list[str]:
        """Slot labels in annotation order."""
        return list(self.slots.keys())


@dataclass(frozen=True)
class Call:
    call_id: str
    domain: str
    turns: tuple[Turn, ...]
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.turns)


def _validate_slots(slots: object, lineno: int) -> dict[str, str]:
    if not isinstance(slots, dict):
        raise MalformedLine(lineno, "'slots' must be an object")
    out: dict[str, str] = {}
    for label, value in slots.items():
        if not isinstance(label, str) or not SLOT_LABEL_RE.fullmatch(label):
            raise MalformedLine(lineno, f"slot label {label!r} is not snake_case")
        if not isinstance(value, str) or not value:
            raise MalformedLine(lineno, f"slot {label!r} has a non-string or empty value")
        if value == "None":
            raise MalformedLine(lineno, f"slot {label!r} carries literal 'None'; omit the key instead")
        out[label] = value
    return out


def _turn_from_record(rec: object, lineno: int) -> Turn:
    if not isinstance(rec, dict):
        raise MalformedLine(lineno, "turn entry is not an object")
    known = {"index", "speaker", "audio", "text", "slots", "meta"}
    for key in ("index", "speaker", "audio", "text"):
        if key not in rec:
            raise MalformedLine(lineno, f"turn missing {key!r}")
    index = rec["index"]
    if not isinstance(index, int) or isinstance(index, bool) or index < 0:
        raise MalformedLine(lineno, f"turn index {index!r} is not a non-negative integer")
    speaker = rec["speaker"]
    if speaker not in SPEAKERS:
        raise MalformedLine(lineno, f"unknown speaker {speaker!r}")
    if not isinstance(rec["audio"], str) or not isinstance(rec["text"], str):
        raise MalformedLine(lineno, "'audio' and 'text' must be strings")
    slots = _validate_slots(rec.get("slots", {}), lineno)
    meta = dict(rec.get("meta", {}))
    meta.update({k: v for k, v in rec.items() if k not in known})
    return Turn(
        index=index,
        speaker=speaker,
        audio_ref=rec["audio"],
        transcript=rec["text"],
        slots=slots,
        meta=meta,
    )


def call_from_record(rec: object, lineno: int = 0) -> Call:
    """Build a validated Call from one decoded JSONL record."""
    if not isinstance(rec, dict):
        raise MalformedLine(lineno, "record is not an object")
    known = {"call_id", "domain", "turns", "meta"}
    if "call_id" not in rec:
        raise MalformedLine(lineno, "missing 'call_id'")
    call_id = rec["call_id"]
    if not isinstance(call_id, str) or not call_id:
        raise MalformedLine(lineno, "'call_id' must be a non-empty string")
    domain = rec.get("domain")
    if domain not in DOMAINS:
        raise MalformedLine(lineno, f"unknown domain {domain!r}")
    raw_turns = rec.get("turns")
    if not isinstance(raw_turns, list):
        raise MalformedLine(lineno, "'turns' must be an array")
    turns = tuple(_turn_from_record(t, lineno) for t in raw_turns)
    for pos, turn in enumerate(turns):
        if turn.index != pos:
            raise NonContiguousTurns(
                call_id, f"turn at position {pos} has index {turn.index}; expected {pos}"
            )
    meta = dict(rec.get("meta", {}))
    meta.update({k: v for k, v in rec.items() if k not in known})
    return Call(call_id=call_id, domain=domain, turns=turns, meta=meta)


def call_to_record(call: Call) -> dict:
    rec: dict = {"call_id": call.call_id, "domain": call.domain, "turns": []}
    for t in call.turns:
        trec: dict = {
            "index": t.index,
            "speaker": t.speaker,
            "audio": t.audio_ref,
            "text": t.transcript,
            "slots": dict(t.slots),
        }
        if t.meta:
            trec["meta"] = t.meta
        rec["turns"].append(trec)
    if call.meta:
        rec["meta"] = call.meta
    return rec


def load_corpus(path: str | Path, errors: str = "raise"):
    """Load a JSONL corpus.

    errors="raise": return list[Call], raising on the first invalid line.
    errors="collect": return (list[Call], list[CorpusError]), skipping invalid
    lines so callers can report every problem in one pass.
    """
    if errors not in ("raise", "collect"):
        raise ValueError("errors must be 'raise' or 'collect'")
    calls: list[Call] = []
    issues: list[CorpusError] = []
    seen: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedLine(lineno, f"invalid JSON: {exc.msg}") from None
                call = call_from_record(rec, lineno)
                if call.call_id in seen:
                    raise DuplicateCallId(call.call_id, lineno)
                seen[call.call_id] = lineno
                calls.append(call)
            except CorpusError as exc:
                if errors == "raise":
                    raise
                issues.append(exc)
    if errors == "collect":
        return calls, issues
    return calls


def dumps_call(call: Call) -> str:
    """Canonical one-line serialization of a call."""
    return json.dumps(call_to_record(call), ensure_ascii=False)


def save_corpus(path: str | Path, calls: Iterable[Call]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for call in calls:
            fh.write(dumps_call(call) + "\n")


class SlotVocabulary:
    """Slot labels with per-label turn counts, tracked per corpus domain."""

    def __init__(self):
        self.counts: Counter[str] = Counter()
        self.domain_counts: dict[str, Counter[str]] = {}

    def add_turn(self, domain: str, labels: Iterable[str]) -> None:
        per_domain = self.domain_counts.setdefault(domain, Counter())
        for label in labels:
            self.counts[label] += 1
            per_domain[label] += 1

    def labels(self) -> list[str]:
        """All labels, lexicographic (the deterministic distractor pool order)."""
        return sorted(self.counts)

    def labels_for_domain(self, domain: str) -> list[str]:
        return sorted(self.domain_counts.get(domain, ()))

    def __contains__(self, label: str) -> bool:
        return label in self.counts

    def __len__(self) -> int:
        return len(self.counts)


def build_vocabulary(calls: Iterable[Call]) -> SlotVocabulary:
    """Union of gold labels; counts are the number of turns each label occurs in."""
    vocab = SlotVocabulary()
    for call in calls:
        for turn in call.turns:
            if turn.slots:
                vocab.add_turn(call.domain, turn.slots.keys())
    return vocab


def split_corpus(
    calls: list[Call], ratios: tuple[float, float, float], seed: int
) -> tuple[list[Call], list[Call], list[Call]]:
    """Partition calls into train/dev/test, stratified by domain.

    Splitting is by whole call so no transcript can leak across splits via a
    context window. Deterministic for a fixed seed regardless of input order.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise InvalidRatios(f"ratios must be three positive numbers, got {ratios!r}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise InvalidRatios(f"ratios must sum to 1, got {sum(ratios)!r}")

    by_domain: dict[str, list[Call]] = {}
    for call in calls:
        by_domain.setdefault(call.domain, []).append(call)

    splits: tuple[list[Call], list[Call], list[Call]] = ([], [], [])
    for domain in sorted(by_domain):
        group = sorted(by_domain[domain], key=lambda c: c.call_id)
        rng = SplitMix64(fnv1a64(f"{seed}|{domain}".encode("utf-8")))
        rng.shuffle(group)
        n = len(group)
        ideal = [r * n for r in ratios]
        base = [int(x) for x in ideal]
        remainder = n - sum(base)
        # Largest fractional part wins the leftover slots; ties favor train.
        order = sorted(range(3), key=lambda i: (-(ideal[i] - base[i]), i))
        for i in order[:remainder]:
            base[i] += 1
        start = 0
        for i, count in enumerate(base):
            splits[i].extend(group[start : start + count])
            start += count
    return splits
