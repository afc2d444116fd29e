"""Parse raw model generations into slot maps, leniently, with diagnostics.

Accepts both output shapes: reasoning generations (a think block followed by
a response block) and regular generations (a bare slot dict, possibly wrapped
in prose). The dict parser tolerates the mess LLMs actually produce — single
or double quotes, trailing commas, bare None/null, surrounding chatter — and
records every repair as a diagnostic so clean round-trips are verifiably
clean. Slot values are kept verbatim; normalization belongs to scoring.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .findings import Finding
from .reasoning_forge import DEFAULT_GRAMMAR, TagGrammar


class ParseError(Exception):
    pass


class NoDictFound(ParseError):
    pass


class MalformedDict(ParseError):
    def __init__(self, position: int, cause: str):
        super().__init__(f"at offset {position}: {cause}")
        self.position = position
        self.cause = cause


@dataclass(frozen=True)
class TagExtraction:
    inner: str
    start: int  # offset of the open tag
    end: int  # offset just past the close tag (or end of text if unclosed)
    findings: list[Finding]


@dataclass
class ParsedGeneration:
    mode: str  # "regular" | "reasoning" | "malformed"
    thinking: str | None
    slot_values: dict[str, str]
    diagnostics: list[Finding] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "mode": self.mode,
            "thinking": self.thinking,
            "slot_values": dict(self.slot_values),
            "diagnostics": [f.to_dict() for f in self.diagnostics],
        }


def extract_tagged(
    text: str, grammar: TagGrammar = DEFAULT_GRAMMAR, tag_name: str = "thinking"
) -> TagExtraction | None:
    """Content between the first open tag and its close tag.

    ``tag_name`` is "thinking" or "response". Both ``</tag>`` and ``<\\tag>``
    close forms are accepted. A missing close tag yields the content through
    end-of-text plus an imbalance finding; a missing open tag yields None.
    """
    if tag_name in ("thinking", "think"):
        open_tag, close_tag = grammar.open_think, grammar.close_think
    elif tag_name == "response":
        open_tag, close_tag = grammar.open_response, grammar.close_response
    else:
        raise ValueError(f"unknown tag name {tag_name!r}")

    start = text.find(open_tag)
    if start == -1:
        return None
    inner_start = start + len(open_tag)

    close_at = -1
    close_len = 0
    for form in grammar.close_forms(close_tag):
        pos = text.find(form, inner_start)
        if pos != -1 and (close_at == -1 or pos < close_at):
            close_at = pos
            close_len = len(form)
    if close_at == -1:
        return TagExtraction(
            inner=text[inner_start:],
            start=start,
            end=len(text),
            findings=[
                Finding("tag-imbalance", f"{open_tag} is never closed", position=start)
            ],
        )
    return TagExtraction(
        inner=text[inner_start:close_at],
        start=start,
        end=close_at + close_len,
        findings=[],
    )


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _read_quoted(text: str, pos: int) -> tuple[str, int]:
    quote = text[pos]
    pos += 1
    out: list[str] = []
    while pos < len(text):
        ch = text[pos]
        if ch == "\\":
            if pos + 1 >= len(text):
                raise MalformedDict(pos, "dangling escape")
            out.append(text[pos + 1])
            pos += 2
            continue
        if ch == quote:
            return "".join(out), pos + 1
        out.append(ch)
        pos += 1
    raise MalformedDict(pos, "unterminated string")


def _read_bare(text: str, pos: int, stops: str) -> tuple[str, int]:
    end = pos
    while end < len(text) and text[end] not in stops:
        end += 1
    return text[pos:end].strip(), end


def parse_slot_dict(text: str) -> tuple[dict[str, str], list[Finding]]:
    """Lenient flat-dict parse; returns (slot map, repair findings).

    Raises NoDictFound when there is no opening brace and MalformedDict when
    the dict cannot be recovered under the leniency rules.
    """
    findings: list[Finding] = []
    start = text.find("{")
    if start == -1:
        raise NoDictFound("no dict literal in text")
    if text[:start].strip():
        findings.append(Finding("leading-prose", "text before the dict was ignored", position=0))

    out: dict[str, str] = {}
    pos = _skip_ws(text, start + 1)
    if pos < len(text) and text[pos] == "}":
        pos += 1
    else:
        while True:
            if pos >= len(text):
                raise MalformedDict(pos, "unterminated dict")
            # Key.
            if text[pos] in "'\"":
                key, pos = _read_quoted(text, pos)
            else:
                key, pos = _read_bare(text, pos, ":,}")
                if not key:
                    raise MalformedDict(pos, "expected a key")
                findings.append(Finding("unquoted-key", f"bare key {key!r}", position=pos))
            pos = _skip_ws(text, pos)
            if pos >= len(text) or text[pos] != ":":
                raise MalformedDict(pos, "expected ':' after key")
            pos = _skip_ws(text, pos + 1)
            if pos >= len(text):
                raise MalformedDict(pos, "missing value")
            # Value.
            if text[pos] in "'\"":
                value, pos = _read_quoted(text, pos)
            else:
                value, pos = _read_bare(text, pos, ",}")
                if not value:
                    raise MalformedDict(pos, "missing value")
                if value.lower() in ("none", "null"):
                    findings.append(
                        Finding("bare-null", f"{value} normalized to 'None'", position=pos)
                    )
                    value = "None"
                else:
                    findings.append(
                        Finding("unquoted-value", f"bare value {value!r}", position=pos)
                    )
            if key in out:
                findings.append(
                    Finding("duplicate-key", f"{key!r} repeated; last value wins", label=key)
                )
            out[key] = value
            pos = _skip_ws(text, pos)
            if pos >= len(text):
                raise MalformedDict(pos, "unterminated dict")
            if text[pos] == ",":
                pos = _skip_ws(text, pos + 1)
                if pos < len(text) and text[pos] == "}":
                    findings.append(Finding("trailing-comma", "comma before '}'", position=pos))
                    pos += 1
                    break
                continue
            if text[pos] == "}":
                pos += 1
                break
            raise MalformedDict(pos, f"expected ',' or '}}', got {text[pos]!r}")

    if text[pos:].strip():
        findings.append(Finding("trailing-text", "text after the dict was ignored", position=pos))
    return out, findings


def parse_generation(text: str, grammar: TagGrammar = DEFAULT_GRAMMAR) -> ParsedGeneration:
    """Classify a generation and extract its slot map.

    Think block present: mode=reasoning; the dict comes from the response
    block, or from the text after the think block when response tags are
    missing (recorded as a finding). No think block: mode=regular, dict from
    the whole text. An unrecoverable dict gives mode=malformed with an empty
    slot map so scoring counts it as all-miss.
    """
    diagnostics: list[Finding] = []
    think = extract_tagged(text, grammar, "thinking")
    if think is not None:
        diagnostics.extend(think.findings)
        tail = text[think.end :]
        response = extract_tagged(tail, grammar, "response")
        if response is not None:
            diagnostics.extend(response.findings)
            payload = response.inner
            if tail[response.end :].strip():
                diagnostics.append(
                    Finding("trailing-text", "text after the response block", position=response.end)
                )
        else:
            payload = tail
            diagnostics.append(
                Finding("missing-response-tags", "no response block; parsed text after thinking")
            )
        thinking = think.inner.strip()
        mode = "reasoning"
    else:
        payload = text
        thinking = None
        mode = "regular"

    try:
        slots, repairs = parse_slot_dict(payload)
    except ParseError as exc:
        diagnostics.append(Finding("unparseable-dict", str(exc)))
        return ParsedGeneration("malformed", thinking, {}, diagnostics)
    diagnostics.extend(repairs)
    return ParsedGeneration(mode, thinking, slots, diagnostics)


def read_predictions(path: str | Path) -> dict[str, str]:
    """Predictions JSONL ({"id": ..., "generation": ...}) as an id -> text map."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            rec = json.loads(line)
            if "id" not in rec or "generation" not in rec:
                raise ParseError(f"line {lineno}: prediction needs 'id' and 'generation'")
            out[rec["id"]] = rec["generation"]
    return out
