"""Turn regular examples into chain-of-thought targets, and build hybrid sets.

A reasoning target wraps a templated trace in think tags and repeats the
regular target, byte for byte, inside response tags:

    <thinking>
    I hear the utterance in the audio clip is
    ``` Ok, thanks again for calling today, "Patrick". ... ```
    I see that the information bearing mentions in the utterance are monthly | €30.
    The labels queried for are payment_frequency, payment_amount, new_limit, ...
    Based on the semantics of payment_frequency, payment_amount slots, the
    mentions in the utterance can be assigned to them. The others are all 'None'
    </thinking>
    <response>
    {'payment_frequency': 'monthly', ...}
    </response>

Hybrid datasets merge both modes, appending \\no_think / \\think control tags
to the instructions and interleaving the records with a deterministic,
seed-keyed shuffle.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from ._kernels import SplitMix64, fnv1a64
from .corpus import Call, Turn
from .prompt_forge import ForgeConfig, InstructionExample, derive_seed

THINK_TAG = "\\think"
NO_THINK_TAG = "\\no_think"


class ReasoningForgeError(Exception):
    pass


class SourceTurnMismatch(ReasoningForgeError):
    pass


class MismatchedOrigins(ReasoningForgeError):
    pass


@dataclass(frozen=True)
class TagGrammar:
    open_think: str = "<thinking>"
    close_think: str = "</thinking>"
    open_response: str = "<response>"
    close_response: str = "</response>"

    def close_forms(self, close_tag: str) -> tuple[str, ...]:
        """Accepted orthographies of a close tag: ``</tag>`` and ``<\\tag>``."""
        if close_tag.startswith("</"):
            return (close_tag, "<\\" + close_tag[2:])
        return (close_tag,)


DEFAULT_GRAMMAR = TagGrammar()


@dataclass(frozen=True)
class ReasoningTrace:
    transcript: str
    mentions: list[str]
    queried_labels: list[str]  # empty for the unqueried case
    assigned_labels: list[str]
    justification: str


def order_mentions(turn: Turn) -> list[str]:
    """Unique gold values, by first appearance in the transcript.

    Values the transcript does not contain verbatim keep their annotation
    order, after the located ones.
    """
    seen: set[str] = set()
    located: list[tuple[int, int, str]] = []
    unlocated: list[str] = []
    for ann_idx, value in enumerate(turn.slots.values()):
        if value in seen:
            continue
        seen.add(value)
        pos = turn.transcript.find(value)
        if pos >= 0:
            located.append((pos, ann_idx, value))
        else:
            unlocated.append(value)
    located.sort()
    return [value for _, _, value in located] + unlocated


def _justification(assigned: Sequence[str], queried: Sequence[str]) -> str:
    if assigned:
        sentence = (
            f"Based on the semantics of {', '.join(assigned)} slots, "
            "the mentions in the utterance can be assigned to them."
        )
        if queried and len(assigned) < len(queried):
            sentence += " The others are all 'None'"
        return sentence
    if queried:
        return "All the queried labels are 'None'"
    return "There are no slot values to assign."


def build_trace(turn: Turn, queried_slots: Sequence[str] | None) -> ReasoningTrace:
    gold = turn.gold_labels()
    if queried_slots is None:
        assigned = gold
        queried: list[str] = []
    else:
        assigned = [label for label in gold if label in queried_slots]
        # Gold first (annotation order), then the distractors in prompt order.
        queried = assigned + [q for q in queried_slots if q not in turn.slots]
    return ReasoningTrace(
        transcript=turn.transcript,
        mentions=order_mentions(turn),
        queried_labels=queried,
        assigned_labels=assigned,
        justification=_justification(assigned, queried),
    )


def render_trace(trace: ReasoningTrace) -> str:
    lines = [
        "I hear the utterance in the audio clip is",
        f"``` {trace.transcript} ```",
    ]
    if trace.mentions:
        lines.append(
            "I see that the information bearing mentions in the utterance are "
            f"{' | '.join(trace.mentions)}."
        )
    else:
        lines.append("I see that there are no information bearing mentions in the utterance.")
    if trace.queried_labels:
        lines.append(f"The labels queried for are {', '.join(trace.queried_labels)}")
    lines.append(trace.justification)
    return "\n".join(lines)


def forge_reasoning_example(
    regular: InstructionExample, turn: Turn, grammar: TagGrammar = DEFAULT_GRAMMAR
) -> InstructionExample:
    """Reasoning twin of a regular example; instruction and audio unchanged."""
    if regular.mode != "regular":
        raise ValueError(f"expected a regular example, got mode {regular.mode!r}")
    if regular.meta.get("turn") != turn.index or regular.audio_ref != turn.audio_ref:
        raise SourceTurnMismatch(
            f"example {regular.example_id!r} was not forged from turn {turn.index}"
        )
    trace = build_trace(turn, regular.queried_slots)
    target = (
        f"{grammar.open_think}\n{render_trace(trace)}\n{grammar.close_think}\n"
        f"{grammar.open_response}\n{regular.target}\n{grammar.close_response}"
    )
    base_id = regular.example_id
    if base_id.endswith(":regular"):
        base_id = base_id[: -len(":regular")]
    return replace(
        regular,
        example_id=f"{base_id}:reasoning",
        mode="reasoning",
        target=target,
        meta=dict(regular.meta),
    )


def forge_reasoning_dataset(
    calls: Sequence[Call],
    config: ForgeConfig,
    regular_examples: Sequence[InstructionExample] | None = None,
    grammar: TagGrammar = DEFAULT_GRAMMAR,
    max_workers: int | None = None,
) -> list[InstructionExample]:
    from .prompt_forge import forge_regular_dataset

    if regular_examples is None:
        regular_examples = forge_regular_dataset(calls, config, max_workers=max_workers)
    turns = {(call.call_id, turn.index): turn for call in calls for turn in call.turns}
    return [
        forge_reasoning_example(ex, turns[(ex.meta["call_id"], ex.meta["turn"])], grammar)
        for ex in regular_examples
    ]


def _interleave_key(example: InstructionExample, master_seed: int) -> int:
    seed = derive_seed(master_seed, example.meta["call_id"], example.meta["turn"])
    return SplitMix64(seed ^ fnv1a64(example.mode.encode("utf-8"))).next_u64()


def forge_hybrid_dataset(
    regular_set: Sequence[InstructionExample],
    reasoning_set: Sequence[InstructionExample],
    config: ForgeConfig,
) -> list[InstructionExample]:
    """Merge both modes with \\no_think / \\think control tags.

    Both sets must cover the same turns of the same corpus. The merged order
    is a deterministic shuffle keyed from each example's derived seed, so it
    is stable across runs and schedules.
    """
    regular_keys = sorted((ex.meta["call_id"], ex.meta["turn"]) for ex in regular_set)
    reasoning_keys = sorted((ex.meta["call_id"], ex.meta["turn"]) for ex in reasoning_set)
    if regular_keys != reasoning_keys:
        raise MismatchedOrigins("regular and reasoning sets cover different turns")

    merged: list[InstructionExample] = []
    for ex in regular_set:
        if ex.mode != "regular":
            raise MismatchedOrigins(f"{ex.example_id!r} in the regular set has mode {ex.mode!r}")
        merged.append(
            replace(ex, control_tag="no_think", instruction=ex.instruction + " " + NO_THINK_TAG)
        )
    for ex in reasoning_set:
        if ex.mode != "reasoning":
            raise MismatchedOrigins(f"{ex.example_id!r} in the reasoning set has mode {ex.mode!r}")
        merged.append(
            replace(ex, control_tag="think", instruction=ex.instruction + " " + THINK_TAG)
        )

    merged.sort(key=lambda ex: (_interleave_key(ex, config.master_seed), ex.example_id))
    return merged
