"""Forge regular (direct-answer) instruction examples from a corpus.

Each turn becomes one example. The case family (plain / with context / with
query / both), the prompt template, the context size T, and the queried-slot
set with its S distractors are all drawn from a splitmix64 stream seeded per
example by :func:`derive_seed`, so the forged dataset is a pure function of
(corpus, config) no matter how the work is scheduled.

Dataset interchange is JSON Lines, one example per line:

    {"id": "c1:t7:regular", "audio": "clips/c1_t7.wav", "context": ["..."],
     "instruction": "...", "queried_slots": ["..."]|null, "mode": "regular",
     "control_tag": null, "target": "{'payment_amount': '€30'}",
     "meta": {"call_id": "c1", "turn": 7, "T": 2, "S": 3, "template": 4,
              "case": "with_context_and_query"}}

Targets mirror the training format exactly: a single-quoted dict literal in
which queried-but-absent slots carry the string 'None'.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import templates
from ._kernels import SplitMix64, fnv1a64
from .corpus import Call, SlotVocabulary, Turn, build_vocabulary

CASES = ("plain", "with_context", "with_query", "with_context_and_query")
CONTEXT_CASES = frozenset({"with_context", "with_context_and_query"})
QUERY_CASES = frozenset({"with_query", "with_context_and_query"})

QUERIED_PLACEHOLDER = "{queried_slots}"
CONTEXT_PLACEHOLDER = "{context}"
CONTEXT_LINE_PREFIX = "prev: "


class ForgeError(Exception):
    """Base class for forging failures."""


class EmptyVocabulary(ForgeError):
    pass


class UnresolvedPlaceholder(ForgeError):
    pass


class TemplateBankError(ForgeError):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    case: str
    text: str
    format_directive: str

    def validate(self) -> None:
        if self.case not in CASES:
            raise TemplateBankError(f"unknown case {self.case!r}")
        if (self.case in QUERY_CASES) != (QUERIED_PLACEHOLDER in self.text):
            raise TemplateBankError(
                f"{self.case} template must contain {QUERIED_PLACEHOLDER} iff it queries slots: {self.text!r}"
            )
        if (self.case in CONTEXT_CASES) != (CONTEXT_PLACEHOLDER in self.text):
            raise TemplateBankError(
                f"{self.case} template must contain {CONTEXT_PLACEHOLDER} iff it uses context: {self.text!r}"
            )
        if not self.format_directive.strip():
            raise TemplateBankError("template is missing an output-format directive")


def default_template_banks() -> dict[str, list[PromptTemplate]]:
    raw = {
        "plain": templates.PLAIN,
        "with_context": templates.WITH_CONTEXT,
        "with_query": templates.WITH_QUERY,
        "with_context_and_query": templates.WITH_CONTEXT_AND_QUERY,
    }
    return {
        case: [PromptTemplate(case, text, directive) for text, directive in bank]
        for case, bank in raw.items()
    }


@dataclass
class ForgeConfig:
    master_seed: int = 0
    context_max: int = 3
    distractors_min: int = 1
    distractors_max: int = 5
    prompts_per_case: int = 10
    case_weights: dict[str, int] = field(default_factory=lambda: {c: 1 for c in CASES})
    distractor_pool: str = "corpus"  # or "domain"
    template_banks: dict[str, list[PromptTemplate]] = field(default_factory=default_template_banks)

    def __post_init__(self):
        if self.context_max < 0:
            raise ForgeError("context_max must be >= 0")
        if not (1 <= self.distractors_min <= self.distractors_max):
            raise ForgeError("need 1 <= distractors_min <= distractors_max")
        if self.distractor_pool not in ("corpus", "domain"):
            raise ForgeError(f"unknown distractor_pool {self.distractor_pool!r}")
        if set(self.case_weights) != set(CASES) or any(
            not isinstance(w, int) or w < 0 for w in self.case_weights.values()
        ):
            raise ForgeError("case_weights must give a non-negative integer for each case")
        if sum(self.case_weights.values()) <= 0:
            raise ForgeError("case_weights must enable at least one case")
        for case in CASES:
            bank = self.template_banks.get(case, [])
            if len(bank) != self.prompts_per_case:
                raise TemplateBankError(
                    f"{case} bank has {len(bank)} templates; expected {self.prompts_per_case}"
                )
            for tpl in bank:
                tpl.validate()


@dataclass
class InstructionExample:
    example_id: str
    audio_ref: str
    context: list[str]
    instruction: str
    queried_slots: list[str] | None
    mode: str  # "regular" | "reasoning"
    control_tag: str | None  # None | "think" | "no_think"
    target: str
    meta: dict

    def to_record(self) -> dict:
        return {
            "id": self.example_id,
            "audio": self.audio_ref,
            "context": list(self.context),
            "instruction": self.instruction,
            "queried_slots": list(self.queried_slots) if self.queried_slots is not None else None,
            "mode": self.mode,
            "control_tag": self.control_tag,
            "target": self.target,
            "meta": dict(self.meta),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "InstructionExample":
        return cls(
            example_id=rec["id"],
            audio_ref=rec["audio"],
            context=list(rec.get("context", [])),
            instruction=rec["instruction"],
            queried_slots=list(rec["queried_slots"]) if rec.get("queried_slots") is not None else None,
            mode=rec["mode"],
            control_tag=rec.get("control_tag"),
            target=rec["target"],
            meta=dict(rec.get("meta", {})),
        )


def derive_seed(master_seed: int, call_id: str, turn_index: int) -> int:
    """Per-example seed: FNV-1a of "call_id|turn_index|master_seed".

    Depends only on the example's identity, never on iteration order, so
    parallel forging reproduces serial forging bit for bit.
    """
    return fnv1a64(f"{call_id}|{turn_index}|{master_seed}".encode("utf-8"))


def select_context(call: Call, turn_index: int, rng: SplitMix64, context_max: int = 3) -> list[str]:
    """Transcripts of the T preceding turns, T ~ U{0..min(context_max, turn_index)}."""
    if not 0 <= turn_index < len(call.turns):
        raise ForgeError(f"turn index {turn_index} out of range for call {call.call_id!r}")
    t = rng.randint(0, min(context_max, turn_index))
    return [call.turns[i].transcript for i in range(turn_index - t, turn_index)]


@dataclass(frozen=True)
class QueriedSelection:
    labels: list[str]  # final (shuffled) order, as asked in the prompt
    n_distractors: int
    shortfall: bool


def select_queried_slots(
    gold_labels: Sequence[str],
    vocabulary: SlotVocabulary,
    rng: SplitMix64,
    distractors_min: int = 1,
    distractors_max: int = 5,
    pool: Sequence[str] | None = None,
) -> QueriedSelection:
    """Gold labels plus S ~ U{min..max} distractors drawn from the vocabulary.

    When the pool cannot supply S distractors, every candidate is used and the
    selection is flagged as a shortfall. The combined list is shuffled so the
    gold labels' position gives nothing away.
    """
    if len(vocabulary) == 0:
        raise EmptyVocabulary("cannot sample distractors from an empty vocabulary")
    candidates = [label for label in (pool if pool is not None else vocabulary.labels())
                  if label not in gold_labels]
    s = rng.randint(distractors_min, distractors_max)
    shortfall = len(candidates) < s
    distractors = rng.sample(candidates, min(s, len(candidates)))
    labels = list(gold_labels) + distractors
    rng.shuffle(labels)
    return QueriedSelection(labels=labels, n_distractors=len(distractors), shortfall=shortfall)


def render_prompt(
    template: PromptTemplate,
    queried_slots: Sequence[str] | None = None,
    context: Sequence[str] | None = None,
) -> str:
    """Substitute placeholders and append the output-format directive."""
    body = template.text
    if QUERIED_PLACEHOLDER in body:
        if queried_slots is None:
            raise UnresolvedPlaceholder(f"template needs queried slots: {template.text!r}")
        body = body.replace(QUERIED_PLACEHOLDER, ", ".join(queried_slots))
    elif queried_slots is not None:
        raise UnresolvedPlaceholder("queried slots given but template has no placeholder for them")
    if CONTEXT_PLACEHOLDER in body:
        if context is None:
            raise UnresolvedPlaceholder(f"template needs context: {template.text!r}")
        body = body.replace(
            CONTEXT_PLACEHOLDER, "\n".join(CONTEXT_LINE_PREFIX + line for line in context)
        )
    elif context is not None:
        raise UnresolvedPlaceholder("context given but template has no placeholder for it")
    return body + " " + template.format_directive


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace("'", "\\'")


def render_slot_dict(mapping: dict[str, str]) -> str:
    """Single-quoted dict literal, the exact target/output format."""
    body = ", ".join(f"'{_escape(k)}': '{_escape(v)}'" for k, v in mapping.items())
    return "{" + body + "}"


def build_target_map(turn: Turn, queried_slots: Sequence[str] | None) -> dict[str, str]:
    """Slot map a perfect answer would produce.

    Queried: every queried label, gold values first (in turn annotation
    order), remaining queried labels as 'None', in prompt order. Unqueried:
    exactly the turn's gold slots.
    """
    if queried_slots is None:
        return dict(turn.slots)
    ordered = [l for l in turn.gold_labels() if l in queried_slots]
    ordered += [q for q in queried_slots if q not in turn.slots]
    return {label: turn.slots.get(label, "None") for label in ordered}


def _draw_case(rng: SplitMix64, weights: dict[str, int]) -> str:
    total = sum(weights[c] for c in CASES)
    pick = rng.randbelow(total)
    acc = 0
    for case in CASES:
        acc += weights[case]
        if pick < acc:
            return case
    raise AssertionError("unreachable")


def forge_regular_example(
    call: Call, turn_index: int, config: ForgeConfig, vocabulary: SlotVocabulary
) -> InstructionExample:
    turn = call.turns[turn_index]
    rng = SplitMix64(derive_seed(config.master_seed, call.call_id, turn_index))

    case = _draw_case(rng, config.case_weights)
    bank = config.template_banks[case]
    template_idx = rng.randbelow(len(bank))
    template = bank[template_idx]

    context: list[str] = []
    t_drawn: int | None = None
    if case in CONTEXT_CASES:
        context = select_context(call, turn_index, rng, config.context_max)
        t_drawn = len(context)

    queried: list[str] | None = None
    s_drawn: int | None = None
    shortfall = False
    if case in QUERY_CASES:
        pool = (
            vocabulary.labels_for_domain(call.domain)
            if config.distractor_pool == "domain"
            else None
        )
        selection = select_queried_slots(
            turn.gold_labels(),
            vocabulary,
            rng,
            config.distractors_min,
            config.distractors_max,
            pool=pool,
        )
        queried = selection.labels
        s_drawn = selection.n_distractors
        shortfall = selection.shortfall

    instruction = render_prompt(
        template,
        queried_slots=queried,
        context=context if case in CONTEXT_CASES else None,
    )
    target = render_slot_dict(build_target_map(turn, queried))

    meta: dict = {
        "call_id": call.call_id,
        "turn": turn_index,
        "T": t_drawn,
        "S": s_drawn,
        "template": template_idx,
        "case": case,
    }
    if shortfall:
        meta["shortfall"] = True

    return InstructionExample(
        example_id=f"{call.call_id}:t{turn_index}:regular",
        audio_ref=turn.audio_ref,
        context=context,
        instruction=instruction,
        queried_slots=queried,
        mode="regular",
        control_tag=None,
        target=target,
        meta=meta,
    )


def forge_regular_dataset(
    calls: Sequence[Call],
    config: ForgeConfig,
    vocabulary: SlotVocabulary | None = None,
    max_workers: int | None = None,
) -> list[InstructionExample]:
    """One regular example per turn, sorted by (call_id, turn index).

    ``max_workers`` > 1 forges turns on a thread pool; per-example seeding
    makes the result identical to the serial run.
    """
    vocab = vocabulary if vocabulary is not None else build_vocabulary(calls)
    jobs = [(call, ti) for call in calls for ti in range(len(call.turns))]
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            examples = list(
                pool.map(lambda job: forge_regular_example(job[0], job[1], config, vocab), jobs)
            )
    else:
        examples = [forge_regular_example(call, ti, config, vocab) for call, ti in jobs]
    examples.sort(key=lambda ex: (ex.meta["call_id"], ex.meta["turn"]))
    return examples


def dumps_example(example: InstructionExample) -> str:
    return json.dumps(example.to_record(), ensure_ascii=False)


def write_dataset(path: str | Path, examples: Iterable[InstructionExample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(dumps_example(ex) + "\n")


def read_dataset(path: str | Path) -> list[InstructionExample]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(InstructionExample.from_record(json.loads(line)))
    return out
