"""Partial-match precision/recall/F1 over predicted vs gold slot maps.

Values match when their normalized token sequences are equal or one occurs
contiguously inside the other (containment mode), which credits answers that
differ from gold only by surface variation ("€30" vs "30 euros"). A wrong
value for a gold slot costs both a false positive and a false negative;
"None" predictions and absent predictions mean the same thing: no prediction.
Aggregation is micro (counts summed before the ratios), so dataset scores are
additive and safe to compute map-reduce style.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ._kernels import token_containment
from .genparse import parse_generation
from .prompt_forge import InstructionExample
from .reasoning_forge import DEFAULT_GRAMMAR, TagGrammar

TP = "tp"
FP = "fp"
FN = "fn"
FP_AND_FN = "fp_and_fn"
TRUE_NEGATIVE = "true_negative"

NO_PREDICTION = "None"


class MetricsError(Exception):
    pass


@dataclass(frozen=True)
class MatchConfig:
    matching: str = "containment"  # or "exact"
    lowercase: bool = True
    unicode_fold: bool = True
    collapse_whitespace: bool = True
    strip_edge_symbols: bool = True

    def __post_init__(self):
        if self.matching not in ("containment", "exact"):
            raise MetricsError(f"unknown matching mode {self.matching!r}")

    def to_dict(self) -> dict:
        return {
            "matching": self.matching,
            "lowercase": self.lowercase,
            "unicode_fold": self.unicode_fold,
            "collapse_whitespace": self.collapse_whitespace,
            "strip_edge_symbols": self.strip_edge_symbols,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "MatchConfig":
        return cls(**{k: d[k] for k in cls().to_dict() if k in d})


DEFAULT_MATCH = MatchConfig()


def _strip_edges(token: str) -> str:
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def normalize_value(s: str, config: MatchConfig = DEFAULT_MATCH) -> str:
    """Canonical surface form: folded, lowercased, tokens stripped of edge symbols."""
    t = unicodedata.normalize("NFKC", s) if config.unicode_fold else s
    if config.lowercase:
        t = t.lower()
    if config.collapse_whitespace:
        tokens = t.split()
    else:
        t = t.strip()
        tokens = [t] if t else []
    if config.strip_edge_symbols:
        tokens = [_strip_edges(tok) for tok in tokens]
    return " ".join(tok for tok in tokens if tok)


def _tokens(s: str, config: MatchConfig) -> list[str]:
    return [tok for tok in normalize_value(s, config).split(" ") if tok]


def values_match(pred: str, gold: str, config: MatchConfig = DEFAULT_MATCH) -> bool:
    """Normalized token equality, or containment either way in containment mode."""
    a = _tokens(pred, config)
    b = _tokens(gold, config)
    if not a or not b:
        return a == b
    if a == b:
        return True
    if config.matching == "exact":
        return False
    return token_containment(a, b)


@dataclass
class ExampleScore:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    per_slot: dict[str, str] = field(default_factory=dict)
    malformed: bool = False


def score_example(
    pred: Mapping[str, str],
    gold: Mapping[str, str],
    queried: Sequence[str] | None = None,
    config: MatchConfig = DEFAULT_MATCH,
) -> ExampleScore:
    """Per-slot outcomes over pred ∪ gold, restricted to ``queried`` when given.

    Matched pair → tp; mismatched pair → fp_and_fn (counts one fp and one
    fn); prediction only → fp; gold only → fn; queried but absent on both
    sides → true_negative.
    """
    pred_eff = {k: v for k, v in pred.items() if v != NO_PREDICTION}
    gold_eff = {k: v for k, v in gold.items() if v != NO_PREDICTION}
    if queried is not None:
        labels = list(queried)
    else:
        labels = list(dict.fromkeys(list(pred.keys()) + list(gold.keys())))

    score = ExampleScore()
    for label in labels:
        p = pred_eff.get(label)
        g = gold_eff.get(label)
        if p is not None and g is not None:
            outcome = TP if values_match(p, g, config) else FP_AND_FN
        elif p is not None:
            outcome = FP
        elif g is not None:
            outcome = FN
        else:
            outcome = TRUE_NEGATIVE
        score.per_slot[label] = outcome
        if outcome == TP:
            score.tp += 1
        elif outcome == FP:
            score.fp += 1
        elif outcome == FN:
            score.fn += 1
        elif outcome == FP_AND_FN:
            score.fp += 1
            score.fn += 1
    return score


def harmonic_f1(p: float, r: float) -> float:
    """2pr/(p+r); 0 when both rates are 0."""
    if p + r == 0:
        return 0.0
    return 2.0 * p * r / (p + r)


@dataclass
class ScoreReport:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    per_slot: dict[str, dict[str, int]]
    n_examples: int
    n_malformed: int
    match: MatchConfig = DEFAULT_MATCH

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "counts": {"tp": self.tp, "fp": self.fp, "fn": self.fn},
            "per_slot": self.per_slot,
            "n_examples": self.n_examples,
            "n_malformed": self.n_malformed,
            "match_config": self.match.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ScoreReport":
        counts = d.get("counts", {})
        return cls(
            precision=d["precision"],
            recall=d["recall"],
            f1=d["f1"],
            tp=counts.get("tp", 0),
            fp=counts.get("fp", 0),
            fn=counts.get("fn", 0),
            per_slot={k: dict(v) for k, v in d.get("per_slot", {}).items()},
            n_examples=d.get("n_examples", 0),
            n_malformed=d.get("n_malformed", 0),
            match=MatchConfig.from_dict(d.get("match_config", {})),
        )


def _rate(numer: int, denom: int, all_zero: bool) -> float:
    if denom == 0:
        return 1.0 if all_zero else 0.0
    return numer / denom


def aggregate(scores: Iterable[ExampleScore], config: MatchConfig = DEFAULT_MATCH) -> ScoreReport:
    """Micro aggregation; an empty task (TP=FP=FN=0) scores a perfect 1.0."""
    tp = fp = fn = 0
    n_examples = 0
    n_malformed = 0
    per_slot: dict[str, dict[str, int]] = {}
    for score in scores:
        n_examples += 1
        n_malformed += int(score.malformed)
        tp += score.tp
        fp += score.fp
        fn += score.fn
        for label, outcome in score.per_slot.items():
            bucket = per_slot.setdefault(
                label, {TP: 0, FP: 0, FN: 0, TRUE_NEGATIVE: 0}
            )
            if outcome == FP_AND_FN:
                bucket[FP] += 1
                bucket[FN] += 1
            else:
                bucket[outcome] += 1
    all_zero = tp == fp == fn == 0
    precision = _rate(tp, tp + fp, all_zero)
    recall = _rate(tp, tp + fn, all_zero)
    return ScoreReport(
        precision=precision,
        recall=recall,
        f1=harmonic_f1(precision, recall),
        tp=tp,
        fp=fp,
        fn=fn,
        per_slot=dict(sorted(per_slot.items())),
        n_examples=n_examples,
        n_malformed=n_malformed,
        match=config,
    )


def gold_slots(example: InstructionExample, grammar: TagGrammar = DEFAULT_GRAMMAR) -> dict[str, str]:
    """The gold (non-'None') slot map encoded in a forged example's target."""
    parsed = parse_generation(example.target, grammar)
    return {k: v for k, v in parsed.slot_values.items() if v != NO_PREDICTION}


def score_generation(
    example: InstructionExample,
    generation: str,
    config: MatchConfig = DEFAULT_MATCH,
    grammar: TagGrammar = DEFAULT_GRAMMAR,
) -> ExampleScore:
    """Parse one generation and score it against its example's gold slots.

    Malformed generations are scored with an empty prediction map: every gold
    slot becomes a false negative and nothing earns a false positive.
    """
    parsed = parse_generation(generation, grammar)
    pred = {} if parsed.mode == "malformed" else parsed.slot_values
    score = score_example(pred, gold_slots(example, grammar), example.queried_slots, config)
    score.malformed = parsed.mode == "malformed"
    return score


def score_dataset(
    examples: Sequence[InstructionExample],
    generations: Mapping[str, str],
    config: MatchConfig = DEFAULT_MATCH,
    grammar: TagGrammar = DEFAULT_GRAMMAR,
) -> ScoreReport:
    """Score a dataset against generations keyed by example id.

    Examples without a generation are scored as empty predictions (all
    false negatives) so dropping hard examples cannot inflate the report.
    """
    scores = []
    for ex in examples:
        gen = generations.get(ex.example_id)
        if gen is None:
            score = score_example({}, gold_slots(ex, grammar), ex.queried_slots, config)
        else:
            score = score_generation(ex, gen, config, grammar)
        scores.append(score)
    return aggregate(scores, config)
