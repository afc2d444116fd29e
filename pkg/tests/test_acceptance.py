"""Acceptance gate: every release criterion, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` (add ``-s`` to see the
PASS lines as they print).
"""

import math
import time

import numpy as np

from slotforge._kernels import SplitMix64
from slotforge.adapter_sim import AdapterConfig, adapter_forward, grad_check, init_params, mlp_forward
from slotforge.corpus import build_vocabulary
from slotforge.genparse import parse_generation
from slotforge.prompt_forge import (
    CONTEXT_CASES,
    ForgeConfig,
    dumps_example,
    forge_regular_dataset,
)
from slotforge.report import relative_gain
from slotforge.reasoning_forge import forge_hybrid_dataset, forge_reasoning_dataset
from slotforge.slotmetrics import harmonic_f1, score_dataset, score_example
from slotforge.synth import synth_corpus

from conftest import FIG_QUERIED, FIG_REGULAR_TARGET, REPORTED_HYBRID, REPORTED_SINGLE_MODE
from test_adapter import forward_oracle, small_instance
from test_metrics import oracle_outcomes


def ok(name: str):
    print(f"ACCEPTANCE {name}: PASS")


def test_table_arithmetic_reproduction():
    """All eleven published relative-gain figures reproduce within ±0.01."""
    start = time.perf_counter()
    printed_deltas = []
    for _, reg, rsn, printed in REPORTED_SINGLE_MODE:
        printed_deltas.append((relative_gain(rsn[2], reg[2]), printed))
    for _, _, base, hyb, printed in REPORTED_HYBRID:
        printed_deltas.append((relative_gain(hyb[2], base[2]), printed))
    assert len(printed_deltas) == 11
    for computed, printed in printed_deltas:
        assert abs(computed - printed) <= 0.01, (computed, printed)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"took {elapsed:.3f}s"
    ok("table-arithmetic")


def test_f1_consistency_with_published_rows():
    """harmonic_f1(P, R) hits every printed F1 within ±0.0005."""
    rows = []
    for _, reg, rsn, _ in REPORTED_SINGLE_MODE:
        rows += [reg, rsn]
    for _, _, base, hyb, _ in REPORTED_HYBRID:
        rows += [base, hyb]
    assert len(rows) == 22
    for p, r, f1 in rows:
        assert abs(harmonic_f1(p, r) - f1) <= 5e-4, (p, r, f1)
    ok("f1-consistency")


def test_forge_parse_score_round_trip():
    """500-turn corpus: self-scoring is exactly perfect, no diagnostics, <5s."""
    corpus = synth_corpus(50, 10, seed=70)  # 500 turns
    config = ForgeConfig(master_seed=23)
    start = time.perf_counter()
    regular = forge_regular_dataset(corpus, config)
    reasoning = forge_reasoning_dataset(corpus, config, regular_examples=regular)
    hybrid = forge_hybrid_dataset(regular, reasoning, config)
    everything = regular + reasoning + hybrid
    for ex in everything:
        assert parse_generation(ex.target).diagnostics == []
    report = score_dataset(regular + reasoning, {ex.example_id: ex.target for ex in regular + reasoning})
    elapsed = time.perf_counter() - start
    assert (report.precision, report.recall, report.f1) == (1.0, 1.0, 1.0)
    assert report.n_malformed == 0
    assert elapsed < 5.0, f"took {elapsed:.3f}s"
    ok("round-trip")


def test_forge_determinism_across_schedules():
    """Serial and thread-parallel forging write byte-identical datasets."""
    corpus = synth_corpus(50, 10, seed=71)
    config = ForgeConfig(master_seed=24)

    def forge_bytes(workers):
        regular = forge_regular_dataset(corpus, config, max_workers=workers)
        reasoning = forge_reasoning_dataset(corpus, config, regular_examples=regular)
        hybrid = forge_hybrid_dataset(regular, reasoning, config)
        return "".join(dumps_example(ex) + "\n" for ex in regular + reasoning + hybrid).encode()

    first = forge_bytes(workers=None)
    second = forge_bytes(workers=None)
    parallel = forge_bytes(workers=8)
    assert first == second == parallel
    ok("determinism")


def test_randomization_conformance():
    """Context sizes uniform on {0..3}, distractor counts uniform on {1..5}."""
    corpus = synth_corpus(1000, 10, seed=72)  # 10,000 turns
    vocab = build_vocabulary(corpus)
    turns = {(c.call_id, t.index): t for c in corpus for t in c.turns}
    examples = forge_regular_dataset(corpus, ForgeConfig(master_seed=25), vocabulary=vocab)
    assert len(examples) >= 10_000

    t_counts = {t: 0 for t in range(4)}
    s_counts = {s: 0 for s in range(1, 6)}
    n_t = n_s = 0
    for ex in examples:
        if ex.meta["case"] in CONTEXT_CASES and ex.meta["turn"] >= 3:
            t_counts[ex.meta["T"]] += 1
            n_t += 1
        if ex.queried_slots is not None:
            gold = set(turns[(ex.meta["call_id"], ex.meta["turn"])].slots)
            queried = set(ex.queried_slots)
            assert gold <= queried
            distractors = queried - gold
            assert 1 <= len(distractors) <= 5
            s_counts[len(distractors)] += 1
            n_s += 1

    assert n_t > 2000 and n_s > 4000
    for t, count in t_counts.items():
        assert abs(count / n_t - 0.25) <= 0.02, (t, count / n_t)
    for s, count in s_counts.items():
        assert abs(count / n_s - 0.20) <= 0.02, (s, count / n_s)
    ok("randomization-conformance")


def test_reasoning_format_fidelity(fig_call):
    """The worked payment example reproduces mention line and response block."""
    from slotforge.prompt_forge import InstructionExample, build_target_map, render_slot_dict
    from slotforge.reasoning_forge import forge_reasoning_example

    turn = fig_call.turns[0]
    regular_target = render_slot_dict(build_target_map(turn, FIG_QUERIED))
    assert regular_target == FIG_REGULAR_TARGET
    regular = InstructionExample(
        example_id="fig:t0:regular",
        audio_ref=turn.audio_ref,
        context=[],
        instruction="Find slot values for "
        + ", ".join(FIG_QUERIED)
        + " in the current audio. Format the output as JSON.",
        queried_slots=list(FIG_QUERIED),
        mode="regular",
        control_tag=None,
        target=regular_target,
        meta={"call_id": fig_call.call_id, "turn": 0, "T": None, "S": 3, "template": 0,
              "case": "with_query"},
    )
    reasoning = forge_reasoning_example(regular, turn)
    assert "monthly | €30" in reasoning.target

    think_part, _, response_part = reasoning.target.partition("</thinking>")
    assert "<response>\n" + regular_target + "\n</response>" in response_part

    parsed = parse_generation(reasoning.target)
    assert parsed.mode == "reasoning"
    assert len(parsed.slot_values) == 5
    assert sum(1 for v in parsed.slot_values.values() if v == "None") == 3
    assert parsed.slot_values["payment_frequency"] == "monthly"
    assert parsed.slot_values["payment_amount"] == "€30"
    ok("reasoning-format-fidelity")


def test_metrics_oracle_equivalence():
    """1,000 randomized small gold/pred pairs: zero disagreements with the oracle."""
    rng = SplitMix64(2025)
    labels = ["a", "b", "c", "d", "e", "f"]
    values = ["€30", "30", "30 euros", "monthly", "yearly", "May 3", "3", "None"]
    checked = 0
    for _ in range(1000):
        pred = {l: values[rng.randbelow(len(values))] for l in rng.sample(labels, rng.randbelow(7))}
        gold = {l: values[rng.randbelow(7)] for l in rng.sample(labels, rng.randbelow(7))}
        queried = None
        if rng.randbelow(2):
            queried = sorted(set(gold) | set(rng.sample(labels, rng.randbelow(4))))
        score = score_example(pred, gold, queried)
        table, counts = oracle_outcomes(pred, gold, queried)
        assert (score.tp, score.fp, score.fn) == (counts["tp"], counts["fp"], counts["fn"])
        assert score.per_slot == table
        checked += 1
    assert checked == 1000
    ok("metrics-oracle-equivalence")


def test_adapter_properties():
    """Shape law, 8x effective reduction, gradient and dual-forward accuracy."""
    config = AdapterConfig(d_enc=6, stack_factor=4, d_hidden=5, d_llm=3)
    params = init_params(config, seed=26)
    rng = np.random.default_rng(26)
    for n in range(1, 65):
        out = adapter_forward(rng.standard_normal((n, 6)), config, params)
        assert out.shape == (math.ceil(n / 4), 3)
    assert adapter_forward(rng.standard_normal((100, 6)), config, params).shape[0] == 25

    x, small = small_instance(seed=27)
    assert grad_check(small, x, eps=1e-5, activation="gelu") < 1e-4

    ours = mlp_forward(x, small, "gelu")
    theirs = forward_oracle(x, small, "gelu")
    assert np.max(np.abs(ours - theirs)) < 1e-12
    ok("adapter-properties")


def test_absolute_scores_are_out_of_scope():
    """Published absolute P/R/F1 need multi-GPU fine-tuning on a proprietary
    2.1K-hour corpus; at desk scale the arithmetic, round-trip, conformance,
    and oracle suites above stand in for them. Nothing to compute here."""
    ok("absolute-scores-out-of-scope (documented)")
