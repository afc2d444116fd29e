"""The ``slotforge`` command: annotate, forge, parse, score, report, adapter-check.

Exit codes: 0 success, 1 invariant/check failure, 2 input or config error,
3 external-service failure. Primary output files are written to a temp file
and renamed, so an interrupted command never leaves a partial file behind.
"""

from __future__ import annotations

import json
import math
import os
import sys
from collections import Counter
from pathlib import Path

import click

from . import adapter_sim
from .annotator import (
    AnnotatorError,
    MockCompletionClient,
    RetryPolicy,
    TransportError,
    UnparseableAnnotation,
    apply_annotation,
    build_annotation_prompt,
    complete_with_retries,
    validate_annotation,
)
from .config import CliConfig, ConfigError, format_effective, load_cli_config
from .corpus import CorpusError, call_from_record, call_to_record, dumps_call, load_corpus
from .genparse import ParseError, parse_generation, read_predictions
from .prompt_forge import ForgeError, dumps_example, forge_regular_dataset, read_dataset
from .reasoning_forge import ReasoningForgeError, forge_hybrid_dataset, forge_reasoning_dataset
from .slotmetrics import ScoreReport, score_dataset
from .report import IncomparableConfigs, ReportError, RunRecord, compare_runs, render_table

EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_EXTERNAL = 3

_INPUT_ERRORS = (ConfigError, CorpusError, ForgeError, ReasoningForgeError, ParseError, ReportError, OSError)


def _atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="TOML config file ([forge]/[metrics]/[adapter] sections).")
@click.option("--seed", type=int, default=None, help="Override forge.master_seed.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Output file (each command has a default).")
@click.option("--format", "fmt", type=click.Choice(("markdown", "csv", "json")),
              default="markdown", show_default=True, help="Table format for report.")
@click.option("--verbose", is_flag=True, help="Print the effective config with provenance.")
@click.pass_context
def main(ctx, config_path, seed, out_path, fmt, verbose):
    """Forge slot-filling SFT datasets and score model generations."""
    ctx.obj = {
        "config_path": config_path,
        "seed": seed,
        "out": out_path,
        "fmt": fmt,
        "verbose": verbose,
    }


def _load_config(ctx) -> CliConfig:
    obj = ctx.obj
    config = load_cli_config(
        obj["config_path"], flag_overrides={"forge.master_seed": obj["seed"]}
    )
    if obj["verbose"]:
        click.echo(format_effective(config))
    return config


def _out_path(ctx, default: str) -> Path:
    return Path(ctx.obj["out"]) if ctx.obj["out"] else Path(default)


@main.group()
def forge():
    """Forge instruction datasets from a corpus."""


def _run_forge(ctx, mode: str, corpus_path: str, workers: int):
    try:
        config = _load_config(ctx)
        calls = load_corpus(corpus_path)
        regular = forge_regular_dataset(calls, config.forge, max_workers=workers)
        if mode == "regular":
            examples = regular
        else:
            reasoning = forge_reasoning_dataset(calls, config.forge, regular_examples=regular)
            if mode == "reasoning":
                examples = reasoning
            else:
                examples = forge_hybrid_dataset(regular, reasoning, config.forge)
    except _INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))

    out = _out_path(ctx, f"{Path(corpus_path).stem}.{mode}.jsonl")
    _atomic_write(out, "".join(dumps_example(ex) + "\n" for ex in examples))
    counts = Counter((ex.mode, ex.meta.get("case", "?")) for ex in examples)
    click.echo(f"wrote {len(examples)} examples to {out}")
    for (ex_mode, case), n in sorted(counts.items()):
        click.echo(f"  mode={ex_mode} case={case}: {n}")


@forge.command("regular")
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--workers", type=int, default=1, show_default=True,
              help="Forge turns on a thread pool (output is identical).")
@click.pass_context
def forge_regular(ctx, corpus_path, workers):
    """One direct-answer example per turn."""
    _run_forge(ctx, "regular", corpus_path, workers)


@forge.command("reasoning")
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--workers", type=int, default=1, show_default=True)
@click.pass_context
def forge_reasoning(ctx, corpus_path, workers):
    """One chain-of-thought example per turn."""
    _run_forge(ctx, "reasoning", corpus_path, workers)


@forge.command("hybrid")
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--workers", type=int, default=1, show_default=True)
@click.pass_context
def forge_hybrid(ctx, corpus_path, workers):
    """Both modes merged, mode-switched by \\think / \\no_think tags."""
    _run_forge(ctx, "hybrid", corpus_path, workers)


@main.command("parse")
@click.argument("predictions_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def parse_cmd(ctx, predictions_path):
    """Parse raw generations into slot maps with diagnostics."""
    try:
        _load_config(ctx)
        predictions = read_predictions(predictions_path)
    except _INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))
    lines = []
    modes = Counter()
    for pred_id, text in predictions.items():
        parsed = parse_generation(text)
        modes[parsed.mode] += 1
        lines.append(json.dumps({"id": pred_id, **parsed.to_record()}, ensure_ascii=False))
    out = _out_path(ctx, "parsed.jsonl")
    _atomic_write(out, "".join(line + "\n" for line in lines))
    click.echo(f"parsed {len(lines)} generations to {out}")
    for mode, n in sorted(modes.items()):
        click.echo(f"  mode={mode}: {n}")


@main.command("score")
@click.argument("gold_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("predictions_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def score_cmd(ctx, gold_path, predictions_path):
    """Score generations against a forged dataset's gold slots."""
    try:
        config = _load_config(ctx)
        examples = read_dataset(gold_path)
        predictions = read_predictions(predictions_path)
    except _INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))

    gold_ids = {ex.example_id for ex in examples}
    unknown = sorted(set(predictions) - gold_ids)
    if unknown:
        _fail(EXIT_INPUT, f"{len(unknown)} prediction id(s) not in gold dataset: {', '.join(unknown[:10])}")
    missing = len(gold_ids) - len(set(predictions) & gold_ids)
    if missing:
        click.echo(f"warning: {missing} gold example(s) have no prediction (scored all-miss)", err=True)

    score = score_dataset(examples, predictions, config.metrics)
    out = _out_path(ctx, "score_report.json")
    _atomic_write(out, json.dumps(score.to_dict(), ensure_ascii=False, indent=2) + "\n")
    click.echo(
        f"P={score.precision:.4f} R={score.recall:.4f} F1={score.f1:.4f} "
        f"(tp={score.tp} fp={score.fp} fn={score.fn}, "
        f"n={score.n_examples}, malformed={score.n_malformed})"
    )
    click.echo(f"wrote {out}")


@main.command("report")
@click.argument("base_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("new_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--base-label", default=None, help="Foundation label of the baseline run.")
@click.option("--new-label", default=None, help="Foundation label of the new run.")
@click.option("--base-mode", default="regular", show_default=True)
@click.option("--new-mode", default="reasoning", show_default=True)
@click.pass_context
def report_cmd(ctx, base_path, new_path, base_label, new_label, base_mode, new_mode):
    """Compare two score reports: P/R/F1 side by side plus relative F1 gain."""
    try:
        _load_config(ctx)
        base = ScoreReport.from_dict(json.loads(Path(base_path).read_text(encoding="utf-8")))
        new = ScoreReport.from_dict(json.loads(Path(new_path).read_text(encoding="utf-8")))
        row = compare_runs(
            RunRecord("base", base_label or Path(base_path).stem, base_mode, base),
            RunRecord("new", new_label or Path(new_path).stem, new_mode, new),
        )
        table = render_table([row], ctx.obj["fmt"])
    except (IncomparableConfigs,) as exc:
        _fail(EXIT_INPUT, str(exc))
    except _INPUT_ERRORS + (json.JSONDecodeError, KeyError) as exc:
        _fail(EXIT_INPUT, f"cannot load score reports: {exc}")
    if ctx.obj["out"]:
        _atomic_write(ctx.obj["out"], table + "\n")
        click.echo(f"wrote {ctx.obj['out']}")
    else:
        click.echo(table)


@main.command("adapter-check")
@click.option("--grad-seed", type=int, default=0, show_default=True,
              help="Seed for the small grad-check instances.")
@click.pass_context
def adapter_check(ctx, grad_seed):
    """Shape-law sweep (N=1..64) plus gradient checks on seeded instances."""
    try:
        config = _load_config(ctx)
        adapter = config.adapter
        params = adapter_sim.init_params(adapter, seed=grad_seed)
    except _INPUT_ERRORS + (adapter_sim.AdapterError,) as exc:
        _fail(EXIT_INPUT, str(exc))

    import numpy as np

    rng = np.random.default_rng(grad_seed)
    failures = 0
    k = adapter.stack_factor

    click.echo(f"shape law: rows(adapter_forward(N)) for N=1..64, k={k}, policy={adapter.pad_policy}")
    for n in range(1, 65):
        x = rng.standard_normal((n, adapter.d_enc))
        if adapter.pad_policy == "truncate" and n < k:
            try:
                adapter_sim.adapter_forward(x, adapter, params)
            except adapter_sim.DegenerateOutput:
                continue  # expected failure for a ragged head shorter than k
            click.echo(f"  N={n}: FAIL (expected DegenerateOutput)")
            failures += 1
            continue
        out = adapter_sim.adapter_forward(x, adapter, params)
        expected = math.ceil(n / k) if adapter.pad_policy == "zero_pad" else n // k
        ok = out.shape == (expected, adapter.d_llm)
        if not ok:
            click.echo(f"  N={n}: FAIL got {out.shape}, expected ({expected}, {adapter.d_llm})")
            failures += 1
    click.echo(f"  sweep {'PASS' if failures == 0 else 'FAIL'}")

    grad_cfg = adapter_sim.AdapterConfig(
        d_enc=2, stack_factor=4, d_hidden=5, d_llm=4, activation=adapter.activation
    )
    small = adapter_sim.init_params(grad_cfg, seed=grad_seed)
    x_small = rng.standard_normal((3, 8))
    err = adapter_sim.grad_check(small, x_small, eps=1e-5, activation=adapter.activation)
    ok = err < 1e-4
    click.echo(f"grad check ({adapter.activation}, dims 8/5/4, M=3): max rel err {err:.3e} "
               f"{'PASS' if ok else 'FAIL'}")
    failures += 0 if ok else 1

    err_lin = adapter_sim.grad_check(small, x_small, eps=1e-5, activation="linear")
    ok = err_lin < 1e-8
    click.echo(f"grad check (linear, quadratic loss): max rel err {err_lin:.3e} "
               f"{'PASS' if ok else 'FAIL'}")
    failures += 0 if ok else 1

    if failures:
        _fail(EXIT_CHECK_FAILED, f"{failures} adapter check(s) failed")
    click.echo("all adapter checks passed")


@main.command("annotate")
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--script", "script_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Mock completion script (JSONL: call_id -> completion).")
@click.option("--retries", type=int, default=3, show_default=True)
@click.option("--resume/--no-resume", default=True, show_default=True,
              help="Reuse per-call results checkpointed by a previous run.")
@click.pass_context
def annotate_cmd(ctx, corpus_path, script_path, retries, resume):
    """Annotate a corpus with gold slots via the scripted mock client."""
    try:
        _load_config(ctx)
        calls = load_corpus(corpus_path)
        client = MockCompletionClient(script_path)
    except _INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))

    out = _out_path(ctx, f"{Path(corpus_path).stem}.annotated.jsonl")
    ckpt_path = Path(str(out) + ".ckpt.jsonl")
    policy = RetryPolicy(max_attempts=retries, base_delay=0.05)

    done: dict[str, dict] = {}
    if resume and ckpt_path.exists():
        with open(ckpt_path, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    if rec.get("status") == "ok":
                        done[rec["call_id"]] = rec

    annotated = []
    failures = []
    finding_counts: Counter[str] = Counter()
    with open(ckpt_path, "a", encoding="utf-8") as ckpt:
        for call in calls:
            if call.call_id in done:
                annotated.append(call_from_record(done[call.call_id]["call"]))
                continue
            try:
                raw = complete_with_retries(client, build_annotation_prompt(call), policy)
                result = apply_annotation(call, raw)
            except (TransportError, UnparseableAnnotation, AnnotatorError) as exc:
                failures.append((call.call_id, str(exc)))
                ckpt.write(json.dumps(
                    {"call_id": call.call_id, "status": "failed", "error": str(exc)},
                    ensure_ascii=False) + "\n")
                continue
            for finding in validate_annotation(raw, call):
                finding_counts[finding.kind] += 1
            annotated.append(result)
            ckpt.write(json.dumps(
                {"call_id": call.call_id, "status": "ok", "call": call_to_record(result)},
                ensure_ascii=False) + "\n")

    if finding_counts:
        click.echo("annotation findings: " + ", ".join(f"{k}={n}" for k, n in sorted(finding_counts.items())))
    if failures:
        for call_id, message in failures:
            click.echo(f"failed: {call_id}: {message}", err=True)
        click.echo(f"checkpoint kept at {ckpt_path}; rerun to resume", err=True)
        sys.exit(EXIT_EXTERNAL)

    _atomic_write(out, "".join(dumps_call(c) + "\n" for c in annotated))
    ckpt_path.unlink(missing_ok=True)
    click.echo(f"annotated {len(annotated)} calls to {out}")


if __name__ == "__main__":
    main()
