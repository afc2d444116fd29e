"""Corpus loading, validation, vocabulary, and splitting."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slotforge.corpus import (
    Call,
    DuplicateCallId,
    InvalidRatios,
    MalformedLine,
    NonContiguousTurns,
    Turn,
    build_vocabulary,
    call_from_record,
    dumps_call,
    load_corpus,
    save_corpus,
    split_corpus,
)
from slotforge.synth import synth_corpus


def make_call(call_id="c1", domain="banking", n_turns=2, slots=None):
    turns = tuple(
        Turn(
            index=i,
            speaker="agent" if i % 2 == 0 else "customer",
            audio_ref=f"clips/{call_id}_t{i}.wav",
            transcript=f"transcript {i}",
            slots=dict(slots or {}) if i == 0 else {},
        )
        for i in range(n_turns)
    )
    return Call(call_id=call_id, domain=domain, turns=turns)


def write_lines(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def test_load_single_call_round_trip(tmp_path):
    call = make_call(slots={"payment_amount": "€30"})
    path = tmp_path / "corpus.jsonl"
    save_corpus(path, [call])
    loaded = load_corpus(path)
    assert len(loaded) == 1
    assert len(loaded[0].turns) == 2
    assert loaded[0] == call


def test_round_trip_is_byte_identical(tmp_path):
    calls = synth_corpus(8, 5, seed=3)
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    save_corpus(a, calls)
    save_corpus(b, load_corpus(a))
    assert a.read_bytes() == b.read_bytes()


def test_meta_fields_survive_round_trip(tmp_path):
    rec = json.loads(dumps_call(make_call()))
    rec["collection"] = "march"
    rec["turns"][0]["take"] = 2
    path = tmp_path / "c.jsonl"
    write_lines(path, [json.dumps(rec)])
    (call,) = load_corpus(path)
    assert call.meta == {"collection": "march"}
    assert call.turns[0].meta == {"take": 2}
    reloaded = json.loads(dumps_call(call))
    assert reloaded["meta"] == {"collection": "march"}
    assert reloaded["turns"][0]["meta"] == {"take": 2}


def test_missing_call_id_is_malformed(tmp_path):
    path = tmp_path / "c.jsonl"
    write_lines(path, ['{"domain": "banking", "turns": []}'])
    with pytest.raises(MalformedLine) as err:
        load_corpus(path)
    assert err.value.lineno == 1


def test_duplicate_call_id(tmp_path):
    path = tmp_path / "c.jsonl"
    line = dumps_call(make_call("c1"))
    write_lines(path, [line, line])
    with pytest.raises(DuplicateCallId):
        load_corpus(path)


def test_non_contiguous_turns(tmp_path):
    rec = json.loads(dumps_call(make_call()))
    rec["turns"][1]["index"] = 5
    path = tmp_path / "c.jsonl"
    write_lines(path, [json.dumps(rec)])
    with pytest.raises(NonContiguousTurns):
        load_corpus(path)


@pytest.mark.parametrize(
    "label,value",
    [("Payment", "x"), ("payment amount", "x"), ("1amount", "x"), ("amount", ""), ("amount", "None")],
)
def test_bad_slots_rejected(tmp_path, label, value):
    rec = json.loads(dumps_call(make_call()))
    rec["turns"][0]["slots"] = {label: value}
    path = tmp_path / "c.jsonl"
    write_lines(path, [json.dumps(rec)])
    with pytest.raises(MalformedLine):
        load_corpus(path)


def test_invalid_json_and_collect_mode(tmp_path):
    path = tmp_path / "c.jsonl"
    write_lines(path, ["{not json", dumps_call(make_call("ok"))])
    calls, issues = load_corpus(path, errors="collect")
    assert [c.call_id for c in calls] == ["ok"]
    assert len(issues) == 1 and isinstance(issues[0], MalformedLine)


def test_build_vocabulary_counts_turns():
    c1 = make_call("c1", slots={"a": "1", "b": "2"})
    c2 = make_call("c2", slots={"b": "3", "c": "4"})
    vocab = build_vocabulary([c1, c2])
    assert dict(vocab.counts) == {"a": 1, "b": 2, "c": 1}
    assert vocab.labels() == ["a", "b", "c"]


def test_vocabulary_empty_corpus():
    assert len(build_vocabulary([])) == 0


def test_vocabulary_single_turn():
    vocab = build_vocabulary([make_call(slots={"payment_amount": "€30"})])
    assert dict(vocab.counts) == {"payment_amount": 1}


def test_vocabulary_tracks_domains():
    c1 = make_call("c1", domain="banking", slots={"a": "1"})
    c2 = make_call("c2", domain="retail", slots={"b": "2"})
    vocab = build_vocabulary([c1, c2])
    assert vocab.labels_for_domain("banking") == ["a"]
    assert vocab.labels_for_domain("retail") == ["b"]


def test_split_sizes_and_partition():
    calls = [make_call(f"c{i}") for i in range(10)]
    train, dev, test = split_corpus(calls, (0.8, 0.1, 0.1), seed=7)
    assert (len(train), len(dev), len(test)) == (8, 1, 1)
    ids = [c.call_id for c in train + dev + test]
    assert sorted(ids) == sorted(c.call_id for c in calls)
    assert len(set(ids)) == len(ids)


def test_split_deterministic_and_order_independent():
    calls = synth_corpus(20, 4, seed=1)
    a = split_corpus(calls, (0.8, 0.1, 0.1), seed=9)
    b = split_corpus(list(reversed(calls)), (0.8, 0.1, 0.1), seed=9)
    assert a == b


def test_split_is_domain_stratified():
    calls = [make_call(f"b{i}", domain="banking") for i in range(10)]
    calls += [make_call(f"r{i}", domain="retail") for i in range(10)]
    train, dev, test = split_corpus(calls, (0.8, 0.1, 0.1), seed=3)
    for part, expect in ((train, 8), (dev, 1), (test, 1)):
        by_domain = {d: sum(1 for c in part if c.domain == d) for d in ("banking", "retail")}
        assert by_domain == {"banking": expect, "retail": expect}


@pytest.mark.parametrize("ratios", [(0.5, 0.6, 0.1), (0.5, 0.5, 0.0), (-0.2, 0.6, 0.6), (0.9, 0.1)])
def test_invalid_ratios(ratios):
    with pytest.raises(InvalidRatios):
        split_corpus([make_call()], ratios, seed=0)


@given(seed=st.integers(min_value=0, max_value=2**63), n=st.integers(1, 40))
@settings(max_examples=25, deadline=None)
def test_split_partition_property(seed, n):
    calls = synth_corpus(n, 3, seed=5)
    parts = split_corpus(calls, (0.6, 0.2, 0.2), seed=seed)
    ids = [c.call_id for part in parts for c in part]
    assert sorted(ids) == sorted(c.call_id for c in calls)


def test_call_from_record_rejects_non_object():
    with pytest.raises(MalformedLine):
        call_from_record(["not", "a", "dict"], lineno=4)
