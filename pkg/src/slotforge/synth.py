"""Deterministic synthetic call corpora.

Stands in for proprietary call-center data in tests, benchmarks, and demos.
Transcripts embed every gold value verbatim, so mention ordering and
containment matching behave exactly as they would on real annotations.
"""

from __future__ import annotations

from ._kernels import SplitMix64, fnv1a64
from .corpus import DOMAINS, Call, Turn

VALUE_POOLS: dict[str, list[str]] = {
    "payment_amount": ["€30", "€45", "€120", "€15", "€99"],
    "payment_frequency": ["monthly", "weekly", "yearly", "quarterly"],
    "new_limit": ["€500", "€1000", "€2500"],
    "family_members_count": ["2", "3", "4", "5"],
    "review_period": ["6 months", "12 months", "3 months"],
    "due_date": ["May 3", "June 12", "April 7", "August 19"],
    "account_number": ["83921047", "55010233", "71830992"],
    "phone_number": ["555-0142", "555-0197", "555-0110"],
    "plan_name": ["silver plan", "gold plan", "family plan"],
    "city": ["Dublin", "Lisbon", "Porto", "Madrid"],
    "claim_number": ["CLM-2047", "CLM-5513", "CLM-9921"],
    "order_id": ["A-99213", "B-10448", "C-77020"],
}

SLOT_SENTENCES: dict[str, str] = {
    "payment_amount": "The payment we have on file is {v}.",
    "payment_frequency": "You are set up on a {v} schedule.",
    "new_limit": "I can raise the limit to {v} for you.",
    "family_members_count": "The policy covers {v} family members.",
    "review_period": "We will review the account again in {v}.",
    "due_date": "Your next bill is due on {v}.",
    "account_number": "I have your account number as {v}.",
    "phone_number": "The callback number we hold is {v}.",
    "plan_name": "You are currently on the {v}.",
    "city": "The service address is registered in {v}.",
    "claim_number": "Your claim was filed under {v}.",
    "order_id": "I can see the order {v} right here.",
}

FILLERS = [
    "Thanks for calling, how can I help you today?",
    "Let me check that for you.",
    "One moment please while I pull up the details.",
    "Is there anything else I can do for you?",
    "Alright, I understand.",
    "Could you confirm that for me?",
    "That sounds good to me.",
    "I appreciate your patience.",
]

_LABELS = sorted(VALUE_POOLS)


def _synth_turn(rng: SplitMix64, call_id: str, index: int) -> Turn:
    speaker = "agent" if index % 2 == 0 else "customer"
    n_slots = rng.choice([0, 1, 1, 1, 2, 2])
    labels = rng.sample(_LABELS, n_slots)
    sentences = [rng.choice(FILLERS)]
    slots: dict[str, str] = {}
    for label in labels:
        value = rng.choice(VALUE_POOLS[label])
        slots[label] = value
        sentences.append(SLOT_SENTENCES[label].format(v=value))
    return Turn(
        index=index,
        speaker=speaker,
        audio_ref=f"clips/{call_id}_t{index}.wav",
        transcript=" ".join(sentences),
        slots=slots,
    )


def synth_corpus(
    n_calls: int, turns_per_call: int = 10, seed: int = 0, domains=DOMAINS
) -> list[Call]:
    calls = []
    for i in range(n_calls):
        call_id = f"c{i:05d}"
        rng = SplitMix64(fnv1a64(f"synth|{seed}|{call_id}".encode("utf-8")))
        domain = rng.choice(list(domains))
        turns = tuple(_synth_turn(rng, call_id, t) for t in range(turns_per_call))
        calls.append(Call(call_id=call_id, domain=domain, turns=turns))
    return calls


def main(argv=None) -> int:
    import argparse

    from .corpus import save_corpus

    parser = argparse.ArgumentParser(description="Write a synthetic corpus JSONL file.")
    parser.add_argument("out", help="output path")
    parser.add_argument("--calls", type=int, default=50)
    parser.add_argument("--turns", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    save_corpus(args.out, synth_corpus(args.calls, args.turns, args.seed))
    print(f"wrote {args.calls} calls x {args.turns} turns to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
