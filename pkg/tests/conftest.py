"""Shared fixtures: the worked payment-call example and published benchmark rows."""

import pytest

from slotforge.corpus import Call, Turn

# The worked example used throughout: an agent turn confirming a monthly
# €30 payment, queried together with three distractor labels.

FIG_TRANSCRIPT = (
    'Ok, thanks again for calling today, "Patrick". And you are paying a month- '
    "you have a monthly payment set up for €30 a month. Is that correct?"
)

FIG_QUERIED = [
    "new_limit",
    "family_members_count",
    "review_period",
    "payment_frequency",
    "payment_amount",
]

FIG_REGULAR_TARGET = (
    "{'payment_frequency': 'monthly', 'payment_amount': '€30', 'new_limit': 'None', "
    "'family_members_count': 'None', 'review_period': 'None'}"
)

FIG_THINKING = (
    "I hear the utterance in the audio clip is\n"
    f"``` {FIG_TRANSCRIPT} ```\n"
    "I see that the information bearing mentions in the utterance are monthly | €30.\n"
    "The labels queried for are payment_frequency, payment_amount, new_limit, "
    "family_members_count, review_period\n"
    "Based on the semantics of payment_frequency, payment_amount slots, the mentions "
    "in the utterance can be assigned to them. The others are all 'None'"
)

FIG_REASONING_TARGET = (
    f"<thinking>\n{FIG_THINKING}\n</thinking>\n<response>\n{FIG_REGULAR_TARGET}\n</response>"
)


@pytest.fixture
def fig_turn() -> Turn:
    return Turn(
        index=0,
        speaker="agent",
        audio_ref="clips/fig_t0.wav",
        transcript=FIG_TRANSCRIPT,
        slots={"payment_frequency": "monthly", "payment_amount": "€30"},
    )


@pytest.fixture
def fig_call(fig_turn) -> Call:
    return Call(call_id="fig", domain="banking", turns=(fig_turn,))


# Published slot-filling benchmark rows (foundation label, regular P/R/F1,
# reasoning P/R/F1, printed relative F1 gain in percent). Used as arithmetic
# fixtures: the printed F1 must be the harmonic mean of the printed P and R,
# and the printed gain must follow from the two F1 values.

REPORTED_SINGLE_MODE = [
    ("Llama 3.1 8B Instruct", (0.6292, 0.8726, 0.7312), (0.6431, 0.9319, 0.7610), 4.08),
    ("Llama 3.1 8B Base", (0.5596, 0.9073, 0.6923), (0.6691, 0.9168, 0.7736), 11.74),
    ("Llama 3.2 1B Instruct", (0.5571, 0.8541, 0.6743), (0.5580, 0.9156, 0.6934), 2.83),
    ("Deepseek R1 Distill Llama 3.1 8B", (0.4296, 0.8257, 0.5652), (0.5616, 0.9065, 0.6936), 22.72),
    ("Phi4-mini reasoning 3.68B", (0.5359, 0.8685, 0.6628), (0.4957, 0.8431, 0.6243), -5.81),
    ("Qwen3 4B (hybrid)", (0.6308, 0.9400, 0.7550), (0.4979, 0.8717, 0.6338), -16.05),
    ("Qwen3 0.6B (hybrid)", (0.5176, 0.8633, 0.6472), (0.4889, 0.7935, 0.6050), -6.52),
]

# (foundation label, mode, single-mode baseline P/R/F1, hybrid P/R/F1, gain).
REPORTED_HYBRID = [
    ("Qwen3 0.6B", "regular", (0.5176, 0.8633, 0.6472), (0.5600, 0.8721, 0.6821), 5.39),
    ("Qwen3 0.6B", "reasoning", (0.4889, 0.7935, 0.6050), (0.5797, 0.8700, 0.6958), 15.01),
    ("Qwen3 4B", "regular", (0.6308, 0.9400, 0.7550), (0.6821, 0.9340, 0.7884), 4.42),
    ("Qwen3 4B", "reasoning", (0.4979, 0.8717, 0.6338), (0.6958, 0.9377, 0.7988), 26.03),
]
