"""Kernel correctness: independent oracles plus pure/compiled parity."""

from functools import reduce

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slotforge._kernels import _native

_speedups = pytest.importorskip("slotforge._kernels._speedups")

BACKENDS = [_native, _speedups]
MASK = 0xFFFFFFFFFFFFFFFF


# -- independent oracles (shared no code with the kernels) --

def fnv_oracle(data: bytes) -> int:
    return reduce(lambda h, b: ((h ^ b) * 0x100000001B3) & MASK, data, 0xCBF29CE484222325)


def splitmix_oracle(seed: int, n: int) -> list[int]:
    out, s = [], seed & MASK
    for _ in range(n):
        s = (s + 0x9E3779B97F4A7C15) & MASK
        z = s
        for shift, mult in ((30, 0xBF58476D1CE4E5B9), (27, 0x94D049BB133111EB)):
            z = ((z ^ (z >> shift)) * mult) & MASK
        out.append(z ^ (z >> 31))
    return out


def containment_oracle(a, b) -> bool:
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    return any(list(big[i : i + len(small)]) == list(small) for i in range(len(big) - len(small) + 1))


# -- FNV-1a --

def test_fnv_oracle_matches_published_vectors():
    assert fnv_oracle(b"") == 0xCBF29CE484222325
    assert fnv_oracle(b"a") == 0xAF63DC4C8601EC8C


@pytest.mark.parametrize("impl", BACKENDS)
def test_fnv_frozen_values(impl):
    assert impl.fnv1a64(b"") == 0xCBF29CE484222325
    assert impl.fnv1a64(b"|0|0") == 3217980470487258373
    assert impl.fnv1a64(b"c1|0|42") == 2377359045733784309
    assert impl.fnv1a64(b"c1|1|42") == 6626302935694594096


@pytest.mark.parametrize("impl", BACKENDS)
@given(data=st.binary(max_size=256))
def test_fnv_matches_oracle(impl, data):
    assert impl.fnv1a64(data) == fnv_oracle(data)


# -- splitmix64 stream --

@pytest.mark.parametrize("impl", BACKENDS)
def test_splitmix_frozen_values(impl):
    rng = impl.SplitMix64(0)
    assert [rng.next_u64() for _ in range(3)] == [
        16294208416658607535,
        7960286522194355700,
        487617019471545679,
    ]
    rng = impl.SplitMix64(42)
    assert rng.next_u64() == 13679457532755275413
    rng = impl.SplitMix64(2**64 - 1)
    assert [rng.next_u64() for _ in range(2)] == [
        16490336266968443936,
        16834447057089888969,
    ]


@pytest.mark.parametrize("impl", BACKENDS)
@given(seed=st.integers(min_value=0, max_value=2**64 - 1))
@settings(max_examples=50)
def test_splitmix_matches_oracle(impl, seed):
    rng = impl.SplitMix64(seed)
    assert [rng.next_u64() for _ in range(8)] == splitmix_oracle(seed, 8)


def test_negative_seed_wraps_consistently():
    a, b = _native.SplitMix64(-7), _speedups.SplitMix64(-7)
    assert a.next_u64() == b.next_u64() == splitmix_oracle(-7 & MASK, 1)[0]


@given(
    seed=st.integers(min_value=0, max_value=2**64 - 1),
    ns=st.lists(st.integers(min_value=1, max_value=10**6), min_size=1, max_size=30),
)
@settings(max_examples=50)
def test_bounded_draws_identical_across_backends(seed, ns):
    a, b = _native.SplitMix64(seed), _speedups.SplitMix64(seed)
    for n in ns:
        assert a.randbelow(n) == b.randbelow(n)


@given(seed=st.integers(min_value=0, max_value=2**64 - 1), size=st.integers(0, 40))
@settings(max_examples=50)
def test_shuffle_and_sample_identical_across_backends(seed, size):
    a, b = _native.SplitMix64(seed), _speedups.SplitMix64(seed)
    la, lb = list(range(size)), list(range(size))
    a.shuffle(la)
    b.shuffle(lb)
    assert la == lb
    assert sorted(la) == list(range(size))
    k = size // 2
    sa, sb = a.sample(list(range(size)), k), b.sample(list(range(size)), k)
    assert sa == sb
    assert len(set(sa)) == k


@pytest.mark.parametrize("impl", BACKENDS)
def test_randbelow_bounds_and_errors(impl):
    rng = impl.SplitMix64(7)
    assert all(0 <= rng.randbelow(10) < 10 for _ in range(500))
    assert all(3 <= rng.randint(3, 5) <= 5 for _ in range(100))
    with pytest.raises(ValueError):
        rng.randbelow(0)
    with pytest.raises(ValueError):
        rng.randint(5, 3)
    with pytest.raises(ValueError):
        rng.sample([1, 2], 3)


@pytest.mark.parametrize("impl", BACKENDS)
def test_randint_is_roughly_uniform(impl):
    rng = impl.SplitMix64(123)
    counts = [0] * 4
    n = 40_000
    for _ in range(n):
        counts[rng.randint(0, 3)] += 1
    for c in counts:
        assert abs(c / n - 0.25) < 0.01


# -- token containment --

@pytest.mark.parametrize("impl", BACKENDS)
def test_containment_examples(impl):
    assert impl.token_containment(["30"], ["30", "euros"])
    assert impl.token_containment(["a", "b"], ["x", "a", "b", "y"])
    assert not impl.token_containment(["a", "c"], ["x", "a", "b", "y"])
    assert not impl.token_containment(["monthly"], ["yearly"])
    assert impl.token_containment([], ["x"])  # callers police empties


@pytest.mark.parametrize("impl", BACKENDS)
@given(
    a=st.lists(st.sampled_from("abc"), max_size=6),
    b=st.lists(st.sampled_from("abc"), max_size=6),
)
def test_containment_matches_oracle(impl, a, b):
    assert impl.token_containment(a, b) == containment_oracle(a, b)


def test_backends_forge_identical_datasets(tmp_path):
    # All forge randomness flows through the kernels, so the pure fallback
    # must produce the same dataset bytes as the compiled module.
    import subprocess
    import sys

    snippet = (
        "from slotforge.prompt_forge import ForgeConfig, forge_regular_dataset, dumps_example\n"
        "from slotforge.synth import synth_corpus\n"
        "import sys\n"
        "examples = forge_regular_dataset(synth_corpus(5, 6, seed=9), ForgeConfig(master_seed=9))\n"
        "sys.stdout.write(''.join(dumps_example(e) + '\\n' for e in examples))\n"
    )

    def run(pure):
        import os

        env = dict(os.environ)
        env.pop("SLOTFORGE_PURE", None)
        if pure:
            env["SLOTFORGE_PURE"] = "1"
        return subprocess.run(
            [sys.executable, "-c", snippet], env=env, capture_output=True, text=True, check=True
        ).stdout

    assert run(pure=True) == run(pure=False)
