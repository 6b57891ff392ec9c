import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphcode.channels import (ChannelSpec, TrialRng, bec_as_bsc, equivalent_crossover,
                                noisy_link, repeat_erasure, repeat_majority, transmit)
from graphcode.gf2 import ERASED

TRIALS = 100_000


def within(rate, p, n, sigmas=3.0):
    return abs(rate - p) <= sigmas * math.sqrt(p * (1 - p) / n) + 1e-12


def rng(i=0):
    return np.random.default_rng(i)


def test_spec_validation():
    with pytest.raises(ValueError):
        ChannelSpec.bsc(0.6)
    with pytest.raises(ValueError):
        ChannelSpec.bec(-0.1)
    assert ChannelSpec("bec", 0.3).kind.value == "bec"


def test_transmit_extremes():
    assert transmit(ChannelSpec.bsc(0.0), 1, rng()) == 1
    assert transmit(ChannelSpec.bec(1.0), 0, rng()) == ERASED
    bits = transmit(ChannelSpec.bsc(0.0), np.ones(1000, np.uint8), rng())
    assert bits.min() == 1


def test_transmit_bsc_flip_rate():
    out = transmit(ChannelSpec.bsc(0.3), np.zeros(TRIALS, np.uint8), rng(1))
    assert ERASED not in out
    assert within(out.mean(), 0.3, TRIALS)


def test_bec_never_corrupts():
    out = transmit(ChannelSpec.bec(0.4), np.ones(TRIALS, np.uint8), rng(2))
    assert set(np.unique(out).tolist()) <= {1, ERASED}
    assert within(np.mean(out == ERASED), 0.4, TRIALS)


def test_repeat_majority_noiseless_and_coin():
    bits = np.array([0, 1, 1, 0], np.uint8)
    for j in (1, 2, 5):
        assert repeat_majority(ChannelSpec.bsc(0.0), bits, j, rng()).tolist() == bits.tolist()
    out = repeat_majority(ChannelSpec.bsc(0.5), np.zeros(TRIALS, np.uint8), 1, rng(3))
    assert within(out.mean(), 0.5, TRIALS)


def test_repeat_majority_bound_example():
    out = repeat_majority(ChannelSpec.bsc(0.1), np.zeros(TRIALS, np.uint8), 5, rng(4))
    bound = 0.36 ** 2.5
    assert abs(bound - 0.0777) < 1e-4
    assert out.mean() <= bound + 3 * math.sqrt(bound * (1 - bound) / TRIALS)


def test_repeat_majority_exact_law():
    # majority over j=4 with coin ties: P(3 or 4 flips) + P(2 flips)/2
    eps = 0.2
    exact = sum(math.comb(4, k) * eps ** k * (1 - eps) ** (4 - k) for k in (3, 4))
    exact += 0.5 * math.comb(4, 2) * eps ** 2 * (1 - eps) ** 2
    out = repeat_majority(ChannelSpec.bsc(eps), np.zeros(TRIALS, np.uint8), 4, rng(5))
    assert within(out.mean(), exact, TRIALS)


def test_repeat_majority_monotone_in_j():
    rates = [repeat_majority(ChannelSpec.bsc(0.2), np.zeros(TRIALS, np.uint8), j, rng(j)).mean()
             for j in (1, 3, 5, 7)]
    assert all(b <= a for a, b in zip(rates, rates[1:]))


def test_repeat_erasure():
    out = repeat_erasure(ChannelSpec.bec(0.5), np.ones(TRIALS, np.uint8), 3, rng(6))
    assert within(np.mean(out == ERASED), 0.125, TRIALS)
    assert set(np.unique(out).tolist()) <= {1, ERASED}
    assert ERASED not in repeat_erasure(ChannelSpec.bec(0.0), np.ones(100, np.uint8), 1, rng())


def test_bec_as_bsc():
    z = np.zeros(TRIALS, np.uint8)
    assert bec_as_bsc(ChannelSpec.bec(0.0), np.array([1, 0, 1], np.uint8), rng()).tolist() == [1, 0, 1]
    assert within(bec_as_bsc(ChannelSpec.bec(1.0), z, rng(7)).mean(), 0.5, TRIALS)
    assert within(bec_as_bsc(ChannelSpec.bec(0.4), z, rng(8)).mean(), 0.2, TRIALS)
    assert equivalent_crossover(ChannelSpec.bec(0.4)) == 0.2
    assert equivalent_crossover(ChannelSpec.bsc(0.1)) == 0.1


def test_noisy_link_is_binary():
    out = noisy_link(ChannelSpec.bec(0.7), np.ones(1000, np.uint8), rng(9))
    assert set(np.unique(out).tolist()) <= {0, 1}


def test_wrong_channel_kind_rejected():
    with pytest.raises(ValueError):
        repeat_majority(ChannelSpec.bec(0.1), 0, 3, rng())
    with pytest.raises(ValueError):
        repeat_erasure(ChannelSpec.bsc(0.1), 0, 3, rng())
    with pytest.raises(ValueError):
        repeat_majority(ChannelSpec.bsc(0.1), 0, 0, rng())


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 63 - 1), st.integers(0, 10 ** 6), st.integers(0, 5000))
def test_trial_streams_reproducible(seed, trial, node):
    a = TrialRng(seed, trial).for_node(node).random(4)
    b = TrialRng(seed, trial).for_node(node).random(4)
    assert np.array_equal(a, b)


def test_trial_streams_independent_of_call_order():
    r1 = TrialRng(5, 1)
    first = r1.for_node(3).random(3)
    r2 = TrialRng(5, 1)
    r2.for_node(9).random(10)
    r2.for_purpose("x").random(10)
    assert np.array_equal(first, r2.for_node(3).random(3))
    assert not np.array_equal(first, TrialRng(5, 2).for_node(3).random(3))
    assert not np.array_equal(first, TrialRng(5, 1).for_node(4).random(3))
