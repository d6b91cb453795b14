import math

import numpy as np
import pytest

from blockentropy import models
from blockentropy.errors import ResourceError
from blockentropy.exact import (
    block_entropy,
    closed_form_block_entropy,
    conditional_block_entropy,
    enumerate_block_entropy,
    exact_block_law,
    log_probability,
)
from blockentropy.models import Mixture, sample, trial_seed

from conftest import brute_force_entropy, brute_force_probability, letters

H01 = -0.9 * math.log2(0.9) - 0.1 * math.log2(0.1)


def test_laws(fair, markov01, delta_mix):
    assert exact_block_law(fair, 2).as_dict() == pytest.approx({(0, 0): .25, (0, 1): .25, (1, 0): .25, (1, 1): .25})
    law = exact_block_law(markov01, 2).as_dict()
    assert law == pytest.approx({(0, 0): 0.45, (0, 1): 0.05, (1, 0): 0.05, (1, 1): 0.45}, abs=1e-15)
    assert {b: p for b, p in exact_block_law(delta_mix, 2).as_dict().items() if p > 0} == {(0, 0): 0.5, (1, 1): 0.5}


@pytest.mark.parametrize("k", [1, 3, 5])
def test_laws_sum_to_one_and_match_brute_force(k, markov01, hidden3, fair_delta_mix):
    for model in (markov01, hidden3, fair_delta_mix):
        law = exact_block_law(model, k)
        assert law.probs.sum() == pytest.approx(1.0, abs=1e-10)
        for block, p in law.as_dict().items():
            assert p == pytest.approx(brute_force_probability(model, block), abs=1e-14)


def test_budget_error_states_requirement(fair):
    with pytest.raises(ResourceError) as info:
        exact_block_law(fair, 10, budget=512)
    assert info.value.required == 1024
    assert "1024" in str(info.value)


def test_block_entropy_examples(fair, markov01, delta_mix):
    assert block_entropy(fair, 5) == pytest.approx(5.0, abs=1e-12)
    for k in (1, 3, 7):
        assert block_entropy(delta_mix, k) == pytest.approx(1.0, abs=1e-12)
    assert block_entropy(markov01, 3) == pytest.approx(1 + 2 * H01, abs=1e-12)
    assert block_entropy(markov01, 3) == pytest.approx(1.937991187, abs=1e-9)
    assert brute_force_entropy(markov01, 3) == pytest.approx(1 + 2 * H01, abs=1e-9)


def test_conditional_examples(delta_mix, fair_delta_mix, markov01):
    assert conditional_block_entropy(delta_mix, 4) == 0.0
    single = Mixture([1.0], (markov01,))
    assert conditional_block_entropy(single, 5) == pytest.approx(block_entropy(markov01, 5), abs=1e-12)
    assert conditional_block_entropy(fair_delta_mix, 3) == pytest.approx(1.5, abs=1e-12)


def closed_form_models():
    return [
        models.fair_coin(),
        models.IID([0.2, 0.8]),
        models.IID([0.5, 0.3, 0.2]),
        models.symmetric_markov(0.1),
        models.symmetric_markov(0.37),
        models.Markov([2 / 3, 1 / 3], [[0.75, 0.25], [0.5, 0.5]]),
    ]


@pytest.mark.parametrize("model", closed_form_models(), ids=lambda m: m.name or "model")
def test_closed_form_agrees_with_enumeration(model):
    top = 12 if model.alphabet_size == 2 else 7
    for k in range(1, top + 1):
        assert closed_form_block_entropy(model, k) == pytest.approx(enumerate_block_entropy(model, k), abs=1e-9)


@pytest.mark.parametrize("k", [1, 2, 4])
def test_enumeration_matches_itertools_oracle(k, hidden3, fair_delta_mix):
    for model in (hidden3, fair_delta_mix, models.IID([0.5, 0.3, 0.2])):
        assert enumerate_block_entropy(model, k) == pytest.approx(brute_force_entropy(model, k), abs=1e-9)


def test_monotone_and_subadditive(markov01, hidden3, fair_delta_mix):
    for model in (markov01, hidden3, fair_delta_mix):
        h = [0.0] + [enumerate_block_entropy(model, k) for k in range(1, 11)]
        for k in range(1, 10):
            assert h[k + 1] >= h[k] - 1e-12
        for j in range(1, 6):
            for k in range(1, 11 - j):
                assert h[j + k] <= h[j] + h[k] + 1e-12


def test_markov_residual_is_exact(markov01):
    rate = models.entropy_rate(markov01)
    for k in range(1, 11):
        assert block_entropy(markov01, k) / k - rate == pytest.approx((1 - rate) / k, abs=1e-12)


def test_block_rate_decreases_to_rate(hidden3):
    per = [enumerate_block_entropy(hidden3, k) / k for k in range(1, 12)]
    assert all(a >= b - 1e-12 for a, b in zip(per, per[1:]))
    bounds = models.entropy_rate(hidden3)
    assert per[-1] >= bounds.lower - 1e-12


def test_mutual_information_range(fair_delta_mix, delta_mix):
    mix = Mixture([0.3, 0.7], (models.fair_coin(), models.symmetric_markov(0.1)))
    for model in (fair_delta_mix, delta_mix, mix):
        weight_entropy = models.entropy_bits(model.weights)
        for k in range(1, 9):
            gap = block_entropy(model, k) - conditional_block_entropy(model, k)
            assert -1e-12 <= gap <= weight_entropy + 1e-12


def test_log_probability_examples(fair, markov01):
    x = sample(fair, 10, 4)
    assert log_probability(fair, x) == -10.0
    assert log_probability(markov01, letters("aab")) == pytest.approx(math.log2(0.045), abs=1e-12)
    assert log_probability(markov01, letters("aab")) == pytest.approx(-4.47393, abs=5e-6)
    assert log_probability(models.point_mass(0), letters("ab")) == -math.inf


def test_log_probability_matches_oracle(hidden3, fair_delta_mix, delta_mix):
    rng = np.random.default_rng(5)
    for model in (hidden3, fair_delta_mix, delta_mix):
        for _ in range(20):
            seq = tuple(rng.integers(0, 2, 6))
            p = brute_force_probability(model, seq)
            lp = log_probability(model, np.array(seq))
            if p == 0:
                assert lp == -math.inf
            else:
                assert lp == pytest.approx(math.log2(p), abs=1e-10)


def test_log_probability_long_sequence_stays_finite(markov01, hidden3):
    for model in (markov01, hidden3):
        x = sample(model, 100_000, 2)
        lp = log_probability(model, x)
        assert math.isfinite(lp) and lp < -1000


def test_smb_concentration(markov01):
    rate = models.entropy_rate(markov01)
    spreads = []
    for n in (10**2, 10**3, 10**4, 10**5):
        trials = 1000 if n <= 10**4 else 200
        v = np.array([-log_probability(markov01, sample(markov01, n, trial_seed(21, n, t))) / n for t in range(trials)])
        spreads.append(v.std(ddof=1))
        assert abs(v.mean() - rate) < 4 * spreads[-1] / math.sqrt(trials) + 0.6 / n
    assert all(a > b for a, b in zip(spreads, spreads[1:]))
