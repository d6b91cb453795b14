import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockentropy import models
from blockentropy.empirical import (
    distance_to_law,
    distinct_blocks,
    empirical_distribution,
    plug_in_entropy,
    radix_codes,
    digits_from_codes,
    variational_distance,
)
from blockentropy.exact import block_entropy, exact_block_law
from blockentropy.models import sample, trial_seed

from conftest import letters


def counts(s, k):
    return {"".join(chr(97 + c) for c in b): v for b, v in empirical_distribution(letters(s), k).as_dict().items()}


def test_counts_non_overlapping_blocks():
    assert counts("aabb", 2) == {"aa": 1, "bb": 1}
    assert counts("aabb", 1) == {"a": 2, "b": 2}
    d = empirical_distribution(letters("aabbb"), 2)
    assert d.as_dict() == {(0, 0): 1, (1, 1): 1}
    assert d.block_count == 2


def test_k_larger_than_n_is_rejected():
    with pytest.raises(ValueError):
        empirical_distribution(letters("ab"), 3)
    with pytest.raises(ValueError):
        distinct_blocks(letters("ab"), 3)


def test_plug_in_examples():
    assert plug_in_entropy(empirical_distribution(letters("aabb"), 2)) == 1.0
    assert plug_in_entropy(empirical_distribution(letters("aaaaaaaa"), 2)) == 0.0
    expected = -0.75 * math.log2(0.75) - 0.25 * math.log2(0.25)
    h = plug_in_entropy(empirical_distribution(letters("aaab"), 1))
    assert h == pytest.approx(expected, abs=1e-15)
    assert h == pytest.approx(0.8112781244591328, abs=1e-15)


def test_distinct_blocks_examples():
    assert distinct_blocks(letters("aabb"), 2) == 2
    assert distinct_blocks(letters("aaaa"), 2) == 1
    assert distinct_blocks(letters("abab"), 2) == 1


def test_variational_examples():
    p = {"a": 0.5, "b": 0.5}
    assert variational_distance(p, p) == 0.0
    assert variational_distance({"a": 1.0}, {"b": 1.0}) == 2.0
    assert variational_distance([0.5, 0.5], [0.75, 0.25]) == 0.5


@given(st.lists(st.floats(0, 1), min_size=1, max_size=8), st.lists(st.floats(0, 1), min_size=1, max_size=8))
def test_variational_metric_properties(a, b):
    size = max(len(a), len(b))

    def norm(v):
        v = np.array(v + [0.0] * (size - len(v)))
        return v / v.sum() if v.sum() > 0 else np.full(size, 1 / size)

    p, q = norm(a), norm(b)
    d = variational_distance(p, q)
    assert 0 <= d <= 2 + 1e-12
    assert d == pytest.approx(variational_distance(q, p))
    assert variational_distance(p, p) == 0


@settings(max_examples=200)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=200), st.integers(1, 8))
def test_estimator_invariants(xs, k):
    x = np.array(xs)
    k = min(k, x.size)
    d = empirical_distribution(x, k, 4)
    b = x.size // k
    assert d.counts.sum() == b == d.block_count
    assert d.blocks.shape[1] == k
    assert np.all(d.counts >= 1)
    h = plug_in_entropy(d)
    assert 0 <= h <= math.log2(b)
    assert h <= k * math.log2(4) + 1e-12
    dist = distinct_blocks(x, k)
    assert dist == d.distinct == len(d.as_dict())
    assert 1 <= dist <= min(b, 4**k)


def test_radix_codes_roundtrip_wide():
    rng = np.random.default_rng(0)
    for size, k in [(2, 5), (3, 7), (256, 9), (5, 40)]:
        blocks = rng.integers(0, size, (50, k))
        codes = radix_codes(blocks, size)
        assert np.array_equal(digits_from_codes(codes, k, size), blocks)
        order = sorted(range(50), key=lambda i: tuple(blocks[i]))
        assert sorted(range(50), key=lambda i: codes[i]) == order or len(set(map(tuple, blocks))) < 50


def test_wide_blocks_count_like_narrow_ones():
    x = sample(models.uniform(256), 9 * 300, 1).symbols
    d = empirical_distribution(x, 9, 256)
    assert d.block_count == 300
    assert d.distinct == 300
    assert plug_in_entropy(d) == pytest.approx(math.log2(300))


def test_distance_to_law_matches_dictionary_form(markov01):
    x = sample(markov01, 5000, 3)
    d = empirical_distribution(x, 3)
    law = exact_block_law(markov01, 3)
    p_hat = {b: c / d.block_count for b, c in d.as_dict().items()}
    assert distance_to_law(d, law.probs) == pytest.approx(variational_distance(p_hat, law.as_dict()), abs=1e-12)


def test_bias_inequality_markov(markov01):
    """Mean plug-in entropy stays below H(k) (one-sided, 3 standard errors)."""
    k, n, trials = 4, 80, 10_000
    hs = np.array([plug_in_entropy(empirical_distribution(sample(markov01, n, trial_seed(11, t)), k))
                   for t in range(trials)])
    se = hs.std(ddof=1) / math.sqrt(trials)
    assert hs.mean() <= block_entropy(markov01, k) + 3 * se


def test_fixed_k_consistency_fair_coin(fair):
    k, trials = 2, 200
    means = []
    for n in (10**2, 10**3, 10**4, 10**5):
        hs = [plug_in_entropy(empirical_distribution(sample(fair, n, trial_seed(3, n, t)), k)) for t in range(trials)]
        means.append(np.mean(hs))
    assert all(a < b for a, b in zip(means, means[1:]))
    assert abs(means[-1] - 2.0) <= 0.01


def test_distance_shrinks_along_above_rule(fair):
    """Distance to the true law shrinks along n(k) = 2^{k(h+1)}."""
    med = []
    for k in range(2, 13, 2):
        n = 2 ** (2 * k)
        law = exact_block_law(fair, k).probs
        ds = [distance_to_law(empirical_distribution(sample(fair, n, trial_seed(9, k, t)), k), law) for t in range(8)]
        med.append(np.median(ds))
    assert all(a > b for a, b in zip(med, med[1:]))


def test_block_csv_export(tmp_path):
    d = empirical_distribution(letters("aabbab"), 2)
    d.to_csv(tmp_path / "blocks.csv")
    assert (tmp_path / "blocks.csv").read_text() == "block,count\n00,1\n01,1\n11,1\n"
