import json
import math

import numpy as np
import pytest

from blockentropy import models
from blockentropy.empirical import empirical_distribution, variational_distance
from blockentropy.errors import ConfigError
from blockentropy.models import RateBounds, entropy_rate, sample, trial_seed


def test_degenerate_iid_gives_constant_path():
    x = sample(models.point_mass(0), 5, seed=123)
    assert x.symbols.tolist() == [0] * 5


@pytest.mark.parametrize("seed", range(20))
def test_absorbing_markov_never_switches(seed):
    m = models.Markov([0.5, 0.5], [[1.0, 0.0], [0.0, 1.0]])
    x = sample(m, 4, seed).symbols.tolist()
    assert x in ([0] * 4, [1] * 4)


def test_mixture_picks_one_component_per_path(delta_mix):
    hits = sum(sample(delta_mix, 3, trial_seed(7, t)).symbols.tolist() == [0, 0, 0] for t in range(10_000))
    assert abs(hits / 10_000 - 0.5) <= 0.02


def test_sample_is_reproducible(markov01):
    a = sample(markov01, 1000, 99)
    b = sample(markov01, 1000, 99)
    assert np.array_equal(a.symbols, b.symbols)
    assert not np.array_equal(a.symbols, sample(markov01, 1000, 100).symbols)


def test_trial_seed_is_stable_and_distinct():
    assert trial_seed(1, 2) == trial_seed(1, 2)
    assert len({trial_seed(1, t) for t in range(1000)}) == 1000
    assert 0 <= trial_seed(2**63, 5) < 2**64


def test_symbols_stay_in_alphabet(hidden3):
    x = sample(hidden3, 5000, 1)
    assert x.symbols.max() < hidden3.alphabet_size


@pytest.mark.parametrize("bad, path", [
    (lambda: models.IID([0.5, 0.6]), "p"),
    (lambda: models.IID([1.5, -0.5]), "p"),
    (lambda: models.Markov([0.5, 0.5], [[0.9, 0.2], [0.1, 0.9]]), "transition[0]"),
    (lambda: models.Markov([0.9, 0.1], [[0.9, 0.1], [0.1, 0.9]]), "initial"),
    (lambda: models.Mixture([0.5, 0.4], (models.fair_coin(), models.fair_coin())), "weights"),
    (lambda: models.Mixture([0.5, 0.5], (models.fair_coin(), models.uniform(3))), "components"),
    (lambda: models.Mixture([1.0], (models.Markov([0.5, 0.5], np.eye(2)),)), "components[0]"),
])
def test_invalid_models_raise_config_error(bad, path):
    with pytest.raises(ConfigError) as err:
        bad()
    assert err.value.path == path


def test_entropy_rate_examples(delta_mix):
    assert entropy_rate(models.fair_coin()) == 1.0
    expected = -0.1 * math.log2(0.1) - 0.9 * math.log2(0.9)
    assert entropy_rate(models.symmetric_markov(0.1)) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.46899559358928, abs=1e-12)
    assert entropy_rate(delta_mix) == 0.0


def test_mixture_rate_is_weighted_average():
    mix = models.Mixture([0.3, 0.7], (models.fair_coin(), models.symmetric_markov(0.1)))
    assert entropy_rate(mix) == pytest.approx(0.3 + 0.7 * entropy_rate(models.symmetric_markov(0.1)))


def test_hidden_markov_rate_is_bracketed(hidden3):
    b = entropy_rate(hidden3, order=8)
    assert isinstance(b, RateBounds) and not b.exact
    assert 0 <= b.lower <= b.upper <= 1
    tighter = entropy_rate(hidden3, order=12)
    assert b.lower - 1e-12 <= tighter.lower <= tighter.upper <= b.upper + 1e-12


def test_json_roundtrip(hidden3, fair_delta_mix):
    for m in (models.fair_coin(), models.symmetric_markov(0.2), hidden3, fair_delta_mix):
        again = models.from_json(json.loads(json.dumps(models.to_json(m))))
        assert models.to_json(again) == models.to_json(m)
        assert models.model_id(again) == models.model_id(m)


def test_json_errors_name_the_field():
    doc = {"type": "mixture", "components": [
        {"weight": 0.5, "model": {"type": "iid", "p": [0.5, 0.5]}},
        {"weight": 0.5, "model": {"type": "markov", "initial": [0.5, 0.5], "transition": [[0.5, 0.6], [0.5, 0.5]]}},
    ]}
    with pytest.raises(ConfigError) as err:
        models.from_json(doc)
    assert err.value.path == "model.components[1].model.transition[0]"
    with pytest.raises(ConfigError) as err:
        models.from_json({"type": "iid"})
    assert err.value.path == "model.p"
    with pytest.raises(ConfigError) as err:
        models.from_json({"type": "zipf"})
    assert err.value.path == "model.type"


def test_sample_file_roundtrip(tmp_path):
    x = sample(models.uniform(7), 500, 3).symbols
    models.write_sample(tmp_path / "s.bin", x)
    assert np.array_equal(models.read_sample(tmp_path / "s.bin"), x)


@pytest.mark.parametrize("model_name", ["markov01", "hidden3", "fair_delta_mix"])
def test_stationarity_of_block_laws(model_name, request):
    """Law of X_1^k matches that of X_2^{k+1} over 10^5 independent paths."""
    model = request.getfixturevalue(model_name)
    k, paths = 2, 100_000
    rng_seed = 2024
    xs = np.stack([sample(model, k + 1, trial_seed(rng_seed, t)).symbols for t in range(paths)])
    codes_first = xs[:, 0] * 2 + xs[:, 1]
    codes_shift = xs[:, 1] * 2 + xs[:, 2]
    p = np.bincount(codes_first, minlength=4) / paths
    q = np.bincount(codes_shift, minlength=4) / paths
    assert variational_distance(p, q) <= 3 * k * 2**k / math.sqrt(paths)


def test_mixture_path_follows_its_component():
    mix = models.Mixture([0.5, 0.5], (models.IID([0.9, 0.1]), models.IID([0.2, 0.8])))
    for t in range(20):
        x = sample(mix, 20_000, trial_seed(5, t))
        freq1 = empirical_distribution(x, 1).as_dict().get((1,), 0) / 20_000
        target = [0.1, 0.8][x.component]
        assert abs(freq1 - target) < 0.02
        assert abs(freq1 - 0.45) > 0.3
