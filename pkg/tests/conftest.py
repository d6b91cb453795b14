import itertools
import math

import numpy as np
import pytest

from blockentropy import models

ACCEPTANCE_RESULTS = {}


def letters(s):
    """'aabb' -> array([0, 0, 1, 1])."""
    return np.array([ord(c) - ord("a") for c in s], dtype=np.int64)


def brute_force_probability(model, seq):
    """P(X_1^n = seq) by direct multiplication; independent of the library's oracles."""
    if isinstance(model, models.IID):
        return math.prod(float(model.p[s]) for s in seq)
    if isinstance(model, models.Markov):
        p = float(model.initial[seq[0]])
        for a, b in zip(seq, seq[1:]):
            p *= float(model.transition[a][b])
        return p
    if isinstance(model, models.FunctionOfMarkov):
        total = 0.0
        for states in itertools.product(range(model.hidden.alphabet_size), repeat=len(seq)):
            if all(model.output_map[s] == y for s, y in zip(states, seq)):
                total += brute_force_probability(model.hidden, states)
        return total
    if isinstance(model, models.Mixture):
        return sum(float(w) * brute_force_probability(c, seq) for w, c in zip(model.weights, model.components))
    raise TypeError(model)


def brute_force_entropy(model, k):
    terms = []
    for seq in itertools.product(range(model.alphabet_size), repeat=k):
        p = brute_force_probability(model, seq)
        if p > 0:
            terms.append(-p * math.log2(p))
    return math.fsum(terms)


@pytest.fixture
def fair():
    return models.fair_coin()


@pytest.fixture
def markov01():
    return models.symmetric_markov(0.1)


@pytest.fixture
def delta_mix():
    return models.Mixture([0.5, 0.5], (models.point_mass(0), models.point_mass(1)))


@pytest.fixture
def fair_delta_mix():
    return models.Mixture([0.5, 0.5], (models.fair_coin(), models.point_mass(0)))


@pytest.fixture
def hidden3():
    """Three hidden states, outputs 0,1,1: a binary process that is not Markov."""
    hidden = models.Markov([0.25, 0.5, 0.25], [[0.5, 0.5, 0.0], [0.25, 0.5, 0.25], [0.0, 0.5, 0.5]])
    return models.FunctionOfMarkov(hidden, np.array([0, 1, 1]), 2)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key:>2}: {detail}")
