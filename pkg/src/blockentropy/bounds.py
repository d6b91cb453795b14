"""Nonlinear bound on block entropy via the average block entropy of ergodic components.

For ``n = p k`` and ``m >= 1``::

    H(X_1^n)/n - H(X_1^k | I)/k
        <= 2/k + (2/n) log k
           + 3 log|X| * (1/m + (1 - 1/m) sigma(m H(X_1^k | I) - log(n/k)) + k/n)

with ``sigma(y) = min(base**y, 1)``. The dictionary-size chain behind it,
``(k/n) E D <= E sigma(-log P(X_1^k|I) - log(n/k)) <= 1/m + (1-1/m) sigma(...)``,
is checked by Monte Carlo in :func:`dictionary_expectation_bound`.

``base`` defaults to 2, the base in which the chain is derived. For negative
arguments ``e**y < 2**y``, so base e gives the smaller right-hand side and has to
be checked on its own.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .empirical import digits_from_codes, distinct_blocks
from .errors import ResourceError
from .exact import DEFAULT_BUDGET, conditional_block_entropy, enumerate_block_entropy, exact_block_law
from .models import Mixture, sample, trial_seed

SE_MULTIPLIER = 3.0
ROUNDING = 1e-12  # absolute slack for ties such as D = 1 against sigma = k/n


def sigma(y: float, base: float = 2.0) -> float:
    """min(base**y, 1)."""
    if y >= 0:
        return 1.0
    return base**y if y > -1e4 else 0.0


@dataclass(frozen=True)
class Theorem2Instance:
    k: int
    p: int
    m: float
    alphabet_size: int
    h_cond: float
    h_block_n: float = 0.0

    def __post_init__(self):
        if self.k < 1 or self.p < 1:
            raise ValueError("k and p must be positive integers")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.h_cond < 0 or self.h_block_n < 0:
            raise ValueError("entropies must be nonnegative")

    @property
    def n(self) -> int:
        return self.p * self.k


def dictionary_rhs(k: int, n: int, m: float, h_cond: float, base: float = 2.0) -> float:
    """1/m + (1 - 1/m) sigma(m H(X_1^k|I) - log(n/k))."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return 1 / m + (1 - 1 / m) * sigma(m * h_cond - math.log2(n / k), base)


def theorem2_rhs(inst: Theorem2Instance, base: float = 2.0) -> float:
    k, n = inst.k, inst.n
    return (
        2 / k
        + (2 / n) * math.log2(k)
        + 3 * math.log2(inst.alphabet_size) * (dictionary_rhs(k, n, inst.m, inst.h_cond, base) + k / n)
    )


@dataclass(frozen=True)
class Theorem2Row:
    k: int
    p: int
    n: int
    m: float
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def verify_theorem2(model, k: int, p: int, m_grid, base: float = 2.0, budget: int = DEFAULT_BUDGET) -> list[Theorem2Row]:
    """Exact left side by enumeration of ``X_1^n`` against the bound for each ``m``."""
    n = p * k
    h_n = enumerate_block_entropy(model, n, budget)
    h_cond = conditional_block_entropy(model, k, budget)
    lhs = h_n / n - h_cond / k
    rows = []
    for m in m_grid:
        inst = Theorem2Instance(k, p, float(m), model.alphabet_size, h_cond, h_n)
        rows.append(Theorem2Row(k, p, n, float(m), lhs, theorem2_rhs(inst, base)))
    return rows


def expected_sigma(model, k: int, n: int, base: float = 2.0, budget: int = DEFAULT_BUDGET) -> float:
    """E sigma(-log P(X_1^k | I) - log(n/k)), summed exactly over components and blocks.

    At base 2 this equals ``sum_c w_c sum_w min(P_c(w), k/n)``.
    """
    comps = list(zip(model.weights, model.components)) if isinstance(model, Mixture) else [(1.0, model)]
    total = []
    for w, c in comps:
        law = exact_block_law(c, k, budget).probs
        nz = law[law > 0]
        with np.errstate(divide="ignore"):
            y = -np.log2(nz) - math.log2(n / k)
        sig = np.minimum(np.power(base, np.minimum(y, 0.0)), 1.0)
        total.append(w * math.fsum(nz * sig))
    return math.fsum(total)


def exact_expected_distinct(model, k: int, n: int, budget: int = DEFAULT_BUDGET) -> float:
    """E D(k, X_1^n) summed over every length-``n`` sequence (desk-scale ``n`` only)."""
    if n % k:
        raise ValueError("n must be a multiple of k")
    size = model.alphabet_size
    probs = exact_block_law(model, n, budget).probs
    support = np.flatnonzero(probs)
    blocks = digits_from_codes(support, n, size).reshape(support.size, n // k, k)
    codes = np.sort(blocks @ (size ** np.arange(k - 1, -1, -1)), axis=1)
    distinct = 1 + np.count_nonzero(np.diff(codes, axis=1), axis=1)
    return math.fsum(probs[support] * distinct)


@dataclass(frozen=True)
class ChainReport:
    k: int
    n: int
    m: float
    trials: int
    scaled_dictionary: float  # (k/n) * mean D
    standard_error: float
    expected_sigma: float
    rhs: float

    @property
    def holds_dictionary_sigma(self) -> bool:
        return self.scaled_dictionary <= self.expected_sigma + SE_MULTIPLIER * self.standard_error + ROUNDING

    @property
    def holds_sigma_rhs(self) -> bool:
        return self.expected_sigma <= self.rhs + ROUNDING

    @property
    def holds(self) -> bool:
        return (
            self.holds_dictionary_sigma
            and self.holds_sigma_rhs
            and self.scaled_dictionary <= self.rhs + SE_MULTIPLIER * self.standard_error + ROUNDING
        )


def dictionary_chain(
    model, k: int, n: int, m_grid, trials: int = 1000, seed: int = 0, base: float = 2.0, budget: int = DEFAULT_BUDGET
) -> list[ChainReport]:
    """One Monte Carlo estimate of ``(k/n) E D(k, X_1^n)`` checked against the chain for every ``m``."""
    if n % k:
        raise ValueError("n must be a multiple of k")
    if model.alphabet_size**k > budget:
        raise ResourceError(f"{model.alphabet_size}^{k} blocks exceed the budget of {budget}", model.alphabet_size**k, budget)
    scaled = np.array([
        (k / n) * distinct_blocks(sample(model, n, trial_seed(seed, k, n, t)), k) for t in range(trials)
    ])
    se = float(scaled.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    h_cond = conditional_block_entropy(model, k, budget)
    es = expected_sigma(model, k, n, base, budget)
    return [
        ChainReport(k, n, float(m), trials, float(scaled.mean()), se, es, dictionary_rhs(k, n, m, h_cond, base))
        for m in m_grid
    ]


def dictionary_expectation_bound(
    model, k: int, n: int, m: float, trials: int = 1000, seed: int = 0, base: float = 2.0, budget: int = DEFAULT_BUDGET
) -> ChainReport:
    """Monte Carlo ``(k/n) E D(k, X_1^n)`` against both links of the dictionary chain."""
    return dictionary_chain(model, k, n, [m], trials, seed, base, budget)[0]


def rhs_trend(k: int, m: float, h_cond: float, alphabet_size: int, p_values, base: float = 2.0) -> list[tuple[int, float]]:
    """Right-hand side at growing ``n = p k`` for fixed ``k, m``; nonincreasing in ``n``."""
    return [
        (p * k, theorem2_rhs(Theorem2Instance(k, p, m, alphabet_size, h_cond), base))
        for p in p_values
    ]
