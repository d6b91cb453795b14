"""Ground-truth block laws, block entropies and sequence probabilities.

Block laws are dense arrays over all ``|X|**k`` blocks indexed by the
mixed-radix block code (first symbol most significant), so they line up with
:func:`blockentropy.empirical.radix_codes`.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .empirical import as_symbols
from .errors import ResourceError
from .kernels import hmm_forward_log2
from .models import (
    IID,
    FunctionOfMarkov,
    Markov,
    Mixture,
    RateBounds,
    entropy_bits,
    entropy_rate,
)

DEFAULT_BUDGET = int(os.environ.get("BLOCKENTROPY_ENUM_BUDGET", 2**24))


@dataclass(frozen=True, eq=False)
class ExactBlockLaw:
    k: int
    alphabet_size: int
    probs: np.ndarray

    def as_dict(self) -> dict[tuple, float]:
        from .empirical import digits_from_codes

        nz = np.flatnonzero(self.probs)
        blocks = digits_from_codes(nz, self.k, self.alphabet_size)
        return {tuple(b): float(p) for b, p in zip(blocks.tolist(), self.probs[nz])}

    def entropy(self) -> float:
        return entropy_bits(self.probs)


def _check_budget(alphabet_size, k, budget):
    if k < 1:
        raise ValueError("block length must be >= 1")
    required = alphabet_size**k
    if required > budget:
        raise ResourceError(
            f"enumerating {alphabet_size}^{k} = {required} blocks exceeds the budget of {budget}",
            required=required,
            budget=budget,
        )


def _iid_law(p, k):
    law = p.copy()
    for _ in range(k - 1):
        law = np.multiply.outer(law, p).ravel()
    return law


def _markov_law(m: Markov, k):
    s = m.alphabet_size
    law = m.initial.copy()
    for _ in range(k - 1):
        last = np.arange(law.size) % s
        law = (law[:, None] * m.transition[last]).ravel()
    return law


def _hidden_forward(model: FunctionOfMarkov, k, init=None):
    """alpha[w, s] = P(Y_1^k = w, X_k = s), optionally from a given initial law."""
    size = model.alphabet_size
    P = model.hidden.transition
    init = model.hidden.initial if init is None else init
    emit = np.zeros((size, P.shape[0]))
    emit[model.output_map, np.arange(P.shape[0])] = 1.0
    alpha = emit * init[None, :]
    for _ in range(k - 1):
        alpha = ((alpha @ P)[:, None, :] * emit[None, :, :]).reshape(-1, P.shape[0])
    return alpha


def _law(model, k):
    if isinstance(model, IID):
        return _iid_law(model.p, k)
    if isinstance(model, Markov):
        return _markov_law(model, k)
    if isinstance(model, FunctionOfMarkov):
        return _hidden_forward(model, k).sum(axis=1)
    if isinstance(model, Mixture):
        return sum(w * _law(c, k) for w, c in zip(model.weights, model.components))
    raise TypeError(f"not a process model: {type(model).__name__}")


def exact_block_law(model, k: int, budget: int = DEFAULT_BUDGET) -> ExactBlockLaw:
    """Distribution of ``X_1^k`` by brute-force enumeration of all blocks."""
    _check_budget(model.alphabet_size, k, budget)
    return ExactBlockLaw(k, model.alphabet_size, _law(model, k))


def enumerate_block_entropy(model, k: int, budget: int = DEFAULT_BUDGET) -> float:
    """H(k) from the enumerated block law, regardless of closed forms."""
    return exact_block_law(model, k, budget).entropy()


def closed_form_block_entropy(model, k: int) -> float:
    """H(k) for IID (``k H(p)``) and stationary Markov (``H(pi) + (k-1) h``) models."""
    if isinstance(model, IID):
        return k * entropy_bits(model.p)
    if isinstance(model, Markov):
        return entropy_bits(model.initial) + (k - 1) * entropy_rate(model)
    raise TypeError(f"no closed-form block entropy for {type(model).__name__}")


def block_entropy(model, k: int, budget: int = DEFAULT_BUDGET) -> float:
    """H(k) in bits, in closed form when one exists, else by enumeration."""
    if isinstance(model, (IID, Markov)):
        return closed_form_block_entropy(model, k)
    return enumerate_block_entropy(model, k, budget)


def conditional_block_entropy(model, k: int, budget: int = DEFAULT_BUDGET) -> float:
    """H(X_1^k | invariant algebra): the weighted block entropy of the ergodic components."""
    if isinstance(model, Mixture):
        return math.fsum(w * block_entropy(c, k, budget) for w, c in zip(model.weights, model.components))
    return block_entropy(model, k, budget)


def hidden_markov_rate_bounds(model: FunctionOfMarkov, order: int = 10, budget: int = DEFAULT_BUDGET) -> RateBounds:
    """Bracket the rate of a hidden chain between the standard conditional entropies.

    ``H(Y_k | Y_1^{k-1}, X_1) <= h <= H(Y_k | Y_1^{k-1})`` with ``k = order``.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    _check_budget(model.alphabet_size, order, budget)
    upper = enumerate_block_entropy(model, order, budget) - enumerate_block_entropy(model, order - 1, budget)

    def joint_with_start(k):
        total = 0.0
        for s, ps in enumerate(model.hidden.initial):
            if ps == 0:
                continue
            start = np.zeros_like(model.hidden.initial)
            start[s] = 1.0
            cond = _hidden_forward(model, k, start).sum(axis=1)
            total += entropy_bits(ps * cond)
        return total

    lower = joint_with_start(order) - joint_with_start(order - 1)
    return RateBounds(max(0.0, lower), upper)


def log_probability(model, x) -> float:
    """Exact ``log2 P(X_1^n = x)``; ``-inf`` for impossible sequences."""
    x = as_symbols(x).astype(np.int64)
    if x.size == 0:
        return 0.0
    if x.min() < 0 or x.max() >= model.alphabet_size:
        return -math.inf
    if isinstance(model, IID):
        p = model.p[x]
        if np.any(p == 0):
            return -math.inf
        counts = np.bincount(x, minlength=model.alphabet_size)
        mask = counts > 0
        return math.fsum(counts[mask] * np.log2(model.p[mask]))
    if isinstance(model, Markov):
        steps = model.transition[x[:-1], x[1:]]
        if model.initial[x[0]] == 0 or np.any(steps == 0):
            return -math.inf
        pairs = np.bincount(x[:-1] * model.alphabet_size + x[1:], minlength=model.alphabet_size**2)
        mask = pairs > 0
        logs = np.log2(model.transition.ravel()[mask])
        return math.log2(model.initial[x[0]]) + math.fsum(pairs[mask] * logs)
    if isinstance(model, FunctionOfMarkov):
        return float(hmm_forward_log2(x, model.hidden.initial, model.hidden.transition, model.output_map))
    if isinstance(model, Mixture):
        terms = [(math.log2(w), log_probability(c, x)) for w, c in zip(model.weights, model.components) if w > 0]
        finite = [a + b for a, b in terms if b != -math.inf]
        if not finite:
            return -math.inf
        top = max(finite)
        return top + math.log2(math.fsum(2.0 ** (v - top) for v in finite))
    raise TypeError(f"not a process model: {type(model).__name__}")
