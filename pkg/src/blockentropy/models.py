"""Stationary process generators with known entropy quantities.

Four variants: IID and Markov sources (ergodic), functions of Markov chains
(ergodic, no closed-form rate) and finite mixtures of ergodic sources
(stationary but non-ergodic).

Sampling contract
-----------------
Every sampler draws from ``numpy.random.Generator(PCG64(seed))`` and maps
uniform variates to symbols by inverse-CDF lookup: the symbol is the first
index ``j`` with ``u < cumsum(p)[j]`` (clipped to the last index). A Markov
path consumes one uniform for the initial state and one per transition. A
mixture consumes one uniform to pick the component, then the component's
draws follow on the same generator. The compiled and pure-Python kernels
perform the same float comparisons, so paths are bit-identical between them.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, NamedTuple, Union

import numpy as np

from .errors import ConfigError
from .kernels import markov_walk

PROB_TOL = 1e-12
STATIONARY_TOL = 1e-10


def _prob_vector(p, path):
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ConfigError("expected a non-empty probability vector", path)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ConfigError("probabilities must be finite and nonnegative", path)
    if abs(math.fsum(arr) - 1.0) > PROB_TOL:
        raise ConfigError(f"probabilities sum to {math.fsum(arr)!r}, not 1", path)
    return arr


def _stochastic_matrix(P, path):
    arr = np.asarray(P, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ConfigError("transition matrix must be square and non-empty", path)
    for i, row in enumerate(arr):
        _prob_vector(row, f"{path}[{i}]")
    return arr


def _cdf(p):
    c = np.cumsum(p)
    c[-1] = max(c[-1], 1.0)
    return c


def is_irreducible(P) -> bool:
    """True if every state reaches every other along positive transitions."""
    adj = np.asarray(P) > 0
    s = adj.shape[0]
    reach = adj | np.eye(s, dtype=bool)
    for _ in range(max(1, int(math.ceil(math.log2(s))) + 1)):
        reach = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
    return bool(reach.all())


def binary_entropy(p: float) -> float:
    return entropy_bits([p, 1.0 - p])


def entropy_bits(p) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    arr = np.asarray(p, dtype=np.float64).ravel()
    arr = arr[arr > 0]
    return max(0.0, -math.fsum(arr * np.log2(arr)))


@dataclass(frozen=True, eq=False)
class IID:
    """Independent symbols with marginal ``p``."""

    p: np.ndarray
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", _prob_vector(self.p, "p"))
        if self.p.size < 2:
            raise ConfigError("alphabet must have at least 2 symbols", "p")

    @property
    def alphabet_size(self) -> int:
        return int(self.p.size)


@dataclass(frozen=True, eq=False)
class Markov:
    """First-order chain on the alphabet itself, started from its stationary law."""

    initial: np.ndarray
    transition: np.ndarray
    name: str | None = None

    def __post_init__(self):
        P = _stochastic_matrix(self.transition, "transition")
        pi = _prob_vector(self.initial, "initial")
        if pi.size != P.shape[0]:
            raise ConfigError(f"length {pi.size} does not match {P.shape[0]} states", "initial")
        if P.shape[0] < 2:
            raise ConfigError("alphabet must have at least 2 symbols", "transition")
        drift = np.abs(pi @ P - pi).max()
        if drift > STATIONARY_TOL:
            raise ConfigError(f"initial distribution is not stationary (|piP - pi| = {drift:.3g})", "initial")
        object.__setattr__(self, "initial", pi)
        object.__setattr__(self, "transition", P)

    @property
    def alphabet_size(self) -> int:
        return int(self.initial.size)


@dataclass(frozen=True, eq=False)
class FunctionOfMarkov:
    """Deterministic image ``output_map[state]`` of a hidden stationary chain."""

    hidden: Markov
    output_map: np.ndarray
    alphabet_size: int
    name: str | None = None

    def __post_init__(self):
        if not isinstance(self.hidden, Markov):
            raise ConfigError("hidden process must be a Markov model", "hidden")
        g = np.asarray(self.output_map)
        if g.ndim != 1 or g.size != self.hidden.alphabet_size:
            raise ConfigError(f"need one output per hidden state ({self.hidden.alphabet_size})", "output_map")
        if not np.issubdtype(g.dtype, np.integer):
            raise ConfigError("outputs must be integers", "output_map")
        if self.alphabet_size < 2:
            raise ConfigError("alphabet must have at least 2 symbols", "alphabet_size")
        if g.min() < 0 or g.max() >= self.alphabet_size:
            raise ConfigError(f"outputs must lie in 0..{self.alphabet_size - 1}", "output_map")
        object.__setattr__(self, "output_map", g.astype(np.int64))


@dataclass(frozen=True, eq=False)
class Mixture:
    """Non-ergodic source: one ergodic component per realization, chosen by ``weights``."""

    weights: np.ndarray
    components: tuple
    name: str | None = None

    def __post_init__(self):
        w = _prob_vector(self.weights, "weights")
        comps = tuple(self.components)
        if len(comps) != w.size:
            raise ConfigError(f"{w.size} weights for {len(comps)} components", "components")
        sizes = set()
        for i, c in enumerate(comps):
            path = f"components[{i}]"
            if isinstance(c, Markov):
                if not is_irreducible(c.transition):
                    raise ConfigError("mixture components must be irreducible", path)
            elif not isinstance(c, IID):
                raise ConfigError("mixture components must be IID or Markov", path)
            sizes.add(c.alphabet_size)
        if len(sizes) != 1:
            raise ConfigError(f"components disagree on alphabet size {sorted(sizes)}", "components")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    @property
    def alphabet_size(self) -> int:
        return self.components[0].alphabet_size


ProcessModel = Union[IID, Markov, FunctionOfMarkov, Mixture]


# -- convenience constructors ------------------------------------------------

def point_mass(symbol: int, alphabet_size: int = 2) -> IID:
    p = np.zeros(alphabet_size)
    p[symbol] = 1.0
    return IID(p)


def fair_coin() -> IID:
    return IID([0.5, 0.5])


def uniform(alphabet_size: int) -> IID:
    return IID(np.full(alphabet_size, 1.0 / alphabet_size))


def symmetric_markov(flip: float) -> Markov:
    """Two-state chain that changes state with probability ``flip``."""
    return Markov([0.5, 0.5], [[1 - flip, flip], [flip, 1 - flip]])


# -- sampling -----------------------------------------------------------------

def symbol_dtype(alphabet_size: int):
    if alphabet_size <= 256:
        return np.uint8
    if alphabet_size <= 65536:
        return np.uint16
    return np.int64


@dataclass(eq=False)
class Sample:
    symbols: np.ndarray
    seed: int
    model_id: str
    alphabet_size: int
    component: int | None = None

    def __len__(self):
        return int(self.symbols.size)


def trial_seed(base_seed: int, *key: int) -> int:
    """Derive an independent 64-bit seed from ``base_seed`` and a trial key.

    Platform independent: uses numpy's SeedSequence hashing.
    """
    ss = np.random.SeedSequence([int(base_seed) & (2**64 - 1), *[int(k) for k in key]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _draw(model, n, rng):
    """Return (symbols, component index or None)."""
    if isinstance(model, IID):
        u = rng.random(n)
        x = np.minimum(np.searchsorted(_cdf(model.p), u, side="right"), model.p.size - 1)
        return x.astype(symbol_dtype(model.alphabet_size)), None
    if isinstance(model, Markov):
        u = rng.random(n)
        cum_init = _cdf(model.initial)
        cum_trans = np.vstack([_cdf(row) for row in model.transition])
        x = markov_walk(u, cum_init, cum_trans)
        return x.astype(symbol_dtype(model.alphabet_size)), None
    if isinstance(model, FunctionOfMarkov):
        states, _ = _draw(model.hidden, n, rng)
        return model.output_map[states].astype(symbol_dtype(model.alphabet_size)), None
    if isinstance(model, Mixture):
        c = int(min(np.searchsorted(_cdf(model.weights), rng.random(), side="right"), model.weights.size - 1))
        x, _ = _draw(model.components[c], n, rng)
        return x, c
    raise TypeError(f"not a process model: {type(model).__name__}")


def sample(model: ProcessModel, n: int, seed: int) -> Sample:
    """Draw ``n`` symbols from ``model``; identical output for identical ``seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    x, comp = _draw(model, int(n), rng)
    return Sample(x, int(seed), model_id(model), model.alphabet_size, comp)


# -- entropy rate -------------------------------------------------------------

class RateBounds(NamedTuple):
    """Bracketing bounds for a rate without closed form."""

    lower: float
    upper: float
    exact: bool = False


def markov_entropy_rate(m: Markov) -> float:
    rows = [entropy_bits(row) for row in m.transition]
    return math.fsum(pi * h for pi, h in zip(m.initial, rows))


def entropy_rate(model: ProcessModel, *, order: int = 10):
    """Entropy rate in bits per symbol.

    Returns a float for IID, Markov and Mixture models and :class:`RateBounds`
    for a function of a Markov chain, bracketed with conditional entropies of
    the given ``order``.
    """
    if isinstance(model, IID):
        return entropy_bits(model.p)
    if isinstance(model, Markov):
        return markov_entropy_rate(model)
    if isinstance(model, Mixture):
        return math.fsum(w * entropy_rate(c) for w, c in zip(model.weights, model.components))
    if isinstance(model, FunctionOfMarkov):
        from .exact import hidden_markov_rate_bounds

        return hidden_markov_rate_bounds(model, order)
    raise TypeError(f"not a process model: {type(model).__name__}")


# -- JSON ---------------------------------------------------------------------

def to_json(model: ProcessModel) -> dict[str, Any]:
    if isinstance(model, IID):
        d = {"type": "iid", "p": model.p.tolist()}
    elif isinstance(model, Markov):
        d = {"type": "markov", "initial": model.initial.tolist(), "transition": model.transition.tolist()}
    elif isinstance(model, FunctionOfMarkov):
        d = {
            "type": "function_of_markov",
            "alphabet_size": model.alphabet_size,
            "hidden": to_json(model.hidden),
            "output_map": model.output_map.tolist(),
        }
    elif isinstance(model, Mixture):
        d = {
            "type": "mixture",
            "components": [{"weight": float(w), "model": to_json(c)} for w, c in zip(model.weights, model.components)],
        }
    else:
        raise TypeError(f"not a process model: {type(model).__name__}")
    if model.name:
        d["id"] = model.name
    return d


def _require(d, key, path):
    if not isinstance(d, dict):
        raise ConfigError("expected an object", path)
    if key not in d:
        raise ConfigError("missing required field", f"{path}.{key}")
    return d[key]


def from_json(d: dict[str, Any], path: str = "model") -> ProcessModel:
    """Build a model from its JSON form; errors carry the offending field path."""
    kind = _require(d, "type", path)
    name = d.get("id")

    def wrap(fn):
        try:
            return fn()
        except ConfigError as exc:
            raise ConfigError(exc.message, f"{path}.{exc.path}" if exc.path else path) from None

    if kind == "iid":
        p = _require(d, "p", path)
        model = wrap(lambda: IID(p, name))
    elif kind == "markov":
        P = _require(d, "transition", path)
        init = _require(d, "initial", path)
        model = wrap(lambda: Markov(init, P, name))
    elif kind == "function_of_markov":
        hidden = from_json(_require(d, "hidden", path), f"{path}.hidden")
        g = _require(d, "output_map", path)
        size = d.get("alphabet_size", int(max(g)) + 1 if g else 0)
        model = wrap(lambda: FunctionOfMarkov(hidden, np.asarray(g, dtype=np.int64), int(size), name))
    elif kind == "mixture":
        entries = _require(d, "components", path)
        if not isinstance(entries, list) or not entries:
            raise ConfigError("expected a non-empty list", f"{path}.components")
        weights, comps = [], []
        for i, e in enumerate(entries):
            sub = f"{path}.components[{i}]"
            weights.append(_require(e, "weight", sub))
            comps.append(from_json(_require(e, "model", sub), f"{sub}.model"))
        model = wrap(lambda: Mixture(weights, tuple(comps), name))
    else:
        raise ConfigError(f"unknown model type {kind!r}", f"{path}.type")
    if "alphabet_size" in d and kind != "function_of_markov" and int(d["alphabet_size"]) != model.alphabet_size:
        raise ConfigError(f"declared {d['alphabet_size']} but model has {model.alphabet_size}", f"{path}.alphabet_size")
    return model


def load_model(path) -> ProcessModel:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}", str(path)) from None
    return from_json(data)


def model_id(model: ProcessModel) -> str:
    if model.name:
        return model.name
    blob = json.dumps(to_json(model), sort_keys=True, separators=(",", ":"))
    return "m" + hashlib.sha1(blob.encode()).hexdigest()[:10]


# -- raw sample files -----------------------------------------------------------

def write_sample(path, symbols) -> None:
    """One symbol per byte; only valid for alphabets of at most 256 symbols."""
    arr = np.asarray(symbols)
    if arr.size and (arr.min() < 0 or arr.max() > 255):
        raise ValueError("raw sample files hold symbols 0..255 only")
    Path(path).write_bytes(arr.astype(np.uint8).tobytes())


def read_sample(path) -> np.ndarray:
    return np.frombuffer(Path(path).read_bytes(), dtype=np.uint8).copy()
