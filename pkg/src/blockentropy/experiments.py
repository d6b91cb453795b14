"""Monte Carlo experiments over sample-size schedules.

Every trial draws its sample from ``trial_seed(base_seed, k, trial)`` and
results are reduced in trial order, so output does not depend on ``workers``.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .codec import code_length_bound, k_block_bound, min_code_length
from .empirical import distance_to_law, empirical_distribution, plug_in_entropy
from .errors import ConfigError, ResourceError
from .exact import DEFAULT_BUDGET, exact_block_law, log_probability
from .models import RateBounds, entropy_rate, model_id, sample, trial_seed

HARD_MAX_N = 2**30
RULES = ("above", "below", "alphabet", "code_based")
ETA_GRID = (0.05, 0.1, 0.2)


def max_n_from_env(default: int = HARD_MAX_N) -> int:
    raw = os.environ.get("BLOCKENTROPY_MAX_N")
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"not an integer: {raw!r}", "BLOCKENTROPY_MAX_N") from None
    return min(value, HARD_MAX_N)


@dataclass(frozen=True)
class RegimeSchedule:
    """Sample size ``n(k)`` per block length.

    ``above``: ceil(2^{k(h+eps)}); ``below``: ceil(2^{k(h-eps)});
    ``alphabet``: ceil((|X|+eps)^k); ``code_based``: ceil(2^{E K(X_1^k) + k eps}),
    with ``E K`` averaged over ``code_trials`` samples.
    """

    k_min: int
    k_max: int
    rule: str
    epsilon: float
    code_trials: int = 64

    def __post_init__(self):
        if self.rule not in RULES:
            raise ConfigError(f"unknown rule {self.rule!r}; expected one of {RULES}", "rule")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be > 0", "epsilon")
        if not 1 <= self.k_min <= self.k_max:
            raise ConfigError("need 1 <= k_min <= k_max", "k_range")

    @property
    def ks(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def log2_n(self, k: int, h: float, alphabet_size: int, model=None, seed: int = 0) -> float:
        if self.rule == "above":
            return k * (h + self.epsilon)
        if self.rule == "below":
            if h - self.epsilon <= 0:
                raise ConfigError(f"rule 'below' needs h - epsilon > 0 (h={h:.6g})", "epsilon")
            return k * (h - self.epsilon)
        if self.rule == "alphabet":
            return k * math.log2(alphabet_size + self.epsilon)
        bits = [
            min_code_length(sample(model, k, trial_seed(seed, k, t, 1)), alphabet_size).bits
            for t in range(self.code_trials)
        ]
        return math.fsum(bits) / len(bits) + k * self.epsilon

    def n_for(self, k: int, h: float, alphabet_size: int, model=None, seed: int = 0, max_n: int = HARD_MAX_N):
        """``n(k)`` clamped below at ``k``, or ``None`` if it exceeds ``max_n``."""
        e = self.log2_n(k, h, alphabet_size, model, seed)
        if e > math.log2(max_n) + 1:
            return None
        n = max(k, math.ceil(2.0**e))
        return n if n <= max_n else None


def _rate_point(model) -> float:
    h = entropy_rate(model)
    if isinstance(h, RateBounds):
        return 0.5 * (h.lower + h.upper)
    return h


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def write_csv(path, rows, columns) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


@dataclass
class ExperimentRecord:
    experiment_id: str
    model_id: str
    k: int
    n: int
    trial: int
    trial_seed: int
    estimate_bits_per_symbol: float
    extra: dict = field(default_factory=dict)

    def to_row(self) -> dict:
        row = asdict(self)
        row.update(row.pop("extra"))
        return row


# -- regimes -------------------------------------------------------------------

def _regime_trial(job):
    model, k, n, seed = job
    x = sample(model, n, seed)
    d = empirical_distribution(x, k)
    h = plug_in_entropy(d)
    bound = k_block_bound(n, k, x.alphabet_size, h, d.distinct)
    return h, d.distinct, bound, x.component


@dataclass
class RegimeReport:
    records: list
    summary: list
    skipped: list

    RECORD_COLUMNS = (
        "experiment_id", "model_id", "k", "n", "trial", "trial_seed", "estimate_bits_per_symbol",
        "plugin_bits", "D", "K_bound", "component", "as_cap", "as_bound_ok",
    )

    @property
    def as_bound_all(self) -> bool:
        return all(r.extra["as_bound_ok"] for r in self.records)

    def summary_columns(self):
        return list(self.summary[0]) if self.summary else ["k", "n", "skipped"]


def run_regime(
    model,
    schedule: RegimeSchedule,
    trials: int = 32,
    seed: int = 0,
    *,
    workers: int = 1,
    max_n: int | None = None,
    eta_grid=ETA_GRID,
    experiment_id: str = "regimes",
    h: float | None = None,
) -> RegimeReport:
    """Plug-in rate estimates ``H(k, X_1^{n(k)})/k`` along a schedule."""
    max_n = max_n_from_env() if max_n is None else min(max_n, HARD_MAX_N)
    h = _rate_point(model) if h is None else h
    size = model.alphabet_size
    mid = model_id(model)
    points, skipped = [], []
    for k in schedule.ks:
        n = schedule.n_for(k, h, size, model, seed, max_n)
        if n is None:
            skipped.append(k)
        else:
            points.append((k, n))
    if not points:
        raise ResourceError(f"every k in {list(schedule.ks)} needs n > {max_n} symbols", budget=max_n)

    jobs = [(model, k, n, trial_seed(seed, k, t)) for k, n in points for t in range(trials)]
    results = _map(_regime_trial, jobs, workers)

    records, summary = [], []
    it = iter(zip(jobs, results))
    for k, n in points:
        est = []
        for t in range(trials):
            (_, _, _, tseed), (hk, dist, bound, comp) = next(it)
            cap = math.log2(n // k) / k
            records.append(ExperimentRecord(experiment_id, mid, k, n, t, tseed, hk / k, {
                "plugin_bits": hk, "D": dist, "K_bound": bound, "component": comp,
                "as_cap": cap, "as_bound_ok": hk / k <= cap,
            }))
            est.append(hk / k)
        est = np.array(est)
        row = {
            "k": k, "n": n, "trials": trials, "h": h,
            "mean": float(est.mean()),
            "se": float(est.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
            "min": float(est.min()), "max": float(est.max()),
        }
        for eta in eta_grid:
            row[f"frac_over_eta_{eta:g}"] = float(np.mean(est - h > eta))
        row["as_bound_all"] = all(r.extra["as_bound_ok"] for r in records[-trials:])
        summary.append(row)
    return RegimeReport(records, summary, skipped)


# -- Barron tail -----------------------------------------------------------------

def _barron_trial(job):
    model, k, n, seed = job
    x = sample(model, n, seed)
    bound = code_length_bound(x.symbols, k, x.alphabet_size).bound_bits
    return bound, log_probability(model, x)


@dataclass
class BarronReport:
    rows: list
    summary: list

    @property
    def passed(self) -> bool:
        return all(r["pass"] for r in self.summary)


def run_barron_check(model, k: int, n: int, m_grid, trials: int = 10_000, seed: int = 0, *, workers: int = 1,
                     experiment_id: str = "barron") -> BarronReport:
    """Tail frequency of ``K(k, X_1^n) + log2 P(X_1^n) <= -m`` against ``2^-m``."""
    mid = model_id(model)
    jobs = [(model, k, n, trial_seed(seed, k, t)) for t in range(trials)]
    results = _map(_barron_trial, jobs, workers)
    rows = []
    excess = []
    for t, ((_, _, _, tseed), (bound, logp)) in enumerate(zip(jobs, results)):
        e = bound + logp
        excess.append(e)
        rows.append({"experiment_id": experiment_id, "model_id": mid, "k": k, "n": n, "trial": t,
                     "trial_seed": tseed, "K_bound": bound, "log_prob": logp, "K_plus_log_prob": e})
    excess = np.array(excess)
    summary = []
    for m in m_grid:
        freq = float(np.mean(excess <= -m))
        se = math.sqrt(freq * (1 - freq) / trials)
        limit = 2.0 ** (-m)
        summary.append({"k": k, "n": n, "m": m, "trials": trials, "frequency": freq, "se": se,
                        "bound": limit, "pass": freq <= limit + 3 * se})
    return BarronReport(rows, summary)


# -- variational distance ----------------------------------------------------------

def _variational_trial(job):
    model, k, n, seed, law = job
    d = empirical_distribution(sample(model, n, seed), k)
    return distance_to_law(d, law)


@dataclass
class VariationalReport:
    rows: list
    summary: list

    def median(self, k: int) -> float:
        return next(r["median"] for r in self.summary if r["k"] == k)


def run_variational(model, schedule: RegimeSchedule, trials: int = 32, seed: int = 0, *, workers: int = 1,
                    max_n: int | None = None, budget: int = DEFAULT_BUDGET, h: float | None = None,
                    experiment_id: str = "variational") -> VariationalReport:
    """``|p_k - p_k(., X_1^{n(k)})|`` per block length along a schedule."""
    max_n = max_n_from_env() if max_n is None else min(max_n, HARD_MAX_N)
    h = _rate_point(model) if h is None else h
    mid = model_id(model)
    rows, summary = [], []
    for k in schedule.ks:
        n = schedule.n_for(k, h, model.alphabet_size, model, seed, max_n)
        if n is None:
            summary.append({"k": k, "n": None, "trials": 0, "median": None, "mean": None, "skipped": True})
            continue
        law = exact_block_law(model, k, budget).probs
        jobs = [(model, k, n, trial_seed(seed, k, t), law) for t in range(trials)]
        dists = _map(_variational_trial, jobs, workers)
        for t, (job, dv) in enumerate(zip(jobs, dists)):
            rows.append({"experiment_id": experiment_id, "model_id": mid, "k": k, "n": n, "trial": t,
                         "trial_seed": job[3], "distance": dv})
        arr = np.array(dists)
        summary.append({"k": k, "n": n, "trials": trials, "median": float(np.median(arr)),
                        "mean": float(arr.mean()), "skipped": False})
    return VariationalReport(rows, summary)


def fixed_k_distance(model, k: int, n: int, seed: int = 0, budget: int = DEFAULT_BUDGET) -> float:
    """Distance at one ``(k, n)`` point, for law-of-large-numbers checks."""
    law = exact_block_law(model, k, budget).probs
    return _variational_trial((model, k, n, trial_seed(seed, k, 0), law))
