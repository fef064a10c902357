"""Generalized Kolmogorov-Smirnov test of internal consistency.

The statistic is ``sqrt(n) * max_A [P_n(A) - nu(Gamma(A))]`` over the
data-driven class.  Its critical value is the bootstrap quantile of
``sqrt(n) * max_A [P*(A) - P_n(A)]`` taken over the sets whose deficiency is
within a bandwidth ``h`` of zero.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .empirical import RectSet, Sample, generate_class, membership_matrix
from .models import StructureModel
from .rng import resample_counts

CHUNK = 250


@dataclass(frozen=True)
class TestConfig:
    __test__ = False

    alpha: float = 0.05
    B: int = 1000
    bandwidth: float | str = "auto"
    seed: int = 0
    threads: int = 1
    keep_draws: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if int(self.B) != self.B or self.B < 1:
            raise ValueError(f"B must be a positive integer, got {self.B}")
        if self.bandwidth != "auto":
            h = float(self.bandwidth)
            if not h > 0.0:
                raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
            object.__setattr__(self, "bandwidth", h)
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit non-negative integer")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def resolve_bandwidth(self, n: int) -> float:
        return default_bandwidth(n) if self.bandwidth == "auto" else float(self.bandwidth)


@dataclass
class TestResult:
    __test__ = False

    statistic: float
    bandwidth_used: float
    class_size: int
    filtered_size: int
    critical_value: float
    reject: bool
    bootstrap_draws: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self, draws: bool = False) -> dict:
        out = {
            "statistic": self.statistic,
            "bandwidth_used": self.bandwidth_used,
            "class_size": self.class_size,
            "filtered_size": self.filtered_size,
            "critical_value": self.critical_value,
            "reject": self.reject,
        }
        if draws and self.bootstrap_draws is not None:
            out["bootstrap_draws"] = [float(v) for v in self.bootstrap_draws]
        return out


def default_bandwidth(n: int) -> float:
    """``sqrt(ln ln n / n)``, the fastest-shrinking admissible rate."""
    if n < 3:
        raise ValueError(f"default bandwidth needs n >= 3, got {n}")
    return math.sqrt(math.log(math.log(n)) / n)


def critical_rank(B: int, alpha: float) -> int:
    """1-based rank of the critical value among ascending bootstrap draws."""
    return max(1, math.ceil(round(B * (1.0 - alpha), 9)))


def upper_quantile(draws: np.ndarray, alpha: float) -> float:
    k = critical_rank(len(draws), alpha)
    return float(np.partition(np.asarray(draws), k - 1)[k - 1])


def scale_draws(max_count_diff, n: int):
    """Bootstrap statistic from the largest resampled-count excess."""
    return np.sqrt(n) * (np.asarray(max_count_diff, dtype=float) / n)


def deficiencies(sample: Sample, model: StructureModel, cls: Sequence[RectSet],
                 membership: np.ndarray | None = None) -> np.ndarray:
    """``P_n(A) - nu(Gamma(A))`` for each set of ``cls``."""
    if membership is None:
        membership = membership_matrix(sample, cls)
    pn = membership.sum(axis=1) / sample.n
    return pn - model.nu_gamma_many(cls)


def _require_empty(cls: Sequence[RectSet]) -> None:
    if not cls:
        raise ValueError("set class is empty")
    if not any(a.is_empty() for a in cls):
        raise ValueError("set class must contain the empty set")


def statistic(sample: Sample, model: StructureModel, cls: Sequence[RectSet]) -> float:
    _require_empty(cls)
    return float(np.sqrt(sample.n) * np.max(deficiencies(sample, model, cls)))


def filter_class(sample: Sample, model: StructureModel, cls: Sequence[RectSet],
                 h: float) -> list[RectSet]:
    """Sets whose deficiency is at least ``-h``."""
    if not h > 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    keep = deficiencies(sample, model, cls) >= -h
    return [a for a, k in zip(cls, keep) if k]


def bootstrap_draws(membership: np.ndarray, B: int, seed: int, path: tuple = (),
                    threads: int = 1, counts: np.ndarray | None = None) -> np.ndarray:
    """``sqrt(n) max_A [P*(A) - P_n(A)]`` for resamples ``b = 0..B-1``.

    ``membership`` is the ``(sets, n)`` indicator matrix of the filtered
    class.  Pass ``counts`` (shape ``(B, n)``) to reuse resamples drawn by
    :func:`partial_id.rng.resample_counts` with the same seed and path.
    """
    n = membership.shape[1]
    weights = membership.astype(np.float64)
    base = membership.sum(axis=1).astype(np.float64)

    def chunk(lo: int) -> np.ndarray:
        hi = min(B, lo + CHUNK)
        c = counts[lo:hi] if counts is not None else resample_counts(n, seed, path, range(lo, hi))
        excess = c.astype(np.float64) @ weights.T - base
        return excess.max(axis=1)

    starts = range(0, B, CHUNK)
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(chunk, starts))
    else:
        parts = [chunk(lo) for lo in starts]
    return scale_draws(np.concatenate(parts), n)


def bootstrap_critical_value(sample: Sample, filtered: Sequence[RectSet], cfg: TestConfig,
                             path: tuple = (), counts: np.ndarray | None = None):
    """Return ``(c_star, draws)`` from ``cfg.B`` seeded resamples."""
    _require_empty(filtered)
    draws = bootstrap_draws(membership_matrix(sample, filtered), cfg.B, cfg.seed, path,
                            cfg.threads, counts)
    return upper_quantile(draws, cfg.alpha), draws


def run_test(sample: Sample, model: StructureModel, cfg: TestConfig,
             cls: Sequence[RectSet] | None = None, path: tuple = (),
             counts: np.ndarray | None = None) -> TestResult:
    """Full procedure: class, statistic, filter, bootstrap, decision."""
    model.check_sample(sample)
    if cls is None:
        cls = generate_class(sample)
    _require_empty(cls)
    member = membership_matrix(sample, cls)
    defic = deficiencies(sample, model, cls, member)
    stat = float(np.sqrt(sample.n) * np.max(defic))
    h = cfg.resolve_bandwidth(sample.n)
    keep = defic >= -h
    draws = bootstrap_draws(member[keep], cfg.B, cfg.seed, path, cfg.threads, counts)
    c_star = upper_quantile(draws, cfg.alpha)
    return TestResult(
        statistic=stat,
        bandwidth_used=h,
        class_size=len(cls),
        filtered_size=int(keep.sum()),
        critical_value=c_star,
        reject=stat > c_star,
        bootstrap_draws=draws if cfg.keep_draws else None,
    )
