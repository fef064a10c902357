"""Monte Carlo experiments for the skills/jobs structure and the entry game.

Data come from a cdf on [0, 1] that hugs the lower envelope ``y - s`` on its
first branch and the upper envelope ``y + s`` on its last branch, so the
band structure with the same ``s`` is consistent but binding on many sets.

Every random quantity is drawn from a stream keyed by ``(seed, n, rep)``
(data) or ``(seed, n, rep, b)`` (bootstrap resample ``b``), so tables are a
pure function of the configuration whatever the worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .empirical import Sample
from .kstest import TestConfig, default_bandwidth, run_test, scale_draws, upper_quantile
from .models import JovanovicModel, TinbergenModel
from .rng import resample_counts, stream

# Reference rejection rates, rows alpha = 0.01, 0.05, 0.10; columns n = 100, 500, 1000.
REFERENCE_PARTIAL = np.array([[0.001, 0.007, 0.008],
                              [0.010, 0.024, 0.029],
                              [0.029, 0.049, 0.066]])
REFERENCE_IDENTIFIED = np.array([[0.019, 0.024, 0.014],
                                 [0.074, 0.079, 0.050],
                                 [0.138, 0.135, 0.105]])
# (n, h) -> rates for alpha = 0.01, 0.05, 0.10
REFERENCE_TUNING = {
    (100, 0.05): (0.004, 0.026, 0.064), (100, 0.15): (0.0, 0.006, 0.020),
    (500, 0.02): (0.012, 0.049, 0.090), (500, 0.10): (0.002, 0.017, 0.034),
    (1000, 0.01): (0.019, 0.058, 0.111), (1000, 0.07): (0.005, 0.022, 0.043),
}
TUNING_SETTINGS = {100: (0.05, 0.15), 500: (0.02, 0.10), 1000: (0.01, 0.07)}


@dataclass(frozen=True)
class DgpSpec:
    """Piecewise-linear cdf on [0, 1] with band parameter ``s``."""

    s: float = 0.15

    def __post_init__(self):
        if not 0.0 <= self.s < 1.0 / 3.0:
            raise ValueError(f"s must lie in [0, 1/3), got {self.s}")

    def cdf(self, y):
        s = self.s
        y = np.asarray(y, dtype=float)
        mid = ((1 + 4 * s) * y - 3 * s) / (1 - 2 * s)
        out = np.select(
            [y < s, y < (1 + s) / 3, y < (2 - s) / 3, y < 1 - s],
            [0.0, y - s, mid, y + s],
            default=1.0,
        )
        return np.clip(out, 0.0, 1.0)

    def inverse_cdf(self, u):
        s = self.s
        u = np.asarray(u, dtype=float)
        if np.any((u < 0) | (u > 1)):
            raise ValueError("u must lie in [0, 1]")
        lo, hi = (1 - 2 * s) / 3, (2 + 2 * s) / 3
        return np.where(u < lo, u + s,
                        np.where(u < hi, (u * (1 - 2 * s) + 3 * s) / (1 + 4 * s), u - s))

    def sample(self, n: int, seed: int, path: tuple) -> np.ndarray:
        return self.inverse_cdf(stream(seed, *path).random(n))


def dgp_inverse_cdf(spec: DgpSpec, u):
    return spec.inverse_cdf(u)


@dataclass(frozen=True)
class McConfig:
    reps: int = 1000
    sample_sizes: tuple = (100, 500, 1000)
    alphas: tuple = (0.01, 0.05, 0.10)
    B: int = 1000
    bandwidth: float | str = "auto"
    seed: int = 777
    threads: int = 1
    # "closed": upper sets [Y_i, 1]; "open": (Y_i, 1], as in the generic class
    upper_sets: str = "closed"

    def __post_init__(self):
        if self.reps < 1 or self.B < 1:
            raise ValueError("reps and B must be >= 1")
        if not all(0 < a < 1 for a in self.alphas):
            raise ValueError("alphas must lie in (0, 1)")
        if self.upper_sets not in ("closed", "open"):
            raise ValueError("upper_sets must be 'closed' or 'open'")

    def bandwidth_for(self, n: int) -> float:
        return default_bandwidth(n) if self.bandwidth == "auto" else float(self.bandwidth)


def halfline_test(y, s_model: float, hs, alphas, B: int, seed: int, path: tuple = (),
                  closed: bool = True, return_draws: bool = False):
    """Band-structure test on the half-line class, for several bandwidths.

    Sets are ``[0, Y_i]`` and ``[Y_i, 1]`` (``(Y_i, 1]`` when ``closed`` is
    False) plus the empty set and the full space.  Returns the statistic and
    a ``(len(hs), len(alphas))`` array of critical values (and the draws,
    shape ``(len(hs), B)``, on request).  Resamples come from the same
    streams as :func:`partial_id.kstest.run_test` with ``path``, so with
    ``closed=False`` the output matches the generic pipeline exactly.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    order = np.argsort(y, kind="stable")
    ys = y[order]
    right = np.searchsorted(ys, ys, side="right")
    left = np.searchsorted(ys, ys, side="left")
    k_lo = right
    k_up = n - left if closed else n - right
    model = TinbergenModel(s_model)
    d_lo = k_lo / n - model.lower(ys)
    d_up = k_up / n - model.upper(ys)
    defic = np.concatenate([d_lo, d_up])
    stat = float(np.sqrt(n) * max(0.0, float(defic.max())))

    # only sets passing the widest filter matter; order them by deficiency
    by_defic = np.argsort(-defic, kind="stable")
    sorted_defic = defic[by_defic]
    cand = by_defic[:int(np.count_nonzero(sorted_defic >= -max(hs)))]
    is_lo = cand < n
    pos = np.where(is_lo, cand, cand - n)

    cum = np.cumsum(resample_counts(n, seed, path, range(B))[:, order], axis=1, dtype=np.int64)
    excess = np.empty((B, cand.size), dtype=np.int64)
    excess[:, is_lo] = cum[:, right[pos[is_lo]] - 1] - k_lo[pos[is_lo]]
    up = pos[~is_lo]
    if closed:
        before = np.where(left[up] > 0, cum[:, np.maximum(left[up] - 1, 0)], 0)
    else:
        before = cum[:, right[up] - 1]
    excess[:, ~is_lo] = (n - before) - k_up[up]
    running = np.maximum.accumulate(excess, axis=1)
    crit = np.empty((len(hs), len(alphas)))
    draws = np.empty((len(hs), B))
    for i, h in enumerate(hs):
        kept = int(np.count_nonzero(sorted_defic >= -h))
        top = np.maximum(running[:, kept - 1], 0) if kept else np.zeros(B, np.int64)
        draws[i] = scale_draws(top, n)
        crit[i] = [upper_quantile(draws[i], a) for a in alphas]
    if return_draws:
        return stat, crit, draws
    return stat, crit


def _band_rep(args):
    dgp_s, s_model, n, hs, alphas, B, seed, rep, closed = args
    y = DgpSpec(dgp_s).sample(n, seed, (n, rep))
    stat, crit = halfline_test(y, s_model, hs, alphas, B, seed, (n, rep), closed)
    return stat > crit


def _map(fn, jobs, threads: int):
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    return [fn(j) for j in jobs]


def rejection_rates(cfg: McConfig, dgp: DgpSpec, n: int, hs, s_model: float | None = None,
                    per_rep: bool = False):
    """Rejection frequency, shape ``(len(hs), len(cfg.alphas))``.

    With ``per_rep`` the boolean decisions ``(reps, len(hs), len(alphas))``
    are returned instead.
    """
    s_model = dgp.s if s_model is None else s_model
    jobs = [(dgp.s, s_model, n, tuple(hs), tuple(cfg.alphas), cfg.B, cfg.seed, rep,
             cfg.upper_sets == "closed") for rep in range(cfg.reps)]
    decisions = np.array(_map(_band_rep, jobs, cfg.threads))
    return decisions if per_rep else decisions.mean(axis=0)


@dataclass
class RejectionTable:
    alphas: tuple
    sample_sizes: tuple
    rates: np.ndarray  # (alphas, sample_sizes)
    bandwidths: tuple = ()

    def to_rows(self) -> list[list]:
        header = ["alpha"] + [str(n) for n in self.sample_sizes]
        return [header] + [[repr(float(a))] + [repr(float(v)) for v in row]
                           for a, row in zip(self.alphas, self.rates)]


def run_rejection_table(cfg: McConfig, spec: DgpSpec, s_model: float | None = None) -> RejectionTable:
    """Rejection rates by (alpha, n); bandwidth per ``cfg.bandwidth``."""
    cols, hs = [], []
    for n in cfg.sample_sizes:
        h = cfg.bandwidth_for(n)
        hs.append(h)
        cols.append(rejection_rates(cfg, spec, n, [h], s_model)[0])
    return RejectionTable(tuple(cfg.alphas), tuple(cfg.sample_sizes), np.array(cols).T, tuple(hs))


@dataclass
class TuningTable:
    alphas: tuple
    settings: tuple  # ((n, h), ...)
    rates: np.ndarray  # (alphas, settings)

    def to_rows(self) -> list[list]:
        header = ["alpha"] + [f"n={n} h={h:g}" for n, h in self.settings]
        return [header] + [[repr(float(a))] + [repr(float(v)) for v in row]
                           for a, row in zip(self.alphas, self.rates)]


def run_tuning_table(cfg: McConfig, spec: DgpSpec, settings=None) -> TuningTable:
    settings = TUNING_SETTINGS if settings is None else settings
    pairs, cols = [], []
    for n, hs in settings.items():
        rates = rejection_rates(cfg, spec, n, hs)
        for h, r in zip(hs, rates):
            pairs.append((n, h))
            cols.append(r)
    return TuningTable(tuple(cfg.alphas), tuple(pairs), np.array(cols).T)


@dataclass
class SensitivityCurve:
    n: int
    alpha: float
    h_values: np.ndarray
    rates: np.ndarray
    per_rep: np.ndarray | None = field(default=None, repr=False)

    def to_rows(self) -> list[list]:
        return [["h", "rejection_rate"]] + [[repr(float(h)), repr(float(r))]
                                            for h, r in zip(self.h_values, self.rates)]


def run_sensitivity(cfg: McConfig, spec: DgpSpec, h_values, n: int = 500,
                    alpha: float = 0.05) -> SensitivityCurve:
    """Rejection rate against bandwidth with all replications shared across h."""
    h_values = np.asarray(h_values, dtype=float)
    if np.any(h_values <= 0):
        raise ValueError("bandwidths must be positive")
    one = replace(cfg, alphas=(alpha,))
    dec = rejection_rates(one, spec, n, h_values, per_rep=True)[:, :, 0]
    return SensitivityCurve(n, alpha, h_values, dec.mean(axis=0), dec)


def run_power(cfg: McConfig, misspec: DgpSpec, s_model: float) -> RejectionTable:
    """Rejection rates when the model band ``s_model`` is narrower than the data's."""
    if not s_model < misspec.s:
        raise ValueError("power runs need s_model < data band")
    return run_rejection_table(cfg, misspec, s_model)


def _coverage_rep(args):
    p, n, thetas, alphas, B, bandwidth, seed, rep = args
    hits = (stream(seed, n, rep).random(n) < p).astype(np.int64)
    sample = Sample.from_arrays(discrete=hits)
    counts = resample_counts(n, seed, (n, rep), range(B))
    cfg = TestConfig(alpha=alphas[0], B=B, bandwidth=bandwidth, seed=seed, keep_draws=True)
    out = np.empty((len(thetas), len(alphas)), dtype=bool)
    for i, th in enumerate(thetas):
        res = run_test(sample, JovanovicModel(th), cfg, path=(n, rep), counts=counts)
        out[i] = [res.statistic <= upper_quantile(res.bootstrap_draws, a) for a in alphas]
    return out


@dataclass
class CoverageResult:
    p: float
    n: int
    thetas: tuple
    alphas: tuple
    coverage: np.ndarray  # (thetas, alphas)

    def to_rows(self) -> list[list]:
        header = ["theta"] + [f"alpha={a:g}" for a in self.alphas]
        return [header] + [[repr(float(t))] + [repr(float(v)) for v in row]
                           for t, row in zip(self.thetas, self.coverage)]


def run_coverage(cfg: McConfig, p: float = 0.25, thetas=None, n: int = 1000) -> CoverageResult:
    """Share of replications whose confidence region contains each theta."""
    if thetas is None:
        thetas = (np.sqrt(p), 0.75, 1.0)
    jobs = [(p, n, tuple(thetas), tuple(cfg.alphas), cfg.B, cfg.bandwidth, cfg.seed, rep)
            for rep in range(cfg.reps)]
    cover = np.array(_map(_coverage_rep, jobs, cfg.threads)).mean(axis=0)
    return CoverageResult(p, n, tuple(float(t) for t in thetas), tuple(cfg.alphas), cover)
