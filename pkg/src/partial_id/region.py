"""Confidence regions by inverting the consistency test over a grid."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .empirical import Sample, generate_class
from .kstest import TestConfig, run_test
from .models import StructureModel
from .rng import resample_counts


@dataclass(frozen=True)
class GridSpec:
    """Per-parameter ``(lo, hi, steps)``; the grid is their Cartesian product."""

    axes: tuple[tuple[float, float, int], ...]

    def __post_init__(self):
        if not self.axes:
            raise ValueError("grid needs at least one axis")
        for lo, hi, steps in self.axes:
            if not lo < hi:
                raise ValueError(f"grid axis needs lo < hi, got {lo}:{hi}")
            if int(steps) != steps or steps < 2:
                raise ValueError(f"grid axis needs steps >= 2, got {steps}")

    @classmethod
    def parse(cls, specs: Sequence[str]) -> "GridSpec":
        axes = []
        for spec in specs:
            try:
                lo, hi, steps = spec.split(":")
                axes.append((float(lo), float(hi), int(steps)))
            except ValueError:
                raise ValueError(f"grid axis must be lo:hi:steps, got {spec!r}") from None
        return cls(tuple(axes))

    def values(self) -> list[np.ndarray]:
        return [np.linspace(lo, hi, steps) for lo, hi, steps in self.axes]

    def points(self) -> list[tuple[float, ...]]:
        return [tuple(float(v) for v in p) for p in itertools.product(*self.values())]


@dataclass(frozen=True)
class RegionRow:
    theta: tuple[float, ...]
    statistic: float
    critical_value: float
    in_region: bool


@dataclass
class RegionResult:
    rows: list[RegionRow]
    grid: GridSpec | None = None

    @property
    def included(self) -> list[tuple[float, ...]]:
        return [r.theta for r in self.rows if r.in_region]

    def summary(self) -> dict:
        """Per-parameter min/max of included values."""
        inc = np.array(self.included)
        if inc.size == 0:
            return {}
        return {i: (float(inc[:, i].min()), float(inc[:, i].max())) for i in range(inc.shape[1])}


class RegionError(RuntimeError):
    def __init__(self, theta, cause):
        super().__init__(f"evaluation failed at theta={theta}: {cause}")
        self.theta = theta


def confidence_region(sample: Sample, family: Callable[[tuple], StructureModel],
                      grid: GridSpec, cfg: TestConfig) -> RegionResult:
    """Keep every grid point whose structure the test does not reject.

    All grid points share the sample, the set class and the same bootstrap
    resamples (one master seed), so the region is free of point-to-point
    Monte Carlo jitter.
    """
    points = grid.points()
    models = []
    for theta in points:
        try:
            m = family(theta)
            m.check_sample(sample)
        except Exception as exc:
            raise RegionError(theta, exc) from exc
        models.append(m)
    cls = generate_class(sample)
    counts = resample_counts(sample.n, cfg.seed, (), range(cfg.B))
    inner = TestConfig(cfg.alpha, cfg.B, cfg.bandwidth, cfg.seed, 1, False)

    def one(k: int) -> RegionRow:
        try:
            res = run_test(sample, models[k], inner, cls=cls, counts=counts)
        except Exception as exc:
            raise RegionError(points[k], exc) from exc
        return RegionRow(points[k], res.statistic, res.critical_value, not res.reject)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(one, range(len(points))))
    else:
        rows = [one(k) for k in range(len(points))]
    return RegionResult(rows, grid)


@dataclass
class AxisSummary:
    values: list[float]
    lo: float | None
    hi: float | None
    contiguous: bool


@dataclass
class RegionSummary:
    axes: list[AxisSummary] = field(default_factory=list)
    empty: bool = False
    message: str = ""


def region_summary(r: RegionResult) -> RegionSummary:
    """Included values per parameter, with a flag for gaps in the grid order."""
    if not r.rows:
        raise ValueError("region has no rows")
    dim = len(r.rows[0].theta)
    included = r.included
    if not included:
        return RegionSummary([AxisSummary([], None, None, False) for _ in range(dim)], True,
                             "model rejected at level alpha for every grid point")
    axes = []
    for i in range(dim):
        grid_vals = sorted({row.theta[i] for row in r.rows})
        inc_vals = sorted({t[i] for t in included})
        pos = [grid_vals.index(v) for v in inc_vals]
        contiguous = pos[-1] - pos[0] + 1 == len(pos)
        axes.append(AxisSummary(inc_vals, inc_vals[0], inc_vals[-1], contiguous))
    msg = "contiguous" if all(a.contiguous for a in axes) else "non-contiguous"
    return RegionSummary(axes, False, msg)
