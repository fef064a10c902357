"""Structures ``A -> nu(Gamma(A))`` evaluated on lower-rectangle sets.

A structure only has to report the latent-law mass of the image of a set
under the correspondence; that composite is all the consistency test uses.
"""

from __future__ import annotations

import csv
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Sequence

import numpy as np

from .empirical import RectSet, parse_label


class ModelSpaceError(ValueError):
    """A set does not live in the observation space a model is defined on."""


class StructureModel(ABC):
    """Evaluator of ``nu_theta(Gamma_theta(A))`` for a fixed parameter."""

    name: str = "structure"
    d_discrete: int = 0
    d_continuous: int = 0
    # (lo, hi, lo_closed, hi_closed) per parameter component
    theta_domain: tuple = ()

    @property
    @abstractmethod
    def theta(self) -> tuple[float, ...]: ...

    @abstractmethod
    def nu_gamma(self, a: RectSet) -> float: ...

    def nu_gamma_many(self, cls: Sequence[RectSet]) -> np.ndarray:
        return np.array([self.nu_gamma(a) for a in cls], dtype=float)

    def check_sample(self, sample) -> None:
        if (sample.d_discrete, sample.d_continuous) != (self.d_discrete, self.d_continuous):
            raise ModelSpaceError(
                f"{self.name} expects (d_D, d_C)=({self.d_discrete}, {self.d_continuous}), "
                f"sample has ({sample.d_discrete}, {sample.d_continuous})")

    def describe(self) -> dict:
        return {"name": self.name, "theta": list(self.theta)}


def _in_domain(value: float, lo: float, hi: float, lo_closed: bool, hi_closed: bool) -> bool:
    above = value >= lo if lo_closed else value > lo
    below = value <= hi if hi_closed else value < hi
    return above and below


class JovanovicModel(StructureModel):
    """Two-firm entry game with perfectly correlated actions.

    Costs are uniform on the unit square; joint entry (code 1) requires both
    costs below ``theta`` so ``nu(Gamma({1})) = theta**2`` while code 0 is
    compatible with every cost pair.
    """

    name = "jovanovic"
    d_discrete = 1
    d_continuous = 0
    theta_domain = ((0.0, 1.0, False, True),)
    codes = frozenset({(0,), (1,)})

    def __init__(self, theta: float):
        theta = float(theta)
        if not _in_domain(theta, *self.theta_domain[0]):
            raise ValueError(f"jovanovic theta must lie in (0, 1], got {theta}")
        self._theta = theta

    @property
    def theta(self):
        return (self._theta,)

    def nu_gamma(self, a: RectSet) -> float:
        if a.d_continuous != 0:
            raise ModelSpaceError("jovanovic structure has no continuous coordinates")
        if not a.discrete_part <= self.codes:
            raise ModelSpaceError(f"codes {sorted(a.discrete_part - self.codes)} outside {{0, 1}}")
        part = self.codes - a.discrete_part if a.complemented else a.discrete_part
        if (0,) in part:
            return 1.0
        if (1,) in part:
            return self._theta ** 2
        return 0.0


class TinbergenModel(StructureModel):
    """Jobs on [0, 1] needing skills in ``[max(0, y - s), min(1, y + s)]``.

    Skills are uniform on [0, 1], so lower half-lines map to
    ``min(1, y + s)`` and their complements to ``min(1, 1 - y + s)``.
    """

    name = "tinbergen"
    d_discrete = 0
    d_continuous = 1
    theta_domain = ((0.0, 1.0, True, False),)

    def __init__(self, s: float):
        s = float(s)
        if not _in_domain(s, *self.theta_domain[0]):
            raise ValueError(f"tinbergen band s must lie in [0, 1), got {s}")
        self.s = s

    @property
    def theta(self):
        return (self.s,)

    def lower(self, y):
        """nu(Gamma((-inf, y])) for y in [0, 1]; vectorised."""
        return np.minimum(1.0, y + self.s)

    def upper(self, y):
        """nu(Gamma([y, 1])) (equivalently of (y, 1]) for y in [0, 1]; vectorised."""
        return np.minimum(1.0, 1.0 - y + self.s)

    def nu_gamma(self, a: RectSet) -> float:
        if a.d_continuous != 1:
            raise ModelSpaceError("tinbergen structure has exactly one continuous coordinate")
        if a.discrete_part and a.discrete_part != {()}:
            raise ModelSpaceError("tinbergen structure has no discrete coordinates")
        if a.base_is_empty():
            return 1.0 if a.complemented else 0.0
        y = float(a.continuous_upper[0])
        if not a.complemented:
            if y < 0.0:
                return 0.0
            return min(1.0, y + self.s) if y <= 1.0 else 1.0
        if y < 0.0:
            return 1.0
        return min(1.0, 1.0 - y + self.s) if y <= 1.0 else 0.0

    def bounds(self, y: float) -> tuple[float, float]:
        return tinbergen_consistency_bounds(self, y)


class TabulatedModel(StructureModel):
    """Finite structure given by an explicit table ``label -> nu(Gamma(A))``.

    Every set the test touches must be tabulated; the table is checked for
    ``nu(empty) = 0``, values in [0, 1] and monotonicity under inclusion.
    """

    name = "tabulated"

    def __init__(self, values: dict[str, float], d_discrete: int, d_continuous: int = 0,
                 source: str | None = None):
        self.d_discrete = d_discrete
        self.d_continuous = d_continuous
        self.source = source
        self._values: dict[RectSet, float] = {}
        for lab, v in values.items():
            a = parse_label(lab, d_discrete, d_continuous)
            v = float(v)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"value for {lab!r} outside [0, 1]: {v}")
            if a.is_empty() and v != 0.0:
                raise ValueError(f"the empty set must map to 0, got {v} for {lab!r}")
            self._values[a] = v
        items = list(self._values.items())
        for a, va in items:
            for b, vb in items:
                if a is not b and va > vb and a.subset_of(b):
                    raise ValueError(
                        f"table not monotone: {a.label()} <= {b.label()} but {va} > {vb}")

    @classmethod
    def from_csv(cls, path, d_discrete: int = 1, d_continuous: int = 0) -> "TabulatedModel":
        """Rows ``set,nu_gamma`` keyed by :meth:`RectSet.label`."""
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"set", "nu_gamma"} <= set(reader.fieldnames):
                raise ValueError(f"{path}: expected columns 'set' and 'nu_gamma'")
            values = {row["set"]: float(row["nu_gamma"]) for row in reader}
        return cls(values, d_discrete, d_continuous, source=str(path))

    @property
    def theta(self):
        return ()

    def nu_gamma(self, a: RectSet) -> float:
        if a.is_empty():
            return 0.0
        try:
            return self._values[a]
        except KeyError:
            raise ModelSpaceError(f"no tabulated value for set {a.label()}") from None

    def describe(self) -> dict:
        return {"name": self.name, "theta": [], "source": self.source}


def nu_gamma_eval(model: StructureModel, a: RectSet) -> float:
    return model.nu_gamma(a)


def jovanovic_identified_set(p: float) -> tuple[float, float]:
    """Parameters consistent with entry frequency ``p``: ``[sqrt(p), 1]``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return (math.sqrt(p), 1.0)


def tinbergen_consistency_bounds(model: TinbergenModel, y: float) -> tuple[float, float]:
    """Envelope ``(max(0, y - s), min(1, y + s))`` a consistent cdf must obey at ``y``."""
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"y must lie in [0, 1], got {y}")
    return (max(0.0, y - model.s), min(1.0, y + model.s))


def jovanovic_family(theta) -> JovanovicModel:
    return JovanovicModel(theta[0])


def tinbergen_family(theta) -> TinbergenModel:
    return TinbergenModel(theta[0])


FAMILIES = {"jovanovic": jovanovic_family, "tinbergen": tinbergen_family}
