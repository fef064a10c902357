"""Samples, lower-rectangle set classes and empirical measures.

An observation is split into a discrete code vector and a continuous vector.
Sets are products ``A_D x (-inf, c]`` of a subset of the observed discrete
support with a closed lower orthant, or complements of such products.
"""

from __future__ import annotations

import ast
import csv
import itertools
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MAX_SUPPORT = 20

Code = tuple[int, ...]


class IngestError(ValueError):
    """Raised when a data file cannot be turned into a :class:`Sample`."""


@dataclass(frozen=True)
class Observation:
    discrete: Code
    continuous: tuple[float, ...]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Sample:
    """An ordered sample of ``n`` observations with homogeneous dimensions.

    ``discrete`` has shape ``(n, d_D)`` and ``continuous`` has shape
    ``(n, d_C)``.  ``codebook[j]`` holds the original labels of discrete
    column ``j`` when it was dictionary-encoded, and ``None`` otherwise.
    """

    discrete: np.ndarray
    continuous: np.ndarray
    codebook: tuple = ()
    support: tuple[Code, ...] = field(init=False, repr=False)
    support_index: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        disc = np.array(self.discrete, dtype=np.int64, copy=True)
        cont = np.array(self.continuous, dtype=np.float64, copy=True)
        if disc.ndim != 2 or cont.ndim != 2:
            raise ValueError("discrete and continuous parts must be 2-d arrays")
        if disc.shape[0] != cont.shape[0]:
            raise ValueError("discrete and continuous parts differ in length")
        if disc.shape[0] < 1:
            raise ValueError("a sample needs at least one observation")
        if disc.shape[1] + cont.shape[1] < 1:
            raise ValueError("observations need at least one coordinate")
        if not np.all(np.isfinite(cont)):
            raise ValueError("continuous coordinates must be finite")
        if not self.codebook:
            object.__setattr__(self, "codebook", (None,) * disc.shape[1])
        if disc.shape[1]:
            uniq, inv = np.unique(disc, axis=0, return_inverse=True)
            support = tuple(tuple(int(v) for v in row) for row in uniq)
        else:
            support = ((),)
            inv = np.zeros(disc.shape[0], dtype=np.int64)
        object.__setattr__(self, "discrete", _readonly(disc))
        object.__setattr__(self, "continuous", _readonly(cont))
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "support_index", _readonly(np.asarray(inv, dtype=np.int64).ravel()))

    @classmethod
    def from_arrays(cls, discrete=None, continuous=None) -> "Sample":
        """Build a sample; either part may be omitted (zero columns)."""
        if discrete is None and continuous is None:
            raise ValueError("need at least one of discrete / continuous")
        n = len(discrete if discrete is not None else continuous)
        disc = np.zeros((n, 0), np.int64) if discrete is None else np.asarray(discrete)
        cont = np.zeros((n, 0)) if continuous is None else np.asarray(continuous, dtype=float)
        if disc.ndim == 1:
            disc = disc[:, None]
        if cont.ndim == 1:
            cont = cont[:, None]
        return cls(disc, cont)

    @classmethod
    def from_observations(cls, observations: Sequence[Observation]) -> "Sample":
        if not observations:
            raise ValueError("a sample needs at least one observation")
        dims = {(len(o.discrete), len(o.continuous)) for o in observations}
        if len(dims) != 1:
            raise ValueError("observations have inhomogeneous dimensions")
        d_d, d_c = dims.pop()
        disc = np.array([o.discrete for o in observations], dtype=np.int64).reshape(-1, d_d)
        cont = np.array([o.continuous for o in observations], dtype=float).reshape(-1, d_c)
        return cls(disc, cont)

    @property
    def n(self) -> int:
        return self.discrete.shape[0]

    @property
    def d_discrete(self) -> int:
        return self.discrete.shape[1]

    @property
    def d_continuous(self) -> int:
        return self.continuous.shape[1]

    def observation(self, i: int) -> Observation:
        return Observation(
            tuple(int(v) for v in self.discrete[i]),
            tuple(float(v) for v in self.continuous[i]),
        )

    def __len__(self) -> int:
        return self.n

    def take(self, idx) -> "Sample":
        """Sub-sample (or re-ordering) by observation indices."""
        idx = np.asarray(idx)
        return Sample(self.discrete[idx], self.continuous[idx], self.codebook)


@dataclass(frozen=True)
class RectSet:
    """``discrete_part x (-inf, continuous_upper]``, or its complement.

    A ``-inf`` coordinate in ``continuous_upper`` or an empty
    ``discrete_part`` makes the base set empty.  With no discrete columns
    the only code is ``()``.
    """

    discrete_part: frozenset
    continuous_upper: tuple[float, ...]
    complemented: bool = False

    @classmethod
    def empty(cls, d_continuous: int) -> "RectSet":
        return cls(frozenset(), (math.inf,) * d_continuous, False)

    @classmethod
    def full(cls, support: Iterable[Code], d_continuous: int) -> "RectSet":
        return cls(frozenset(support), (math.inf,) * d_continuous, False)

    @property
    def d_continuous(self) -> int:
        return len(self.continuous_upper)

    def base_is_empty(self) -> bool:
        return not self.discrete_part or any(c == -math.inf for c in self.continuous_upper)

    def is_empty(self) -> bool:
        return self.canonical_empty_or_full() == "empty"

    def canonical_empty_or_full(self) -> str | None:
        if self.base_is_empty():
            return "full" if self.complemented else "empty"
        return None

    def complement(self) -> "RectSet":
        return RectSet(self.discrete_part, self.continuous_upper, not self.complemented)

    def canonical(self, support: Iterable[Code]) -> "RectSet":
        """Normal form relative to the discrete ``support``.

        Empty and full sets get a unique representation, and complements of
        sets with no continuous restriction become plain discrete subsets.
        """
        support = frozenset(support)
        d_c = self.d_continuous
        if self.base_is_empty():
            return RectSet.full(support, d_c) if self.complemented else RectSet.empty(d_c)
        disc = self.discrete_part & support
        if all(c == math.inf for c in self.continuous_upper):
            if self.complemented:
                disc = support - disc
            return RectSet(disc, (math.inf,) * d_c, False) if disc else RectSet.empty(d_c)
        if not disc:
            return RectSet.full(support, d_c) if self.complemented else RectSet.empty(d_c)
        return RectSet(disc, tuple(float(c) for c in self.continuous_upper), self.complemented)

    def indicator(self, sample: Sample) -> np.ndarray:
        """Boolean membership vector over the observations of ``sample``."""
        _check_dims(sample, self)
        if self.base_is_empty():
            inside = np.zeros(sample.n, dtype=bool)
        else:
            in_disc = np.fromiter((code in self.discrete_part for code in sample.support),
                                  dtype=bool, count=len(sample.support))
            inside = in_disc[sample.support_index]
            if self.d_continuous:
                upper = np.asarray(self.continuous_upper)
                inside &= np.all(sample.continuous <= upper, axis=1)
        return ~inside if self.complemented else inside

    def subset_of(self, other: "RectSet") -> bool:
        """Sufficient test for ``self <= other`` by coordinate comparison.

        Exact for pairs of uncomplemented or pairs of complemented sets;
        conservative (may answer False) for mixed pairs.
        """
        if self.canonical_empty_or_full() == "empty":
            return True
        if other.canonical_empty_or_full() == "full":
            return True
        if other.canonical_empty_or_full() == "empty" or self.canonical_empty_or_full() == "full":
            return False
        le = all(a <= b for a, b in zip(self.continuous_upper, other.continuous_upper))
        ge = all(a >= b for a, b in zip(self.continuous_upper, other.continuous_upper))
        if not self.complemented and not other.complemented:
            return self.discrete_part <= other.discrete_part and le
        if self.complemented and other.complemented:
            return other.discrete_part <= self.discrete_part and ge
        if not self.complemented and other.complemented:
            return not (self.discrete_part & other.discrete_part)
        return False

    def label(self) -> str:
        """Deterministic text form, inverted by :func:`parse_label`."""
        parts = []
        d_d = len(next(iter(self.discrete_part))) if self.discrete_part else None
        if d_d != 0:
            codes = sorted(self.discrete_part)
            if d_d is not None and d_d > 1:
                body = ",".join("(" + ",".join(map(str, c)) + ")" for c in codes)
            else:
                body = ",".join(str(c[0]) for c in codes)
            parts.append("{" + body + "}")
        if self.continuous_upper:
            ups = [repr(float(c)) for c in self.continuous_upper]
            parts.append("(-inf," + (ups[0] if len(ups) == 1 else "[" + ",".join(ups) + "]") + "]")
        return ("~" if self.complemented else "") + "x".join(parts)


_CONT_RE = re.compile(r"^\(-inf,(.*)\]$")


def parse_label(label: str, d_discrete: int, d_continuous: int) -> RectSet:
    """Inverse of :meth:`RectSet.label` for the given dimensions."""
    text = label.strip()
    complemented = text.startswith("~")
    if complemented:
        text = text[1:]
    disc: frozenset = frozenset({()}) if d_discrete == 0 else frozenset()
    if text.startswith("{"):
        close = text.index("}")
        body, text = text[1:close], text[close + 1:]
        text = text[1:] if text.startswith("x") else text
        if body:
            if d_discrete > 1:
                codes = ast.literal_eval("[" + body + "]")
                disc = frozenset(tuple(int(v) for v in c) for c in codes)
            else:
                disc = frozenset((int(v),) for v in body.split(","))
        else:
            disc = frozenset()
    elif d_discrete > 0:
        raise ValueError(f"label {label!r} lacks a discrete part")
    if d_continuous:
        m = _CONT_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse continuous part of {label!r}")
        inner = m.group(1)
        if inner.startswith("["):
            ups = tuple(float(v) for v in inner[1:-1].split(","))
        else:
            ups = (float(inner),)
        if len(ups) != d_continuous:
            raise ValueError(f"label {label!r} has wrong continuous dimension")
    else:
        if text:
            raise ValueError(f"unexpected continuous part in {label!r}")
        ups = ()
    return RectSet(disc, ups, complemented)


def _check_dims(sample: Sample, a: RectSet) -> None:
    if a.d_continuous != sample.d_continuous:
        raise ValueError(
            f"set has {a.d_continuous} continuous coordinates, sample has {sample.d_continuous}")
    for code in a.discrete_part:
        if len(code) != sample.d_discrete:
            raise ValueError(
                f"set code {code} does not match {sample.d_discrete} discrete columns")
        break


def empirical_measure(sample: Sample, a: RectSet) -> float:
    """P_n(a): fraction of observations in ``a`` (closed ``<=`` boundaries)."""
    return int(a.indicator(sample).sum()) / sample.n


def membership_matrix(sample: Sample, cls: Sequence[RectSet]) -> np.ndarray:
    """Boolean matrix of shape ``(len(cls), n)``."""
    out = np.empty((len(cls), sample.n), dtype=bool)
    for k, a in enumerate(cls):
        out[k] = a.indicator(sample)
    return out


def generate_class(sample: Sample, max_support: int = MAX_SUPPORT) -> list[RectSet]:
    """Data-driven class: every ``A_D x (-inf, C_i]`` and its complement.

    ``A_D`` runs over all subsets of the observed discrete support and
    ``C_i`` over the distinct continuous sample points.  The result is
    deduplicated in normal form and always ends with the empty set and the
    full space.  Its order depends only on the set of observations, not on
    their order.
    """
    support = sample.support
    if len(support) > max_support:
        raise ValueError(
            f"discrete support has {len(support)} points; enumeration capped at {max_support}")
    d_c = sample.d_continuous
    corners = [tuple(float(v) for v in row) for row in np.unique(sample.continuous, axis=0)] if d_c else []
    seen: dict[RectSet, None] = {}
    for r in range(len(support) + 1):
        for subset in itertools.combinations(support, r):
            part = frozenset(subset)
            if d_c == 0:
                seen.setdefault(RectSet(part, (), False).canonical(support))
                continue
            for c in corners:
                base = RectSet(part, c, False)
                seen.setdefault(base.canonical(support))
                seen.setdefault(base.complement().canonical(support))
    seen.setdefault(RectSet.empty(d_c))
    seen.setdefault(RectSet.full(support, d_c))
    return list(seen)


def load_sample(path, schema) -> Sample:
    """Read a headed CSV file; ``schema`` gives ``'d'`` or ``'c'`` per column.

    Integer-valued discrete columns keep their values; any other discrete
    column is dictionary-encoded in sorted label order and the labels are
    kept in ``Sample.codebook``.
    """
    if isinstance(schema, str):
        schema = [s.strip() for s in schema.split(",") if s.strip()]
    schema = [s.lower() for s in schema]
    if any(s not in ("d", "c") for s in schema):
        raise IngestError(f"schema entries must be 'd' or 'c', got {schema}")
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise IngestError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if len(header) != len(schema):
        raise IngestError(f"{path}: header has {len(header)} columns, schema has {len(schema)}")
    if not body:
        raise IngestError(f"{path}: no data rows")
    for i, r in enumerate(body):
        if len(r) != len(header):
            raise IngestError(f"{path}: row {i + 1} has {len(r)} cells, expected {len(header)}")

    disc_cols, codebook, cont_cols = [], [], []
    for j, (name, kind) in enumerate(zip(header, schema)):
        cells = [r[j].strip() for r in body]
        if kind == "c":
            col = []
            for i, cell in enumerate(cells):
                try:
                    v = float(cell)
                except ValueError:
                    raise IngestError(f"{path}: row {i + 1}, column {name!r}: non-numeric value {cell!r}") from None
                if not math.isfinite(v):
                    raise IngestError(f"{path}: row {i + 1}, column {name!r}: non-finite value {cell!r}")
                col.append(v)
            cont_cols.append(col)
        else:
            for i, cell in enumerate(cells):
                if cell == "":
                    raise IngestError(f"{path}: row {i + 1}, column {name!r}: missing code")
            try:
                disc_cols.append([int(cell) for cell in cells])
                codebook.append(None)
            except ValueError:
                labels = sorted(set(cells))
                lookup = {lab: k for k, lab in enumerate(labels)}
                disc_cols.append([lookup[cell] for cell in cells])
                codebook.append(tuple(labels))
    n = len(body)
    disc = np.array(disc_cols, dtype=np.int64).T if disc_cols else np.zeros((n, 0), np.int64)
    cont = np.array(cont_cols, dtype=float).T if cont_cols else np.zeros((n, 0))
    return Sample(disc.reshape(n, -1), cont.reshape(n, -1), tuple(codebook))
