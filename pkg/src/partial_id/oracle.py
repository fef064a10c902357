"""Finite-support check that the deficiency criterion and coupling existence agree.

A finite structure has observable masses ``p`` (m points), latent masses
``q`` (k points) and a boolean ``allowed[i, j]`` saying whether latent point
``j`` is compatible with observable point ``i``.  It is consistent when some
joint law with these marginals lives on the allowed pairs, which happens
exactly when no set of observable points outweighs its compatible latent
points.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAX_POINTS = 20
DEFICIENCY_TOL = 1e-12
FLOW_TOL = 1e-9
# stands in for an infinite arc capacity: no feasible flow exceeds 1
INF_CAP = 2.0


@dataclass(frozen=True, eq=False)
class DiscreteStructure:
    p: np.ndarray
    q: np.ndarray
    allowed: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        q = np.asarray(self.q, dtype=float)
        allowed = np.asarray(self.allowed, dtype=bool)
        if p.ndim != 1 or q.ndim != 1 or allowed.shape != (p.size, q.size):
            raise ValueError(f"allowed must have shape ({p.size}, {q.size}), got {allowed.shape}")
        for name, v in (("p", p), ("q", q)):
            if np.any(v < 0) or abs(v.sum() - 1.0) > 1e-12:
                raise ValueError(f"{name} must be a probability vector")
        if not allowed.any(axis=1).all():
            raise ValueError("every observable point needs at least one compatible latent point")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "allowed", allowed)

    @property
    def m(self) -> int:
        return self.p.size

    @property
    def k(self) -> int:
        return self.q.size

    @classmethod
    def load(cls, path) -> "DiscreteStructure":
        """JSON ``{"p": [...], "q": [...], "allowed": [[0/1, ...], ...]}`` or CSV.

        The CSV layout puts ``q`` on the first row after a blank cell, then
        one row per observable point: ``p_i`` followed by its allowed flags.
        """
        path = Path(path)
        text = path.read_text()
        if path.suffix.lower() == ".json":
            obj = json.loads(text)
            return cls(obj["p"], obj["q"], obj["allowed"])
        rows = [line.split(",") for line in text.splitlines() if line.strip()]
        q = [float(v) for v in rows[0][1:]]
        p = [float(r[0]) for r in rows[1:]]
        allowed = [[int(float(v)) != 0 for v in r[1:]] for r in rows[1:]]
        return cls(p, q, allowed)


def _subset_table(d: DiscreteStructure):
    m = d.m
    if m > MAX_POINTS:
        raise ValueError(f"subset enumeration capped at {MAX_POINTS} observable points, got {m}")
    masks = np.arange(2 ** m, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(m)) & 1).astype(bool)
    image = (bits.astype(np.int64) @ d.allowed.astype(np.int64)) > 0
    return bits, bits @ d.p - image @ d.q


def sup_deficiency(d: DiscreteStructure) -> float:
    """``max_A [P(A) - nu(Gamma(A))]`` over all subsets; 0 at the empty set."""
    return float(_subset_table(d)[1].max())


def worst_set(d: DiscreteStructure) -> list[int]:
    bits, vals = _subset_table(d)
    return [int(i) for i in np.flatnonzero(bits[int(np.argmax(vals))])]


def _max_flow(cap: np.ndarray, s: int, t: int) -> tuple[float, np.ndarray]:
    """Edmonds-Karp on a dense capacity matrix; returns (value, flow matrix)."""
    size = cap.shape[0]
    flow = np.zeros_like(cap)
    total = 0.0
    eps = 1e-15
    while True:
        parent = [-1] * size
        parent[s] = s
        queue = deque([s])
        while queue and parent[t] < 0:
            u = queue.popleft()
            for v in range(size):
                if parent[v] < 0 and cap[u, v] - flow[u, v] > eps:
                    parent[v] = u
                    queue.append(v)
        if parent[t] < 0:
            return total, flow
        push, v = np.inf, t
        while v != s:
            u = parent[v]
            push = min(push, cap[u, v] - flow[u, v])
            v = u
        v = t
        while v != s:
            u = parent[v]
            flow[u, v] += push
            flow[v, u] -= push
            v = u
        total += push


def feasible_coupling(d: DiscreteStructure):
    """Return ``(feasible, coupling)``; coupling is ``None`` when infeasible.

    Network: source -> observable i (capacity p_i) -> latent j (unbounded,
    allowed pairs only) -> sink (capacity q_j).  Consistent iff the maximum
    flow carries all unit mass.
    """
    m, k = d.m, d.k
    size = m + k + 2
    src, sink = m + k, m + k + 1
    cap = np.zeros((size, size))
    cap[src, :m] = d.p
    cap[:m, m:m + k] = np.where(d.allowed, INF_CAP, 0.0)
    cap[m:m + k, sink] = d.q
    value, flow = _max_flow(cap, src, sink)
    if value < 1.0 - FLOW_TOL:
        return False, None
    coupling = np.clip(flow[:m, m:m + k], 0.0, None)
    return True, coupling


def check_duality(d: DiscreteStructure) -> bool:
    """True when the deficiency criterion and the flow criterion agree."""
    return (sup_deficiency(d) <= DEFICIENCY_TOL) == feasible_coupling(d)[0]


def random_structure(rng: np.random.Generator, max_m: int = 8, max_k: int = 8,
                     density: float | None = None) -> DiscreteStructure:
    m = int(rng.integers(1, max_m + 1))
    k = int(rng.integers(1, max_k + 1))
    p = rng.dirichlet(np.ones(m))
    q = rng.dirichlet(np.ones(k))
    p /= p.sum()
    q /= q.sum()
    dens = rng.uniform(0.1, 0.9) if density is None else density
    allowed = rng.random((m, k)) < dens
    empty = ~allowed.any(axis=1)
    allowed[empty, rng.integers(0, k, size=int(empty.sum()))] = True
    return DiscreteStructure(p, q, allowed)
