"""Splittable random streams keyed by integer paths.

``stream(seed, a, b)`` always yields the same generator for the same path, and
different paths yield statistically independent generators, so work can be
scheduled in any order without changing results.
"""

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    if seed < 0 or any(p < 0 for p in path):
        raise ValueError("seed and stream path must be non-negative integers")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.PCG64(ss))


def resample_counts(n: int, seed: int, path: tuple = (), draws: range | None = None) -> np.ndarray:
    """Multiplicity of each observation in bootstrap resamples.

    Row ``k`` is resample ``draws[k]``: ``n`` indices drawn with replacement
    from the stream ``(seed, *path, b)``.  Shape ``(len(draws), n)``, int32.
    """
    draws = range(1) if draws is None else draws
    out = np.empty((len(draws), n), dtype=np.int32)
    for k, b in enumerate(draws):
        idx = stream(seed, *path, b).integers(0, n, size=n)
        out[k] = np.bincount(idx, minlength=n)
    return out
