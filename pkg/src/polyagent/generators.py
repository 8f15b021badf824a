"""Seeded random instances for law checks and property tests."""
from __future__ import annotations

import numpy as np

from .hom import count_lenses
from .poly import FinSet, Lens, Polynomial
from .stoch import Channel, Dist
from .systems import GenSystem, flat_domain


def random_polynomial(rng: np.random.Generator, max_positions=3, max_directions=3,
                      min_positions=1, allow_empty=True) -> Polynomial:
    n = int(rng.integers(min_positions, max_positions + 1))
    lo = 0 if allow_empty else 1
    counts = rng.integers(lo, max_directions + 1, size=n)
    positions = FinSet.range(n, "i")
    return Polynomial(positions, tuple(FinSet.range(int(k), "d") for k in counts))


def random_lens(rng: np.random.Generator, p: Polynomial, q: Polynomial) -> Lens | None:
    """A uniformly chosen forward table among feasible ones, then random backward maps."""
    if count_lenses(p, q) == 0:
        return None
    fwd = []
    bwd = []
    for i in range(len(p)):
        feasible = [j for j in range(len(q)) if len(p[i]) > 0 or len(q[j]) == 0]
        j = int(rng.choice(feasible))
        fwd.append(j)
        bwd.append(tuple(int(x) for x in rng.integers(0, max(len(p[i]), 1), size=len(q[j]))))
    return Lens(p, q, tuple(fwd), tuple(bwd))


def random_stochastic(rng: np.random.Generator, rows: int, cols: int, sparsity=0.0) -> np.ndarray:
    m = rng.random((rows, cols))
    if sparsity:
        m[rng.random((rows, cols)) < sparsity] = 0.0
        empty = m.sum(axis=1) == 0
        m[empty, rng.integers(0, cols, size=int(empty.sum()))] = 1.0
    return m / m.sum(axis=1, keepdims=True)


def random_dist(rng: np.random.Generator, X: FinSet) -> Dist:
    return Dist(X, random_stochastic(rng, 1, len(X))[0])


def random_channel(rng: np.random.Generator, X: FinSet, Y: FinSet, sparsity=0.0) -> Channel:
    return Channel(X, Y, random_stochastic(rng, len(X), len(Y), sparsity))


def random_system(rng: np.random.Generator, p: Polynomial, n_states: int, sparsity=0.0,
                  out=None) -> GenSystem:
    states = FinSet.range(n_states, "s")
    if out is None:
        out = tuple(int(i) for i in rng.integers(0, len(p), size=n_states))
    flat = flat_domain(p, states, out)
    return GenSystem(p, states, tuple(out), random_channel(rng, flat, states, sparsity))
