"""Stochastic dependent Moore machines (generative models) over polynomial interfaces.

A model over ``p`` has states ``S``, a deterministic output ``out: S -> p(1)``
and an update channel from the flattened dependent sum
``sum_s p[out(s)]`` to ``S``.  The flattening is s-major: all valid
directions of state 0, then those of state 1, and so on.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .config import EPS_LAW
from .errors import CarrierMismatch, IncompatibleOutputs, InterfaceMismatch, InterfaceNotClosed
from .poly import FinSet, Lens, Polynomial, is_unit, tensor_poly
from .stoch import Channel, Dist, channel_compose, dirac_channel


def flat_domain(iface: Polynomial, states: FinSet, out: Sequence[int]) -> FinSet:
    return FinSet(tuple(
        f"({s},{d})" for s, i in zip(states, out) for d in iface[i]
    ), "FlatDom")


def flat_offsets(iface: Polynomial, out: Sequence[int]) -> np.ndarray:
    widths = [len(iface[i]) for i in out]
    return np.concatenate([[0], np.cumsum(widths)]).astype(int)


def _check_out(iface, states, out):
    out = tuple(int(i) for i in out)
    if len(out) != len(states):
        raise CarrierMismatch("output map is not total on the states")
    if any(not 0 <= i < len(iface) for i in out):
        raise CarrierMismatch("output map leaves the interface positions")
    return out


@dataclass(frozen=True, eq=False)
class MooreSystem:
    """Deterministic dependent Moore machine; ``upd`` is indexed by FlatDom."""

    iface: Polynomial
    states: FinSet
    out: tuple[int, ...]
    upd: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "out", _check_out(self.iface, self.states, self.out))
        upd = tuple(int(s) for s in self.upd)
        n = int(flat_offsets(self.iface, self.out)[-1])
        if len(upd) != n or any(not 0 <= s < len(self.states) for s in upd):
            raise CarrierMismatch("update map is not a total map FlatDom -> S")
        object.__setattr__(self, "upd", upd)


@dataclass(frozen=True, eq=False)
class GenSystem:
    iface: Polynomial
    states: FinSet
    out: tuple[int, ...]
    upd: Channel

    def __post_init__(self):
        object.__setattr__(self, "out", _check_out(self.iface, self.states, self.out))
        if self.upd.dom != self.flat:
            raise CarrierMismatch(
                f"update channel domain has {len(self.upd.dom)} rows, FlatDom has {len(self.flat)}")
        if self.upd.cod != self.states:
            raise CarrierMismatch("update channel must land in the state set")

    @classmethod
    def build(cls, iface: Polynomial, states: FinSet, out: Sequence[int], matrix) -> "GenSystem":
        out = _check_out(iface, states, out)
        return cls(iface, states, out, Channel(flat_domain(iface, states, out), states, matrix))

    @cached_property
    def flat(self) -> FinSet:
        return flat_domain(self.iface, self.states, self.out)

    @cached_property
    def offsets(self) -> np.ndarray:
        return flat_offsets(self.iface, self.out)

    def row_index(self, s: int, d: int) -> int:
        return int(self.offsets[s]) + d

    def transition(self, s: int, d: int) -> np.ndarray:
        return self.upd.matrix[self.row_index(s, d)]

    def equals(self, other: "GenSystem") -> bool:
        return (self.iface == other.iface and self.states == other.states
                and self.out == other.out and self.upd.equals(other.upd))

    def with_prior(self, prior: Dist | Sequence[float]) -> "PrioredGenSystem":
        if not isinstance(prior, Dist):
            prior = Dist(self.states, prior)
        return PrioredGenSystem(self, prior)


@dataclass(frozen=True, eq=False)
class PrioredGenSystem:
    system: GenSystem
    prior: Dist

    def __post_init__(self):
        if self.prior.carrier != self.system.states:
            raise CarrierMismatch("prior carrier must be the state set")

    @property
    def iface(self):
        return self.system.iface

    @property
    def states(self):
        return self.system.states


def attach_prior(sys: GenSystem, prior: Dist) -> PrioredGenSystem:
    return PrioredGenSystem(sys, prior)


def forget_prior(ps: PrioredGenSystem) -> GenSystem:
    return ps.system


def moore_to_gen(m: MooreSystem) -> GenSystem:
    flat = flat_domain(m.iface, m.states, m.out)
    return GenSystem(m.iface, m.states, m.out, dirac_channel(m.upd, flat, m.states))


def moore_rewire(phi: Lens, m: MooreSystem) -> MooreSystem:
    """Deterministic counterpart of :func:`gen_rewire`."""
    if m.iface != phi.dom:
        raise InterfaceMismatch("system interface is not the lens domain")
    offsets = flat_offsets(m.iface, m.out)
    upd = []
    for s, i in enumerate(m.out):
        for e in phi.bwd[i]:
            upd.append(m.upd[offsets[s] + e])
    return MooreSystem(phi.cod, m.states, tuple(phi.fwd[i] for i in m.out), tuple(upd))


def gen_rewire(phi: Lens, sys: GenSystem) -> GenSystem:
    if sys.iface != phi.dom:
        raise InterfaceMismatch("system interface is not the lens domain")
    out = tuple(phi.fwd[i] for i in sys.out)
    new_flat = flat_domain(phi.cod, sys.states, out)
    pullback = []
    for s, i in enumerate(sys.out):
        for e in phi.bwd[i]:
            pullback.append(sys.row_index(s, e))
    reindex = dirac_channel(pullback, new_flat, sys.flat)
    return GenSystem(phi.cod, sys.states, out, channel_compose(reindex, sys.upd))


def gen_parallel(a: GenSystem, b: GenSystem) -> GenSystem:
    iface = tensor_poly(a.iface, b.iface)
    states = FinSet.product(a.states, b.states)
    nq = len(b.iface)
    out = tuple(i * nq + j for i in a.out for j in b.out)
    rows = []
    for s, i in enumerate(a.out):
        for t, j in enumerate(b.out):
            for d in range(len(a.iface[i])):
                left = a.transition(s, d)
                for e in range(len(b.iface[j])):
                    rows.append(np.outer(left, b.transition(t, e)).ravel())
    matrix = np.array(rows).reshape(len(rows), len(states))
    return GenSystem.build(iface, states, out, matrix)


def gen_parallel_priored(a: PrioredGenSystem, b: PrioredGenSystem) -> PrioredGenSystem:
    sys = gen_parallel(a.system, b.system)
    return sys.with_prior(np.outer(a.prior.mass, b.prior.mass).ravel())


def trivial_system(iface: Polynomial | None = None) -> GenSystem:
    """The one-state system on ``y`` (or on any one-position interface)."""
    from .poly import Y, UNIT
    p = Y if iface is None else iface
    out = (0,)
    return GenSystem.build(p, UNIT, out, np.ones((len(p[0]), 1)))


class MorphismCheck(NamedTuple):
    ok: bool
    residual: float


def _as_gen(x):
    return (x.system, x.prior) if isinstance(x, PrioredGenSystem) else (x, None)


def check_system_morphism(f: Channel, a, b, check_prior: bool = False,
                          tol: float = EPS_LAW) -> MorphismCheck:
    """Check ``f ∘ upd_a = upd_b ∘ (f × id)`` entrywise.

    ``a`` and ``b`` may be priored; with ``check_prior`` the Gen_* condition
    ``prior_b = f ∘ prior_a`` is checked as well.
    """
    a, prior_a = _as_gen(a)
    b, prior_b = _as_gen(b)
    if a.iface != b.iface:
        raise InterfaceMismatch("system morphisms need a common interface")
    if f.dom != a.states or f.cod != b.states:
        raise CarrierMismatch("channel must map source states to target states")
    F = f.matrix
    for s, i in enumerate(a.out):
        for t in np.nonzero(F[s])[0]:
            if b.out[t] != i:
                raise IncompatibleOutputs(
                    f"f sends mass from {a.states[s]} (position {a.iface.positions[i]}) "
                    f"to {b.states[t]} (position {b.iface.positions[b.out[t]]})")
    lhs = a.upd.matrix @ F
    rhs = np.zeros_like(lhs)
    for s, i in enumerate(a.out):
        for d in range(len(a.iface[i])):
            row = a.row_index(s, d)
            for t in np.nonzero(F[s])[0]:
                rhs[row] += F[s, t] * b.transition(t, d)
    residual = float(np.max(np.abs(lhs - rhs), initial=0.0))
    if check_prior:
        if prior_a is None or prior_b is None:
            raise CarrierMismatch("prior check requested on systems without priors")
        residual = max(residual, float(np.max(np.abs(prior_a.mass @ F - prior_b.mass))))
    return MorphismCheck(residual <= tol, residual)


def check_priored_morphism(f: Channel, a: PrioredGenSystem, b: PrioredGenSystem,
                           tol: float = EPS_LAW) -> MorphismCheck:
    return check_system_morphism(f, a, b, check_prior=True, tol=tol)


def fold_likelihood(S: FinSet, p: Polynomial, trans: Channel, like: Channel) -> GenSystem:
    """Fold a stochastic likelihood ``S ⇝ p(1)`` into the state.

    The result has states ``S × p(1)`` and the projection as output; a row
    ``(s, i, x)`` of the update is ``trans(s, i, x) ⊗ like(s)``.
    """
    if like.dom != S or like.cod != p.positions:
        raise CarrierMismatch("likelihood must be a channel S ⇝ p(1)")
    states = FinSet.product(S, p.positions)
    n = len(p)
    out = tuple(k % n for k in range(len(states)))
    expected = flat_domain(p, states, out)
    if len(trans.dom) != len(expected) or trans.cod != S:
        raise CarrierMismatch("transition must be a channel sum_(s,i) p[i] ⇝ S")
    rows = []
    r = 0
    for s in range(len(S)):
        for i in range(n):
            for _ in range(len(p[i])):
                rows.append(np.outer(trans.matrix[r], like.matrix[s]).ravel())
                r += 1
    matrix = np.array(rows).reshape(len(rows), len(states))
    return GenSystem.build(p, states, out, matrix)


def _closed(ps: PrioredGenSystem) -> np.ndarray:
    if not is_unit(ps.iface):
        raise InterfaceNotClosed(f"interface {ps.iface} is not y")
    return ps.system.upd.matrix


def closed_unroll_exact(ps: PrioredGenSystem, T: int) -> list[Dist]:
    M = _closed(ps)
    d = ps.prior.mass
    out = [ps.prior]
    for _ in range(T):
        d = d @ M
        out.append(Dist(ps.states, d))
    return out


def trajectory_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Independent stream for trajectory ``index`` under ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def _inverse_cdf(cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    k = (cum <= u[:, None]).sum(axis=1)
    return np.minimum(k, cum.shape[1] - 1)


def sample_categorical(probs: np.ndarray, u: float) -> int:
    return int(_inverse_cdf(np.cumsum(probs)[None, :], np.array([u]))[0])


def closed_unroll_batch(ps: PrioredGenSystem, T: int, seed: int, n: int,
                        start: int = 0) -> np.ndarray:
    """``n`` sampled trajectories (rows) with streams ``start .. start+n-1``."""
    M = _closed(ps)
    U = np.stack([trajectory_rng(seed, start + k).random(T + 1) for k in range(n)]) \
        if n else np.zeros((0, T + 1))
    cum_prior = np.cumsum(ps.prior.mass)
    cum = np.cumsum(M, axis=1)
    traj = np.empty((n, T + 1), dtype=int)
    traj[:, 0] = _inverse_cdf(np.broadcast_to(cum_prior, (n, len(cum_prior))), U[:, 0])
    for t in range(T):
        traj[:, t + 1] = _inverse_cdf(cum[traj[:, t]], U[:, t + 1])
    return traj


def closed_unroll_sample(ps: PrioredGenSystem, T: int, seed: int, index: int = 0) -> list[int]:
    return closed_unroll_batch(ps, T, seed, 1, start=index)[0].tolist()


def empirical_marginals(traj: np.ndarray, n_states: int) -> np.ndarray:
    """Per-step state frequencies, shape ``(T+1, n_states)``."""
    counts = np.stack([np.bincount(col, minlength=n_states) for col in traj.T])
    return counts / max(traj.shape[0], 1)
