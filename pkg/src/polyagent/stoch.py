"""Finite distributions and row-stochastic channels."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import EPS_NORM, EPS_STRICT
from .errors import CarrierMismatch, NormalizationError, ZeroEvidence
from .poly import FinSet


def _normalize_rows(matrix: np.ndarray, what: str) -> np.ndarray:
    if np.any(matrix < 0) or not np.all(np.isfinite(matrix)):
        bad = int(np.argwhere((matrix < 0) | ~np.isfinite(matrix))[0][0])
        raise NormalizationError(f"{what}: row {bad} has a negative or non-finite entry")
    sums = matrix.sum(axis=1)
    off = np.abs(sums - 1.0)
    if np.any(off > EPS_NORM):
        bad = int(np.argmax(off))
        raise NormalizationError(f"{what}: row {bad} sums to {sums[bad]!r}, not 1")
    # rows already within 1e-12 are left untouched so serialization is a fixed point
    fix = off > EPS_STRICT
    if np.any(fix):
        matrix = matrix.copy()
        matrix[fix] /= sums[fix, None]
    return matrix


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dist:
    carrier: FinSet
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if mass.shape != (len(self.carrier),):
            raise CarrierMismatch(
                f"distribution has {mass.size} masses for a carrier of size {len(self.carrier)}")
        mass = _normalize_rows(mass[None, :], f"distribution over {self.carrier.name or 'carrier'}")[0]
        object.__setattr__(self, "mass", _frozen(mass))

    @classmethod
    def point(cls, carrier: FinSet, k: int):
        m = np.zeros(len(carrier))
        m[k] = 1.0
        return cls(carrier, m)

    @classmethod
    def uniform(cls, carrier: FinSet):
        n = len(carrier)
        return cls(carrier, np.full(n, 1.0 / n))

    def __getitem__(self, k):
        return self.mass[k]

    def __len__(self):
        return len(self.carrier)

    def argmax(self) -> int:
        return int(np.argmax(self.mass))

    def allclose(self, other: "Dist", atol=EPS_STRICT) -> bool:
        return self.carrier == other.carrier and bool(np.allclose(self.mass, other.mass, rtol=0, atol=atol))

    def tv(self, other: "Dist") -> float:
        return 0.5 * float(np.abs(self.mass - other.mass).sum())

    def __repr__(self):
        body = ", ".join(f"{e}: {m:.4g}" for e, m in zip(self.carrier, self.mass))
        return f"Dist({{{body}}})"


@dataclass(frozen=True, eq=False)
class Channel:
    """A conditional distribution ``dom ⇝ cod`` stored as a row-stochastic matrix."""

    dom: FinSet
    cod: FinSet
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.size == 0 and len(self.dom) * len(self.cod) == 0:
            m = m.reshape(len(self.dom), len(self.cod))
        if m.shape != (len(self.dom), len(self.cod)):
            raise CarrierMismatch(
                f"channel matrix has shape {m.shape}, expected {(len(self.dom), len(self.cod))}")
        m = _normalize_rows(m, "channel")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def identity(cls, X: FinSet):
        return cls(X, X, np.eye(len(X)))

    def row(self, k) -> Dist:
        return Dist(self.cod, self.matrix[k])

    def __call__(self, d: Dist) -> Dist:
        """Push a distribution through the channel."""
        if d.carrier != self.dom:
            raise CarrierMismatch("distribution carrier differs from channel domain")
        return Dist(self.cod, d.mass @ self.matrix)

    def equals(self, other: "Channel") -> bool:
        return (self.dom == other.dom and self.cod == other.cod
                and bool(np.array_equal(self.matrix, other.matrix)))

    def residual(self, other: "Channel") -> float:
        if self.matrix.shape != other.matrix.shape:
            return float("inf")
        return float(np.max(np.abs(self.matrix - other.matrix), initial=0.0))


def dirac_channel(f: Sequence[int], X: FinSet, Y: FinSet) -> Channel:
    f = list(f)
    if len(f) != len(X):
        raise CarrierMismatch("function is not total on its domain")
    m = np.zeros((len(X), len(Y)))
    m[np.arange(len(X)), f] = 1.0
    return Channel(X, Y, m)


def channel_compose(q: Channel, r: Channel) -> Channel:
    """``r ∘ q``: first ``q``, then ``r``."""
    if q.cod != r.dom:
        raise CarrierMismatch("channel codomain and domain differ")
    return Channel(q.dom, r.cod, q.matrix @ r.matrix)


def pushforward(f: Sequence[int], d: Dist, Y: FinSet) -> Dist:
    mass = np.zeros(len(Y))
    np.add.at(mass, np.asarray(f, dtype=int), d.mass)
    return Dist(Y, mass)


def dist_tensor(a: Dist, b: Dist) -> Dist:
    return Dist(FinSet.product(a.carrier, b.carrier), np.outer(a.mass, b.mass).ravel())


def channel_tensor(q: Channel, r: Channel) -> Channel:
    return Channel(
        FinSet.product(q.dom, r.dom),
        FinSet.product(q.cod, r.cod),
        np.kron(q.matrix, r.matrix),
    )


def marginals(d: Dist, left: FinSet, right: FinSet) -> tuple[Dist, Dist]:
    m = d.mass.reshape(len(left), len(right))
    return Dist(left, m.sum(axis=1)), Dist(right, m.sum(axis=0))


def bayes_posterior(prior: Dist, like: Channel, obs: int) -> Dist:
    if like.dom != prior.carrier:
        raise CarrierMismatch("likelihood domain differs from prior carrier")
    joint = prior.mass * like.matrix[:, obs]
    evidence = joint.sum()
    if evidence <= EPS_NORM:
        raise ZeroEvidence(f"observation {like.cod[obs]!r} has probability {evidence:.3g}")
    return Dist(prior.carrier, joint / evidence)


def kl_divergence(q: np.ndarray, p: np.ndarray) -> float:
    """KL(q || p) in nats with 0 log 0 = 0; infinite where q > 0 = p."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    support = q > 0
    if np.any(p[support] == 0):
        return float("inf")
    return float(np.sum(q[support] * np.log(q[support] / p[support])))
