"""Internal homs of finite polynomials by exhaustive enumeration.

``[p, q]`` has one position per lens ``p -> q``; the directions at ``phi`` are
the pairs ``(i, d)`` with ``i`` a p-position and ``d`` a direction of ``q`` at
``phi.fwd[i]``, laid out i-major.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

from . import config
from .errors import InterfaceMismatch, SizeGuardExceeded
from .poly import FinSet, Lens, Polynomial, Y, lens_compose, tensor_poly


def count_lenses(p: Polynomial, q: Polynomial) -> int:
    """Closed-form ``|Lens(p, q)| = prod_i sum_j |p[i]|^|q[j]|``."""
    total = 1
    for a in p.dir_counts():
        total *= sum(a ** b for b in q.dir_counts())
    return total


def iter_lenses(p: Polynomial, q: Polynomial) -> Iterator[Lens]:
    """All lenses ``p -> q`` in canonical order, without a size guard.

    Forward tables vary in mixed-radix order (first position most
    significant); for each forward table the backward tables follow in the
    same order.
    """
    nq = len(q)
    for fwd in itertools.product(range(nq), repeat=len(p)):
        per_position = [
            list(itertools.product(range(len(p[i])), repeat=len(q[j])))
            for i, j in enumerate(fwd)
        ]
        for bwd in itertools.product(*per_position):
            yield Lens(p, q, fwd, bwd)


def enumerate_lenses(p: Polynomial, q: Polynomial, guard: int | None = None) -> list[Lens]:
    limit = config.guard(config.LENS_GUARD) if guard is None else guard
    n = count_lenses(p, q)
    if n > limit:
        raise SizeGuardExceeded(f"Lens({p}, {q})", n, limit)
    return list(iter_lenses(p, q))


@dataclass(frozen=True, eq=False)
class HomPolynomial:
    """The internal hom ``[source, target]`` together with its enumerated lenses."""

    source: Polynomial
    target: Polynomial
    underlying: Polynomial
    position_lenses: tuple[Lens, ...]

    @cached_property
    def _index(self):
        return {lens: k for k, lens in enumerate(self.position_lenses)}

    def position_of(self, lens: Lens) -> int:
        return self._index[lens]

    def direction_index(self, k: int, i: int, d: int) -> int:
        """Flat index of direction ``(i, d)`` at hom position ``k``."""
        lens = self.position_lenses[k]
        offset = sum(len(self.target[lens.fwd[i2]]) for i2 in range(i))
        return offset + d

    def direction_pairs(self, k: int) -> list[tuple[int, int]]:
        lens = self.position_lenses[k]
        return [(i, d) for i in range(len(self.source)) for d in range(len(self.target[lens.fwd[i]]))]

    def __len__(self):
        return len(self.position_lenses)

    def __eq__(self, other):
        return isinstance(other, HomPolynomial) and self.underlying == other.underlying

    def __hash__(self):
        return hash(self.underlying)


def internal_hom(p: Polynomial, q: Polynomial, guard: int | None = None) -> HomPolynomial:
    lenses = tuple(enumerate_lenses(p, q, guard))
    labels = tuple(lens.render() for lens in lenses)
    directions = []
    for lens in lenses:
        directions.append(FinSet(tuple(
            f"({p.positions[i]},{q[j][d]})"
            for i, j in enumerate(lens.fwd)
            for d in range(len(q[j]))
        )))
    underlying = Polynomial(FinSet(labels, f"[{p},{q}]"), tuple(directions))
    return HomPolynomial(p, q, underlying, lenses)


def dual(p: Polynomial, guard: int | None = None) -> HomPolynomial:
    return internal_hom(p, Y, guard)


def _hom(h, p, q, guard):
    if h is None:
        return internal_hom(p, q, guard)
    if h.source != p or h.target != q:
        raise InterfaceMismatch("supplied hom polynomial does not match")
    return h


def curry(phi: Lens, p: Polynomial, q: Polynomial, hom: HomPolynomial | None = None,
          guard: int | None = None) -> Lens:
    """Transpose ``phi: p⊗q -> r`` to ``p -> [q, r]``."""
    if phi.dom != tensor_poly(p, q):
        raise InterfaceMismatch("lens domain is not p⊗q")
    r = phi.cod
    h = _hom(hom, q, r, guard)
    nq = len(q)
    fwd = []
    bwd = []
    for i in range(len(p)):
        inner_fwd = []
        inner_bwd = []
        outer = []
        for j in range(nq):
            pos = i * nq + j
            width = len(q[j])
            inner_fwd.append(phi.fwd[pos])
            inner_bwd.append(tuple(e % width for e in phi.bwd[pos]))
            outer.extend(e // width for e in phi.bwd[pos])
        k = h.position_of(Lens(q, r, tuple(inner_fwd), tuple(inner_bwd)))
        fwd.append(k)
        bwd.append(tuple(outer))
    return Lens(p, h.underlying, tuple(fwd), tuple(bwd))


def uncurry(psi: Lens, hom: HomPolynomial) -> Lens:
    """Transpose ``psi: p -> [q, r]`` back to ``p⊗q -> r``; ``hom`` is ``[q, r]``."""
    h = hom
    q = h.source
    if psi.cod != h.underlying:
        raise InterfaceMismatch("psi does not land in the given hom polynomial")
    p = psi.dom
    r = h.target
    fwd = []
    bwd = []
    for i in range(len(p)):
        k = psi.fwd[i]
        inner = h.position_lenses[k]
        for j in range(len(q)):
            fwd.append(inner.fwd[j])
            width = len(q[j])
            bwd.append(tuple(
                psi.bwd[i][h.direction_index(k, j, d)] * width + inner.bwd[j][d]
                for d in range(len(r[inner.fwd[j]]))
            ))
    return Lens(tensor_poly(p, q), r, tuple(fwd), tuple(bwd))


def eval_lens(q: Polynomial, r: Polynomial, hom: HomPolynomial | None = None,
              guard: int | None = None) -> Lens:
    """Evaluation ``[q, r]⊗q -> r``."""
    h = _hom(hom, q, r, guard)
    fwd = []
    bwd = []
    for k, lens in enumerate(h.position_lenses):
        for j in range(len(q)):
            fwd.append(lens.fwd[j])
            width = len(q[j])
            bwd.append(tuple(
                h.direction_index(k, j, d) * width + lens.bwd[j][d]
                for d in range(len(r[lens.fwd[j]]))
            ))
    return Lens(tensor_poly(h.underlying, q), r, tuple(fwd), tuple(bwd))


def internal_compose(p: Polynomial, q: Polynomial, r: Polynomial,
                     homs: tuple[HomPolynomial, HomPolynomial, HomPolynomial] | None = None,
                     guard: int | None = None) -> Lens:
    """Composition along ``q``: ``[p, q]⊗[q, r] -> [p, r]``."""
    if homs is None:
        homs = (internal_hom(p, q, guard), internal_hom(q, r, guard), internal_hom(p, r, guard))
    pq, qr, pr = homs
    fwd = []
    bwd = []
    for a, phi in enumerate(pq.position_lenses):
        for b, psi in enumerate(qr.position_lenses):
            c = pr.position_of(lens_compose(phi, psi))
            fwd.append(c)
            width = len(qr.underlying[b])
            row = []
            for i, d in pr.direction_pairs(c):
                j = phi.fwd[i]
                left = pq.direction_index(a, i, psi.bwd[j][d])
                right = qr.direction_index(b, j, d)
                row.append(left * width + right)
            bwd.append(tuple(row))
    dom = tensor_poly(pq.underlying, qr.underlying)
    return Lens(dom, pr.underlying, tuple(fwd), tuple(bwd))


def unit_hom_iso(p: Polynomial, hom: HomPolynomial | None = None) -> Lens:
    """The canonical isomorphism ``p -> [y, p]``."""
    h = _hom(hom, Y, p, None)
    fwd = []
    for i in range(len(p)):
        point = Lens(Y, p, (i,), (tuple(0 for _ in p[i]),))
        fwd.append(h.position_of(point))
    bwd = tuple(tuple(range(len(p[i]))) for i in range(len(p)))
    return Lens(p, h.underlying, tuple(fwd), bwd)

