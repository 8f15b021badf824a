"""Finite sets, finite polynomials, dependent lenses and finite categories.

Everything is index based: a set is an ordered tuple of string labels and
every map between finite sets is stored as a tuple of target indices.  All
product layouts are lexicographic with the left factor most significant.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import InterfaceMismatch, InvalidCategory


@dataclass(frozen=True)
class FinSet:
    """A finite set with a stable element order.

    The ``name`` is descriptive only and is ignored by equality.
    """

    elements: tuple[str, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        elements = tuple(str(e) for e in self.elements)
        object.__setattr__(self, "elements", elements)
        if len(set(elements)) != len(elements):
            seen = set()
            dup = next(e for e in elements if e in seen or seen.add(e))
            raise ValueError(f"FinSet {self.name!r}: duplicate element {dup!r}")

    @classmethod
    def range(cls, n, prefix="", name=""):
        return cls(tuple(f"{prefix}{k}" for k in range(n)), name)

    @classmethod
    def product(cls, *sets: "FinSet", name=""):
        elems = tuple(
            "(" + ",".join(combo) + ")"
            for combo in itertools.product(*(s.elements for s in sets))
        )
        return cls(elems, name)

    @cached_property
    def _lookup(self):
        return {e: k for k, e in enumerate(self.elements)}

    def index(self, label) -> int:
        try:
            return self._lookup[str(label)]
        except KeyError:
            raise KeyError(f"{label!r} is not an element of {self.name or self.elements}") from None

    def __contains__(self, label):
        return str(label) in self._lookup

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, k):
        return self.elements[k]

    def __repr__(self):
        label = f"{self.name}=" if self.name else ""
        return f"FinSet({label}{{{', '.join(self.elements)}}})"


UNIT = FinSet(("*",), "1")
EMPTY = FinSet((), "0")


@dataclass(frozen=True)
class Polynomial:
    """A finite polynomial: one direction set per position."""

    positions: FinSet
    directions: tuple[FinSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))
        if len(self.directions) != len(self.positions):
            raise ValueError(
                f"polynomial needs one direction set per position "
                f"({len(self.positions)} positions, {len(self.directions)} direction sets)"
            )

    @classmethod
    def from_dict(cls, spec: Mapping[str, Iterable[str]]):
        """Build from ``{position: [directions...]}`` preserving insertion order."""
        positions = FinSet(tuple(spec))
        return cls(positions, tuple(FinSet(tuple(d)) for d in spec.values()))

    def __getitem__(self, i: int) -> FinSet:
        return self.directions[i]

    def __len__(self):
        return len(self.positions)

    @property
    def n_positions(self):
        return len(self.positions)

    def dir_counts(self) -> tuple[int, ...]:
        return tuple(len(d) for d in self.directions)

    @property
    def is_monomial(self):
        return all(d == self.directions[0] for d in self.directions[1:])

    @property
    def total_directions(self):
        return sum(self.dir_counts())

    def __str__(self):
        if not len(self):
            return "0"
        counts = {}
        for n in self.dir_counts():
            counts[n] = counts.get(n, 0) + 1
        terms = []
        for n in sorted(counts, reverse=True):
            coeff = counts[n]
            mono = "" if n == 0 else ("y" if n == 1 else f"y^{n}")
            if not mono:
                terms.append(str(coeff))
            else:
                terms.append(mono if coeff == 1 else f"{coeff}{mono}")
        return " + ".join(terms)


def monomial(outputs: FinSet, inputs: FinSet) -> Polynomial:
    return Polynomial(outputs, (inputs,) * len(outputs))


Y = monomial(UNIT, UNIT)


def is_unit(p: Polynomial) -> bool:
    """True iff ``p`` has one position with exactly one direction (the closed interface)."""
    return p.dir_counts() == (1,)


_TERM = re.compile(r"^(\d*)(y(?:\^(\d+))?)?$")


def parse_poly(expr: str) -> Polynomial:
    """Parse a sum of terms such as ``2y^3 + y^2 + 1`` into a polynomial.

    Positions are numbered ``i0, i1, ...`` in term order and each position's
    directions ``d0, d1, ...``.
    """
    counts = []
    for raw in expr.replace(" ", "").split("+"):
        m = _TERM.match(raw)
        if not raw or not m or not (m.group(1) or m.group(2)):
            raise ValueError(f"cannot parse polynomial term {raw!r} in {expr!r}")
        coef = int(m.group(1)) if m.group(1) else 1
        exp = 0 if not m.group(2) else int(m.group(3) or 1)
        counts += [exp] * coef
    return Polynomial(FinSet.range(len(counts), "i"), tuple(FinSet.range(k, "d") for k in counts))


@dataclass(frozen=True)
class Lens:
    """A dependent lens ``dom -> cod``.

    ``fwd[i]`` is the cod position hit by dom position ``i``; ``bwd[i][d]`` is
    the dom direction (in ``dom[i]``) assigned to cod direction ``d`` in
    ``cod[fwd[i]]``.
    """

    dom: Polynomial
    cod: Polynomial
    fwd: tuple[int, ...]
    bwd: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        fwd = tuple(int(j) for j in self.fwd)
        bwd = tuple(tuple(int(e) for e in row) for row in self.bwd)
        object.__setattr__(self, "fwd", fwd)
        object.__setattr__(self, "bwd", bwd)
        if len(fwd) != len(self.dom) or len(bwd) != len(self.dom):
            raise ValueError("lens tables must cover every domain position")
        for i, j in enumerate(fwd):
            if not 0 <= j < len(self.cod):
                raise ValueError(f"forward map sends position {i} outside the codomain")
            if len(bwd[i]) != len(self.cod[j]):
                raise ValueError(f"backward map at position {i} is not total")
            if any(not 0 <= e < len(self.dom[i]) for e in bwd[i]):
                raise ValueError(f"backward map at position {i} leaves the domain directions")

    @classmethod
    def from_labels(cls, dom: Polynomial, cod: Polynomial,
                    fwd: Mapping[str, str], bwd: Mapping[str, Mapping[str, str]]):
        f = []
        b = []
        for i, pos in enumerate(dom.positions):
            j = cod.positions.index(fwd[pos])
            f.append(j)
            table = bwd.get(pos, {})
            b.append(tuple(dom[i].index(table[d]) for d in cod[j]))
        return cls(dom, cod, tuple(f), tuple(b))

    def to_labels(self):
        fwd = {self.dom.positions[i]: self.cod.positions[j] for i, j in enumerate(self.fwd)}
        bwd = {
            self.dom.positions[i]: {
                self.cod[self.fwd[i]][d]: self.dom[i][e] for d, e in enumerate(row)
            }
            for i, row in enumerate(self.bwd)
        }
        return fwd, bwd

    def render(self) -> str:
        parts = []
        for i, j in enumerate(self.fwd):
            back = ",".join(
                f"{self.cod[j][d]}>{self.dom[i][e]}" for d, e in enumerate(self.bwd[i])
            )
            parts.append(f"{self.dom.positions[i]}>{self.cod.positions[j]}[{back}]")
        return "<" + ";".join(parts) + ">"


def lens_identity(p: Polynomial) -> Lens:
    return Lens(p, p, tuple(range(len(p))), tuple(tuple(range(len(d))) for d in p.directions))


def lens_compose(phi: Lens, psi: Lens) -> Lens:
    """Diagrammatic composite ``phi ; psi`` (first ``phi``, then ``psi``)."""
    if phi.cod != psi.dom:
        raise InterfaceMismatch(f"cannot compose: {phi.cod} != {psi.dom}")
    fwd = tuple(psi.fwd[j] for j in phi.fwd)
    bwd = tuple(
        tuple(phi.bwd[i][e] for e in psi.bwd[phi.fwd[i]])
        for i in range(len(phi.dom))
    )
    return Lens(phi.dom, psi.cod, fwd, bwd)


def tensor_poly(p: Polynomial, q: Polynomial) -> Polynomial:
    positions = FinSet.product(p.positions, q.positions)
    directions = tuple(
        FinSet.product(di, dj) for di in p.directions for dj in q.directions
    )
    return Polynomial(positions, directions)


def tensor_lens(phi: Lens, psi: Lens) -> Lens:
    nq, nq2 = len(psi.dom), len(psi.cod)
    fwd = []
    bwd = []
    for i in range(len(phi.dom)):
        for j in range(nq):
            fwd.append(phi.fwd[i] * nq2 + psi.fwd[j])
            width_src = len(psi.dom[j])
            bwd.append(tuple(
                phi.bwd[i][d] * width_src + psi.bwd[j][e]
                for d in range(len(phi.cod[phi.fwd[i]]))
                for e in range(len(psi.cod[psi.fwd[j]]))
            ))
    return Lens(tensor_poly(phi.dom, psi.dom), tensor_poly(phi.cod, psi.cod), tuple(fwd), tuple(bwd))


def swap_lens(p: Polynomial, q: Polynomial) -> Lens:
    """Symmetry ``p⊗q -> q⊗p``."""
    np_, nq = len(p), len(q)
    fwd = []
    bwd = []
    for i in range(np_):
        for j in range(nq):
            fwd.append(j * np_ + i)
            a, b = len(p[i]), len(q[j])
            # cod direction (e, d) with e in q[j], d in p[i] goes to (d, e)
            bwd.append(tuple(d * b + e for e in range(b) for d in range(a)))
    return Lens(tensor_poly(p, q), tensor_poly(q, p), tuple(fwd), tuple(bwd))


def lens_inverse(phi: Lens) -> Lens:
    """Inverse of an isomorphism lens; raises ``ValueError`` if ``phi`` is not invertible."""
    if sorted(phi.fwd) != list(range(len(phi.cod))) or len(phi.dom) != len(phi.cod):
        raise ValueError("forward map is not a bijection")
    fwd = [0] * len(phi.cod)
    bwd: list[tuple[int, ...]] = [()] * len(phi.cod)
    for i, j in enumerate(phi.fwd):
        row = phi.bwd[i]
        if sorted(row) != list(range(len(phi.dom[i]))):
            raise ValueError(f"backward map at position {i} is not a bijection")
        inv = [0] * len(row)
        for d, e in enumerate(row):
            inv[e] = d
        fwd[j] = i
        bwd[j] = tuple(inv)
    return Lens(phi.cod, phi.dom, tuple(fwd), tuple(bwd))


def find_isomorphism(p: Polynomial, q: Polynomial) -> Lens | None:
    """A witness isomorphism ``p -> q`` or ``None``.

    Positions are matched greedily by direction count; directions by index.
    """
    if sorted(p.dir_counts()) != sorted(q.dir_counts()):
        return None
    free: dict[int, list[int]] = {}
    for j, n in enumerate(q.dir_counts()):
        free.setdefault(n, []).append(j)
    fwd = []
    for n in p.dir_counts():
        fwd.append(free[n].pop(0))
    bwd = tuple(tuple(range(n)) for n in p.dir_counts())
    return Lens(p, q, tuple(fwd), bwd)


def poly_apply(p: Polynomial, X: FinSet) -> FinSet:
    """The set ``p(X)`` of p-terms with variables in ``X``."""
    labels = []
    for i, pos in enumerate(p.positions):
        for f in itertools.product(X.elements, repeat=len(p[i])):
            labels.append(f"{pos}({','.join(f)})")
    return FinSet(tuple(labels), f"{p}({X.name or 'X'})")


def poly_apply_map(p: Polynomial, X: FinSet, Z: FinSet, g: Sequence[int]) -> tuple[int, ...]:
    """The function ``p(g): p(X) -> p(Z)`` as an index table."""
    nz = len(Z)
    out = []
    offset = 0
    for i in range(len(p)):
        k = len(p[i])
        for f in itertools.product(range(len(X)), repeat=k):
            code = 0
            for x in f:
                code = code * nz + g[x]
            out.append(offset + code)
        offset += nz ** k
    return tuple(out)


@dataclass(frozen=True)
class FinCategory:
    """A finite category given by explicit tables.

    ``compose`` maps a pair ``(g, f)`` of morphism labels, in diagrammatic
    order (first ``g`` then ``f``), to the label of the composite.
    """

    objects: FinSet
    morphisms: tuple[tuple[str, str, str], ...]
    identities: Mapping[str, str]
    compose: Mapping[tuple[str, str], str]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "morphisms", tuple(tuple(m) for m in self.morphisms))
        object.__setattr__(self, "identities", dict(self.identities))
        table = {tuple(k): v for k, v in dict(self.compose).items()}
        # identity composites are implied
        for label, dom, cod in self.morphisms:
            if dom in self.identities and cod in self.identities:
                table.setdefault((self.identities[dom], label), label)
                table.setdefault((label, self.identities[cod]), label)
        object.__setattr__(self, "compose", table)

    def __hash__(self):
        return hash((self.objects, self.morphisms))

    @cached_property
    def _mor(self):
        return {label: (dom, cod) for label, dom, cod in self.morphisms}

    def dom(self, m):
        return self._mor[m][0]

    def cod(self, m):
        return self._mor[m][1]

    def has(self, m):
        return m in self._mor

    def out_of(self, x) -> list[str]:
        return [label for label, dom, _ in self.morphisms if dom == x]

    def then(self, g, f):
        return self.compose[(g, f)]

    def check_laws(self):
        """Exhaustively verify closure, unitality and associativity."""
        labels = [m[0] for m in self.morphisms]
        if len(set(labels)) != len(labels):
            raise InvalidCategory("duplicate morphism labels")
        for label, dom, cod in self.morphisms:
            if dom not in self.objects or cod not in self.objects:
                raise InvalidCategory(f"morphism {label} has an unknown endpoint")
        for x in self.objects:
            ident = self.identities.get(x)
            if ident is None or not self.has(ident) or self._mor[ident] != (x, x):
                raise InvalidCategory(f"object {x} lacks an identity")
        for g in labels:
            for f in labels:
                composable = self.cod(g) == self.dom(f)
                if composable != ((g, f) in self.compose):
                    if composable:
                        raise InvalidCategory(f"composite {g};{f} missing")
                    raise InvalidCategory(f"composite {g};{f} given for non-composable pair")
                if composable:
                    h = self.compose[(g, f)]
                    if not self.has(h) or self._mor[h] != (self.dom(g), self.cod(f)):
                        raise InvalidCategory(f"composite {g};{f} = {h} has the wrong type")
        for label, dom, cod in self.morphisms:
            if self.compose[(self.identities[dom], label)] != label:
                raise InvalidCategory(f"left unit law fails at {label}")
            if self.compose[(label, self.identities[cod])] != label:
                raise InvalidCategory(f"right unit law fails at {label}")
        for f, g, h in itertools.product(labels, repeat=3):
            if self.cod(f) == self.dom(g) and self.cod(g) == self.dom(h):
                left = self.compose[(self.compose[(f, g)], h)]
                right = self.compose[(f, self.compose[(g, h)])]
                if left != right:
                    raise InvalidCategory(f"associativity fails at ({f},{g},{h})")
        return True


def discrete_category(objects: FinSet) -> FinCategory:
    ids = {x: f"id_{x}" for x in objects}
    return FinCategory(objects, tuple((ids[x], x, x) for x in objects), ids, {})


def category_to_poly(C: FinCategory) -> Polynomial:
    C.check_laws()
    return Polynomial(
        FinSet(C.objects.elements, C.name or "C0"),
        tuple(FinSet(tuple(C.out_of(x)), f"{x}/") for x in C.objects),
    )
