"""The Grothendieck category of generative models and structure-learning interfaces.

An object bundles an interface with a model over it; a morphism pairs a lens
``p -> p'`` with a system morphism from the rewired source to the target.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import config
from .errors import (IncompatibleOutputs, InterfaceMismatch,
                     MissingTable, SizeGuardExceeded)
from .hom import count_lenses, iter_lenses
from .poly import FinSet, Lens, Polynomial, lens_compose, lens_identity
from .stoch import Channel, channel_compose, dirac_channel
from .systems import GenSystem, MorphismCheck, check_system_morphism, gen_rewire


@dataclass(frozen=True, eq=False)
class GrothObject:
    iface: Polynomial
    system: GenSystem
    name: str = ""

    def __post_init__(self):
        if self.system.iface != self.iface:
            raise InterfaceMismatch("object system does not live over its interface")


@dataclass(frozen=True, eq=False)
class GrothMorphism:
    lens: Lens
    chan: Channel

    def equals(self, other: "GrothMorphism") -> bool:
        return self.lens == other.lens and self.chan.equals(other.chan)

    def label(self) -> str:
        fn = ",".join(str(int(np.argmax(r))) if r.max() == 1.0 else "~" for r in self.chan.matrix)
        return f"{self.lens.render()}|{fn}"


def groth_identity(obj: GrothObject) -> GrothMorphism:
    return GrothMorphism(lens_identity(obj.iface), Channel.identity(obj.system.states))


def groth_compose(m: GrothMorphism, n: GrothMorphism) -> GrothMorphism:
    """First ``m``, then ``n``."""
    return GrothMorphism(lens_compose(m.lens, n.lens), channel_compose(m.chan, n.chan))


def check_groth_morphism(src: GrothObject, dst: GrothObject, m: GrothMorphism,
                         tol: float = config.EPS_LAW) -> MorphismCheck:
    if m.lens.dom != src.iface or m.lens.cod != dst.iface:
        raise InterfaceMismatch("lens does not run between the object interfaces")
    return check_system_morphism(m.chan, gen_rewire(m.lens, src.system), dst.system, tol=tol)


def _function_channels(S: FinSet, T: FinSet):
    for f in itertools.product(range(len(T)), repeat=len(S)):
        yield dirac_channel(f, S, T)


def _grid_rows(n: int, resolution: int):
    for combo in itertools.combinations_with_replacement(range(n), resolution):
        row = np.zeros(n)
        for k in combo:
            row[k] += 1.0 / resolution
        yield row


def count_grid_channels(S: FinSet, T: FinSet, resolution: int) -> int:
    from math import comb
    return comb(len(T) + resolution - 1, resolution) ** len(S)


def enumerate_groth_morphisms(src: GrothObject, dst: GrothObject, deterministic_only: bool = True,
                              candidates: Sequence[Channel] | None = None, grid: int | None = None,
                              guard: int | None = None,
                              tol: float = config.EPS_LAW) -> list[GrothMorphism]:
    """All valid morphisms ``src -> dst`` over a finite channel search space.

    By default channels range over Dirac channels of functions.  Stochastic
    channels come either from ``candidates`` or from the grid whose row
    masses are multiples of ``1/grid``; without either, a non-deterministic
    search is refused.
    """
    limit = config.guard(config.LENS_GUARD) if guard is None else guard
    S, T = src.system.states, dst.system.states
    n_lenses = count_lenses(src.iface, dst.iface)
    if candidates is not None:
        space = list(candidates)
        n_chan = len(space)
    elif deterministic_only:
        n_chan = len(T) ** len(S)
        space = None
    else:
        if grid is None:
            raise SizeGuardExceeded(
                "stochastic channel search (a continuum; pass candidates or a grid)",
                len(S) * len(T), 0)
        n_chan = count_grid_channels(S, T, grid)
        space = None
    if n_lenses * n_chan > limit:
        raise SizeGuardExceeded("Grothendieck morphism search", n_lenses * n_chan, limit)

    def channels():
        if space is not None:
            return iter(space)
        if deterministic_only:
            return _function_channels(S, T)
        rows = list(_grid_rows(len(T), grid))
        return (Channel(S, T, np.array(c)) for c in itertools.product(rows, repeat=len(S)))

    found = []
    for lens in iter_lenses(src.iface, dst.iface):
        rewired = gen_rewire(lens, src.system)
        for chan in channels():
            try:
                ok = check_system_morphism(chan, rewired, dst.system, tol=tol).ok
            except IncompatibleOutputs:
                continue
            if ok:
                found.append(GrothMorphism(lens, chan))
    return found


def morphism_tables(objs: Sequence[GrothObject], **kwargs) -> dict[tuple[int, int], list[GrothMorphism]]:
    return {
        (a, b): enumerate_groth_morphisms(objs[a], objs[b], **kwargs)
        for a in range(len(objs)) for b in range(len(objs))
    }


def structure_agent_interface(objs: Sequence[GrothObject],
                              tables: Mapping[tuple[int, int], Sequence[GrothMorphism]]) -> Polynomial:
    """Positions tag an object with one of its positions; directions are morphisms out of it."""
    for a in range(len(objs)):
        for b in range(len(objs)):
            if (a, b) not in tables:
                raise MissingTable(f"no morphism table for ({a}, {b})")
    positions = []
    directions = []
    for a, obj in enumerate(objs):
        outgoing = FinSet(tuple(
            f"{b}:{k}" for b in range(len(objs)) for k in range(len(tables[(a, b)]))
        ))
        for pos in obj.iface.positions:
            positions.append(f"({obj.name or a},{pos})")
            directions.append(outgoing)
    return Polynomial(FinSet(tuple(positions), "structure"), tuple(directions))


def outgoing(tables, a: int, n_objs: int) -> list[tuple[int, GrothMorphism]]:
    return [(b, m) for b in range(n_objs) for m in tables[(a, b)]]


def structure_system(objs: Sequence[GrothObject],
                     tables: Mapping[tuple[int, int], Sequence[GrothMorphism]]) -> GenSystem:
    """Environment on the structure interface: a direction applies its change of structure.

    States are pairs ``(object, state)``; choosing morphism ``(lens, f)``
    from object ``a`` to ``b`` moves state ``s`` to ``f(s)`` in ``b``.
    """
    iface = structure_agent_interface(objs, tables)
    labels = []
    base = []
    offset = 0
    for a, obj in enumerate(objs):
        base.append(offset)
        for s in obj.system.states:
            labels.append(f"({obj.name or a},{s})")
        offset += len(obj.system.states)
    states = FinSet(tuple(labels), "ΣS")
    pos_base = np.cumsum([0] + [len(o.iface) for o in objs])
    out = []
    rows = []
    for a, obj in enumerate(objs):
        moves = outgoing(tables, a, len(objs))
        for s, i in enumerate(obj.system.out):
            out.append(int(pos_base[a]) + i)
            for b, m in moves:
                row = np.zeros(len(states))
                row[base[b]:base[b] + len(objs[b].system.states)] = m.chan.matrix[s]
                rows.append(row)
    return GenSystem.build(iface, states, out, np.array(rows).reshape(len(rows), len(states)))


def check_groth_category(objs: Sequence[GrothObject],
                         tables: Mapping[tuple[int, int], Sequence[GrothMorphism]]) -> dict[str, float]:
    """Category laws on the enumerated fragment; returns the worst residual per law.

    Every listed morphism is re-verified; identities must be listed; composites
    of listed morphisms must verify and be listed (closure); associativity is
    checked on all composable triples.
    """
    n = len(objs)
    res = {"validity": 0.0, "identity": 0.0, "closure": 0.0, "associativity": 0.0}
    for (a, b), ms in tables.items():
        for m in ms:
            res["validity"] = max(res["validity"], check_groth_morphism(objs[a], objs[b], m).residual)
    for a in range(n):
        ident = groth_identity(objs[a])
        if not any(ident.equals(m) for m in tables[(a, a)]):
            res["identity"] = float("inf")
        for m in tables[(a, a)]:
            for lhs in (groth_compose(ident, m), groth_compose(m, ident)):
                res["identity"] = max(res["identity"], lhs.chan.residual(m.chan),
                                      0.0 if lhs.lens == m.lens else float("inf"))
    for a, b, c in itertools.product(range(n), repeat=3):
        for m in tables[(a, b)]:
            for k in tables[(b, c)]:
                mk = groth_compose(m, k)
                r = check_groth_morphism(objs[a], objs[c], mk).residual
                listed = any(mk.lens == x.lens and mk.chan.residual(x.chan) <= config.EPS_STRICT
                             for x in tables[(a, c)])
                res["closure"] = max(res["closure"], r if listed else float("inf"))
    for a, b, c, d in itertools.product(range(n), repeat=4):
        for m in tables[(a, b)]:
            for k in tables[(b, c)]:
                mk = groth_compose(m, k)
                for l in tables[(c, d)]:
                    left = groth_compose(mk, l)
                    right = groth_compose(m, groth_compose(k, l))
                    r = left.chan.residual(right.chan)
                    if left.lens != right.lens:
                        r = float("inf")
                    res["associativity"] = max(res["associativity"], r)
    return res
