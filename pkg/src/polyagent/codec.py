"""JSON encodings of the core objects and canonical rendering."""
from __future__ import annotations

import json
import math

from .hom import HomPolynomial
from .poly import FinCategory, FinSet, Lens, Polynomial
from .stoch import Channel, Dist
from .systems import GenSystem, PrioredGenSystem


def canonical_dumps(obj) -> str:
    """Sorted keys, compact separators, shortest round-trip floats."""
    return json.dumps(_clean(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _clean(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _clean(obj.item())
    return obj


def finset_to_json(X: FinSet):
    return list(X.elements)


def poly_to_json(p: Polynomial):
    return {
        "positions": list(p.positions.elements),
        "directions": {pos: list(d.elements) for pos, d in zip(p.positions, p.directions)},
    }


def poly_from_json(obj) -> Polynomial:
    positions = FinSet(tuple(obj["positions"]))
    dirs = obj["directions"]
    return Polynomial(positions, tuple(FinSet(tuple(dirs[pos])) for pos in positions))


def lens_to_json(phi: Lens, dom: str | None = None, cod: str | None = None):
    fwd, bwd = phi.to_labels()
    return {
        "dom": dom if dom is not None else poly_to_json(phi.dom),
        "cod": cod if cod is not None else poly_to_json(phi.cod),
        "fwd": fwd,
        "bwd": bwd,
    }


def matrix_to_json(m):
    return [[float(x) for x in row] for row in m]


def dist_to_json(d: Dist):
    return [float(x) for x in d.mass]


def channel_to_json(c: Channel, dom=None, cod=None):
    return {
        "dom": dom if dom is not None else finset_to_json(c.dom),
        "cod": cod if cod is not None else finset_to_json(c.cod),
        "matrix": matrix_to_json(c.matrix),
    }


def system_to_json(sys: GenSystem | PrioredGenSystem, iface=None, states=None):
    prior = None
    if isinstance(sys, PrioredGenSystem):
        prior = dist_to_json(sys.prior)
        sys = sys.system
    out = {
        "iface": iface if iface is not None else poly_to_json(sys.iface),
        "states": states if states is not None else finset_to_json(sys.states),
        "out": {s: sys.iface.positions[i] for s, i in zip(sys.states, sys.out)},
        "upd": matrix_to_json(sys.upd.matrix),
    }
    if prior is not None:
        out["prior"] = prior
    return out


def category_to_json(C: FinCategory):
    implied = set()
    for label, dom, cod in C.morphisms:
        implied.add((C.identities[dom], label))
        implied.add((label, C.identities[cod]))
    return {
        "objects": list(C.objects.elements),
        "morphisms": [list(m) for m in C.morphisms],
        "identities": dict(C.identities),
        "compose": sorted([g, f, h] for (g, f), h in C.compose.items() if (g, f) not in implied),
    }


def hom_to_json(h: HomPolynomial, with_lenses: bool = False):
    obj = {
        "source": poly_to_json(h.source),
        "target": poly_to_json(h.target),
        "n_positions": len(h),
        "direction_counts": list(h.underlying.dir_counts()),
        "polynomial": poly_to_json(h.underlying),
    }
    if with_lenses:
        obj["lenses"] = [
            {"fwd": lens.to_labels()[0], "bwd": lens.to_labels()[1]} for lens in h.position_lenses
        ]
    return obj
