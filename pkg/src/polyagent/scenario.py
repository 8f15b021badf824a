"""Scenario files: JSON declarations of sets, interfaces, models, agents and experiments.

Top-level keys (all optional except ``version``)::

    version        "polyagent/1"
    finsets        name -> [labels]
    polynomials    name -> {"monomial": [O, A]} | {"positions": X, "directions": {pos: X}}
                           | {"tensor": [p, q]} | {"category": C}
    lenses         name -> {"dom", "cod", "fwd": {pos: pos}, "bwd": {pos: {dir: dir}}}
                           | {"identity": p} | {"compose": [phi, psi]}
    channels       name -> {"dom": X, "cod": X, "matrix": rows}
    categories     name -> {"objects", "morphisms": [[label, dom, cod]], "identities", "compose": [[g, f, g;f]]}
    systems        name -> {"iface", "states", "out": {state: pos}, "upd": rows | "moore": [state], "prior"?}
    agents         name -> {"model", "preferences", "horizon", "controller"?}
    hier_agents    name -> manager data (see HierAgent)
    composites     name -> {"manager", "left", "right"}       (registered as agents)
    deep_chains    name -> {"levels": [agent, manager, ...]}   (registered as agents)
    groth_objects  name -> {"system"}
    experiments    name -> {"kind": unroll_exact | unroll_sample | simulate | plan | structure, ...}

Wherever a set is expected, either a declared name or an inline list is accepted.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .agent import (Agent, HierAgent, build_deep_chain, compose_hierarchy,
                    constant_controller, make_agent)
from .codec import canonical_dumps, category_to_json, matrix_to_json
from .errors import InvalidCategory, PolyAgentError
from .poly import (FinCategory, FinSet, Lens, Polynomial, Y, category_to_poly,
                   lens_compose, lens_identity, monomial, tensor_poly)
from .stoch import Channel, Dist
from .systems import GenSystem, PrioredGenSystem, moore_to_gen, MooreSystem

VERSION = "polyagent/1"

SECTIONS = ("finsets", "polynomials", "lenses", "channels", "categories", "systems",
            "agents", "hier_agents", "composites", "deep_chains", "groth_objects", "experiments")

EXPERIMENT_KINDS = ("unroll_exact", "unroll_sample", "simulate", "plan", "structure")


class ScenarioError(PolyAgentError):
    exit_code = 1

    def __init__(self, location, message):
        self.location = location
        super().__init__(f"{location}: {message}")


class ParseError(ScenarioError):
    exit_code = 2


class ScenarioReferenceError(ScenarioError):
    exit_code = 3


class InvariantViolation(ScenarioError):
    exit_code = 4


@dataclass
class Scenario:
    raw: dict
    source_hash: str
    finsets: dict[str, FinSet] = field(default_factory=dict)
    polynomials: dict[str, Polynomial] = field(default_factory=dict)
    lenses: dict[str, Lens] = field(default_factory=dict)
    channels: dict[str, Channel] = field(default_factory=dict)
    categories: dict[str, FinCategory] = field(default_factory=dict)
    systems: dict[str, GenSystem] = field(default_factory=dict)
    priors: dict[str, Dist] = field(default_factory=dict)
    agents: dict[str, Agent] = field(default_factory=dict)
    hier_agents: dict[str, HierAgent] = field(default_factory=dict)
    groth_objects: dict[str, Any] = field(default_factory=dict)
    experiments: dict[str, dict] = field(default_factory=dict)

    def priored(self, name, where="") -> PrioredGenSystem:
        if name not in self.systems:
            raise ScenarioReferenceError(where or name, f"unknown system {name!r}")
        if name not in self.priors:
            raise InvariantViolation(where or name, f"system {name!r} has no prior")
        return self.systems[name].with_prior(self.priors[name])

    def to_json(self) -> dict:
        """Canonical declaration dict; numeric data is re-emitted from validated objects."""
        out = json.loads(json.dumps(self.raw))
        for name, c in self.channels.items():
            out["channels"][name]["matrix"] = matrix_to_json(c.matrix)
        for name, sys in self.systems.items():
            decl = out["systems"][name]
            if "upd" in decl:
                decl["upd"] = matrix_to_json(sys.upd.matrix)
            if "prior" in decl:
                decl["prior"] = [float(x) for x in self.priors[name].mass]
        for name, C in self.categories.items():
            out["categories"][name] = category_to_json(C)
        return out

    def dumps(self) -> str:
        return canonical_dumps(self.to_json())


def _require(obj, key, where):
    if not isinstance(obj, dict):
        raise ParseError(where, "expected an object")
    if key not in obj:
        raise ParseError(where, f"missing required field {key!r}")
    return obj[key]


class _Loader:
    # sections whose entries may refer to each other in any order
    LAZY = ("polynomials", "lenses")

    def __init__(self, raw, scn: Scenario):
        self.raw = raw
        self.scn = scn
        self.building: set[tuple[str, str]] = set()

    def build(self, table, name):
        key = (table, name)
        where = f"{table}.{name}"
        if key in self.building:
            raise InvariantViolation(where, "cyclic definition")
        self.building.add(key)
        d = self.raw[table][name]
        if table == "polynomials":
            self.scn.polynomials[name] = self.poly(d, where)
        else:
            if not isinstance(d, dict):
                raise ParseError(where, "expected an object")
            self.scn.lenses[name] = self.lens(d, where)
        self.building.discard(key)

    # references
    def ref(self, table: str, name, where):
        pool = getattr(self.scn, table)
        if not isinstance(name, str):
            raise ParseError(where, f"expected a name, got {type(name).__name__}")
        if name not in pool and table in self.LAZY and name in self.raw.get(table, {}):
            self.build(table, name)
        if name not in pool:
            raise ScenarioReferenceError(where, f"undeclared {table[:-1]} {name!r}")
        return pool[name]

    def finset(self, obj, where) -> FinSet:
        if isinstance(obj, str):
            return self.ref("finsets", obj, where)
        if isinstance(obj, list):
            return self.guard(where, lambda: FinSet(tuple(obj)))
        raise ParseError(where, "expected a set name or a list of labels")

    def poly(self, obj, where) -> Polynomial:
        if obj == "y":
            return Y
        if isinstance(obj, str):
            return self.ref("polynomials", obj, where)
        if isinstance(obj, dict):
            return self.poly_decl(obj, where)
        raise ParseError(where, "expected a polynomial name or declaration")

    def guard(self, where, thunk):
        try:
            return thunk()
        except ScenarioError:
            raise
        except KeyError as exc:
            raise InvariantViolation(where, f"missing or unknown label {exc.args[0]!r}") from None
        except (PolyAgentError, ValueError, IndexError) as exc:
            raise InvariantViolation(where, str(exc).strip("'\"")) from None

    def dist(self, obj, carrier: FinSet, where) -> Dist:
        if isinstance(obj, dict):
            vals = [float(obj.get(x, 0.0)) for x in carrier]
            unknown = set(obj) - set(carrier)
            if unknown:
                raise ScenarioReferenceError(where, f"unknown labels {sorted(unknown)}")
        elif isinstance(obj, list):
            vals = obj
        else:
            raise ParseError(where, "expected a list of masses or a label->mass object")
        return self.guard(where, lambda: Dist(carrier, np.array(vals, dtype=float)))

    def matrix(self, obj, where):
        if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
            raise ParseError(where, "expected a list of rows")
        try:
            return np.array(obj, dtype=float).reshape(len(obj), -1) if obj else np.zeros((0, 0))
        except (ValueError, TypeError):
            raise ParseError(where, "matrix rows must be equal-length lists of numbers") from None

    # sections
    def poly_decl(self, d, where) -> Polynomial:
        if "monomial" in d:
            O, A = d["monomial"]
            return monomial(self.finset(O, f"{where}.monomial[0]"), self.finset(A, f"{where}.monomial[1]"))
        if "tensor" in d:
            ps = [self.poly(x, f"{where}.tensor[{k}]") for k, x in enumerate(d["tensor"])]
            out = ps[0]
            for q in ps[1:]:
                out = tensor_poly(out, q)
            return out
        if "category" in d:
            C = self.ref("categories", d["category"], f"{where}.category")
            return self.guard(where, lambda: category_to_poly(C))
        positions = self.finset(_require(d, "positions", where), f"{where}.positions")
        dirs = _require(d, "directions", where)
        if not isinstance(dirs, dict):
            raise ParseError(f"{where}.directions", "expected an object keyed by position")
        missing = [x for x in positions if x not in dirs]
        if missing:
            raise InvariantViolation(f"{where}.directions", f"no directions for positions {missing}")
        extra = [x for x in dirs if x not in positions]
        if extra:
            raise ScenarioReferenceError(f"{where}.directions", f"unknown positions {extra}")
        return Polynomial(positions, tuple(
            self.finset(dirs[x], f"{where}.directions.{x}") for x in positions))

    def lens(self, d, where) -> Lens:
        if "identity" in d:
            return lens_identity(self.poly(d["identity"], f"{where}.identity"))
        if "compose" in d:
            a, b = (self.ref("lenses", x, f"{where}.compose") for x in d["compose"])
            return self.guard(where, lambda: lens_compose(a, b))
        dom = self.poly(_require(d, "dom", where), f"{where}.dom")
        cod = self.poly(_require(d, "cod", where), f"{where}.cod")
        fwd = _require(d, "fwd", where)
        bwd = d.get("bwd", {})
        return self.guard(where, lambda: Lens.from_labels(dom, cod, fwd, bwd))

    def category(self, d, where) -> FinCategory:
        objects = self.finset(_require(d, "objects", where), f"{where}.objects")
        morphisms = _require(d, "morphisms", where)
        ids = _require(d, "identities", where)
        comp = {}
        for k, entry in enumerate(d.get("compose", [])):
            if not (isinstance(entry, list) and len(entry) == 3):
                raise ParseError(f"{where}.compose[{k}]", "expected [first, second, composite]")
            comp[(entry[0], entry[1])] = entry[2]
        C = self.guard(where, lambda: FinCategory(objects, tuple(tuple(m) for m in morphisms), ids, comp))
        try:
            C.check_laws()
        except InvalidCategory as exc:
            raise InvariantViolation(where, str(exc)) from None
        return C

    def system(self, name, d, where):
        iface = self.poly(_require(d, "iface", where), f"{where}.iface")
        states = self.finset(_require(d, "states", where), f"{where}.states")
        out_decl = _require(d, "out", where)
        if isinstance(out_decl, dict):
            missing = [s for s in states if s not in out_decl]
            if missing:
                raise InvariantViolation(f"{where}.out", f"output undefined on states {missing}")
            out_labels = [out_decl[s] for s in states]
        else:
            out_labels = list(out_decl)
        out = []
        for k, lab in enumerate(out_labels):
            if lab not in iface.positions:
                raise ScenarioReferenceError(f"{where}.out", f"unknown position {lab!r}")
            out.append(iface.positions.index(lab))
        if "moore" in d:
            upd = [self.guard(f"{where}.moore", lambda s=s: states.index(s)) for s in d["moore"]]
            sys = self.guard(where, lambda: moore_to_gen(MooreSystem(iface, states, tuple(out), tuple(upd))))
        else:
            m = self.matrix(_require(d, "upd", where), f"{where}.upd")
            sys = self.guard(f"{where}.upd", lambda: GenSystem.build(iface, states, out, m))
        self.scn.systems[name] = sys
        if "prior" in d:
            self.scn.priors[name] = self.dist(d["prior"], states, f"{where}.prior")

    def agent(self, name, d, where) -> Agent:
        model_name = _require(d, "model", where)
        model = self.scn.priored(model_name, f"{where}.model")
        prefs = self.dist(_require(d, "preferences", where), model.iface.positions, f"{where}.preferences")
        horizon = int(d.get("horizon", 1))
        ctrl_decl = d.get("controller", "efe")
        controller = None
        if isinstance(ctrl_decl, dict) and "constant" in ctrl_decl:
            table = ctrl_decl["constant"]
            p = model.iface
            full = [self.guard(f"{where}.controller", lambda i=i: p[i].index(table[p.positions[i]]))
                    if len(p[i]) else -1 for i in range(len(p))]
            controller = constant_controller(model, full)
        elif ctrl_decl != "efe":
            raise ParseError(f"{where}.controller", "expected \"efe\" or {\"constant\": {...}}")
        return self.guard(where, lambda: make_agent(model, prefs, horizon, controller, name))

    def hier(self, name, d, where) -> HierAgent:
        sets = {k: self.finset(_require(d, k, where), f"{where}.{k}") for k in
                ("states", "B", "C", "D", "E", "O", "A")}

        def table(key, cod, optional=False):
            if optional and d.get(key) is None:
                return None
            labels = _require(d, key, where)
            if not isinstance(labels, list):
                raise ParseError(f"{where}.{key}", "expected a list of labels")
            return tuple(self.guard(f"{where}.{key}[{k}]", lambda lab=lab: cod.index(lab))
                         for k, lab in enumerate(labels))

        S = sets["states"]
        nS, nB, nD, nA = (len(sets[k]) for k in ("states", "B", "D", "A"))
        trans_dom = FinSet.range(nS * nB * nD * nA, "sbda")
        trans = self.guard(f"{where}.trans", lambda: Channel(
            trans_dom, S, self.matrix(_require(d, "trans", where), f"{where}.trans")))
        prior = self.dist(_require(d, "prior", where), S, f"{where}.prior")
        prefs = self.dist(d["preferences"], sets["O"], f"{where}.preferences") if "preferences" in d else None
        return self.guard(where, lambda: HierAgent(
            S, sets["B"], sets["C"], sets["D"], sets["E"], sets["O"], sets["A"],
            like=table("like", sets["O"]),
            act_left=table("act_left", sets["C"]),
            act_right=table("act_right", sets["E"]),
            trans=trans, prior=prior,
            gen_left_table=table("gen_left", sets["B"], optional=True),
            gen_right_table=table("gen_right", sets["D"], optional=True),
            preferences=prefs, horizon=int(d.get("horizon", 1)), name=name,
        ))

    def experiment(self, name, d, where):
        kind = _require(d, "kind", where)
        if kind not in EXPERIMENT_KINDS:
            raise ParseError(f"{where}.kind", f"unknown experiment kind {kind!r}")
        if kind in ("unroll_exact", "unroll_sample"):
            self.scn.priored(_require(d, "system", where), f"{where}.system")
        elif kind in ("simulate", "plan"):
            self.ref("agents", _require(d, "agent", where), f"{where}.agent")
            if d.get("env") is not None:
                self.scn.priored(d["env"], f"{where}.env")
        elif kind == "structure":
            for k, obj in enumerate(_require(d, "objects", where)):
                self.ref("groth_objects", obj, f"{where}.objects[{k}]")
        for key in ("T", "n", "horizon", "episodes"):
            if key in d and (not isinstance(d[key], int) or d[key] < 0):
                raise InvariantViolation(f"{where}.{key}", "expected a non-negative integer")
        return dict(d)

    def run(self):
        raw = self.raw
        scn = self.scn
        for sec, entries in raw.items():
            if sec == "version":
                continue
            if sec not in SECTIONS:
                raise ParseError(sec, "unknown top-level section")
            if not isinstance(entries, dict):
                raise ParseError(sec, "expected an object of named declarations")
        for name, elems in raw.get("finsets", {}).items():
            where = f"finsets.{name}"
            if not isinstance(elems, list):
                raise ParseError(where, "expected a list of labels")
            scn.finsets[name] = self.guard(where, lambda: FinSet(tuple(elems), name))
        for name, d in raw.get("categories", {}).items():
            scn.categories[name] = self.category(d, f"categories.{name}")
        for table in self.LAZY:
            for name in raw.get(table, {}):
                if name not in getattr(scn, table):
                    self.build(table, name)
        for name, d in raw.get("channels", {}).items():
            where = f"channels.{name}"
            dom = self.finset(_require(d, "dom", where), f"{where}.dom")
            cod = self.finset(_require(d, "cod", where), f"{where}.cod")
            m = self.matrix(_require(d, "matrix", where), f"{where}.matrix")
            scn.channels[name] = self.guard(f"{where}.matrix", lambda: Channel(dom, cod, m))
        for name, d in raw.get("systems", {}).items():
            self.system(name, d, f"systems.{name}")
        for name, d in raw.get("agents", {}).items():
            scn.agents[name] = self.agent(name, d, f"agents.{name}")
        for name, d in raw.get("hier_agents", {}).items():
            scn.hier_agents[name] = self.hier(name, d, f"hier_agents.{name}")
        for name, d in raw.get("composites", {}).items():
            where = f"composites.{name}"
            mgr = self.ref("hier_agents", _require(d, "manager", where), f"{where}.manager")
            left = self.ref("agents", _require(d, "left", where), f"{where}.left")
            right = self.ref("agents", _require(d, "right", where), f"{where}.right")
            scn.agents[name] = self.guard(where, lambda: compose_hierarchy(mgr, left, right, name))
        for name, d in raw.get("deep_chains", {}).items():
            where = f"deep_chains.{name}"
            levels = _require(d, "levels", where)
            resolved = [self.ref("agents", levels[0], f"{where}.levels[0]")]
            resolved += [self.ref("hier_agents", x, f"{where}.levels[{k}]")
                         for k, x in enumerate(levels[1:], start=1)]
            scn.agents[name] = self.guard(where, lambda: build_deep_chain(resolved))
        from .meta import GrothObject
        for name, d in raw.get("groth_objects", {}).items():
            where = f"groth_objects.{name}"
            sys = self.ref("systems", _require(d, "system", where), f"{where}.system")
            scn.groth_objects[name] = GrothObject(sys.iface, sys, name)
        for name, d in raw.get("experiments", {}).items():
            scn.experiments[name] = self.experiment(name, d, f"experiments.{name}")
        return scn


def loads(text: str | bytes) -> Scenario:
    data = text.encode() if isinstance(text, str) else text
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    if not isinstance(raw, dict):
        raise ParseError("<root>", "expected a JSON object")
    if raw.get("version") != VERSION:
        raise ParseError("version", f"expected {VERSION!r}, got {raw.get('version')!r}")
    scn = Scenario(raw=raw, source_hash=hashlib.sha256(data).hexdigest())
    return _Loader(raw, scn).run()


def load(path: str | Path) -> Scenario:
    return loads(Path(path).read_bytes())


def bundled(name: str) -> Path:
    """Path of a scenario shipped with the package."""
    return Path(__file__).parent / "scenarios" / f"{name}.json"


def bundled_names() -> list[str]:
    return sorted(p.stem for p in (Path(__file__).parent / "scenarios").glob("*.json"))
