"""Command-line front end.

Every command prints a JSON run report on stdout; human-readable messages go
to stderr.  Exit codes:

    0  success
    1  a law or check failed
    2  parse error (malformed JSON, unknown field, unreadable file)
    3  reference error (undeclared name)
    4  invariant violation (bad distribution, non-total map, ...)
    5  size guard exceeded
    6  any other error raised while running an experiment
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, config
from .agent import (_efe_decide, belief_payload, build_deep_chain, compose_hierarchy,
                    condition, make_agent, plan, simulate_episode)
from .codec import canonical_dumps, hom_to_json, system_to_json
from .errors import PolyAgentError, SizeGuardExceeded
from .hom import count_lenses, internal_hom
from .laws import DEFAULT_SIZES, run_all
from .meta import (check_groth_category, morphism_tables, structure_agent_interface,
                   structure_system)
from .poly import parse_poly
from .scenario import ParseError, ScenarioError, ScenarioReferenceError, load
from .stoch import Dist
from .systems import closed_unroll_batch, closed_unroll_exact, empirical_marginals

EXIT_FAIL = 1
EXIT_GUARD = 5
EXIT_MODULE = 6


class Report:
    """Accumulates the machine-readable outcome of one command."""

    def __init__(self, command, scenario=None, seed=None):
        self.data = {"command": command, "scenario_hash": scenario.source_hash if scenario else None,
                     "seed": seed, "checks": [], "artifacts": []}

    def check(self, name, passed, residual=None, **extra):
        entry = {"name": name, "passed": bool(passed)}
        if residual is not None:
            entry["residual"] = float(residual)
        entry.update(extra)
        self.data["checks"].append(entry)
        return passed

    @property
    def ok(self):
        return all(c["passed"] for c in self.data["checks"])

    def dumps(self):
        return canonical_dumps({**self.data, "ok": self.ok})


def write_atomic(path: str | Path, text: str):
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _load(path):
    try:
        return load(path)
    except OSError as exc:
        raise ParseError(str(path), f"cannot read scenario: {exc.strerror}") from None


def _seed(args, exp):
    if args.seed is not None:
        return args.seed
    return int(exp.get("seed", 0))


# -- validate ----------------------------------------------------------------

def cmd_validate(args) -> Report:
    scn = _load(args.scenario)
    rep = Report("validate", scn)
    counts = {sec: len(getattr(scn, sec)) for sec in (
        "finsets", "polynomials", "lenses", "channels", "categories", "systems",
        "agents", "hier_agents", "groth_objects", "experiments")}
    rep.check("load", True, declarations=counts)
    text = scn.dumps()
    again = load_text_roundtrip(text)
    rep.check("canonical_round_trip", again == text)
    return rep


def load_text_roundtrip(text: str) -> str:
    from .scenario import loads
    return loads(text).dumps()


# -- check-laws --------------------------------------------------------------

def _parse_sizes(items):
    sizes = {}
    for item in items or []:
        key, _, val = item.partition("=")
        if key not in DEFAULT_SIZES or not val.isdigit():
            raise ParseError("--sizes", f"expected one of {sorted(DEFAULT_SIZES)} as key=int, got {item!r}")
        sizes[key] = int(val)
    return sizes


def cmd_check_laws(args) -> Report:
    scn = _load(args.scenario) if args.scenario else None
    seed = args.random if args.random is not None else 0
    rep = Report("check-laws", scn, seed)
    for res in run_all(seed, _parse_sizes(args.sizes), scn):
        extra = {"instances": res.instances, "tolerance": res.tolerance}
        if res.skipped:
            extra["skipped"] = res.skipped
        rep.check(res.name, res.passed, res.residual, **extra)
        if not res.passed:
            print(f"law {res.name} failed: residual {res.residual}", file=sys.stderr)
    return rep


# -- hom ---------------------------------------------------------------------

def _resolve_poly(name, scn):
    if scn is not None and name in scn.polynomials:
        return scn.polynomials[name]
    try:
        return parse_poly(name)
    except ValueError as exc:
        if scn is not None:
            raise ScenarioReferenceError(name, f"not a declared polynomial or expression ({exc})") from None
        raise ParseError(name, str(exc)) from None


def cmd_hom(args) -> Report:
    scn = _load(args.scenario) if args.scenario else None
    p, q = _resolve_poly(args.p, scn), _resolve_poly(args.q, scn)
    rep = Report("hom", scn)
    limit = config.guard(config.LENS_GUARD)
    n = count_lenses(p, q)
    if n > limit:
        raise SizeGuardExceeded(f"[{p}, {q}]", n, limit)
    h = internal_hom(p, q)
    body = hom_to_json(h, with_lenses=args.enumerate)
    rep.check("hom", True, n_positions=len(h), polynomial=str(h.underlying))
    if args.out:
        write_atomic(args.out, canonical_dumps(body) + "\n")
        rep.data["artifacts"].append(str(args.out))
    else:
        rep.data["hom"] = body
    return rep


# -- simulate ----------------------------------------------------------------

def _episode_lines(agent, env, T, seed, episodes, extra=None):
    p = env.iface
    states = env.states
    for ep in range(episodes):
        for r in simulate_episode(agent, env, T, seed, index=ep):
            rec = {
                "episode": ep,
                "step": r.step,
                "env_state": states[r.env_state],
                "position": p.positions[r.position],
                "direction": None if r.direction is None else p[r.position][r.direction],
                "belief": belief_payload(r.belief),
                "policy_index": r.policy_index,
                "G": r.G,
            }
            if extra:
                rec.update(extra)
            yield rec


def _typed_ok(lines, p):
    ok = True
    for rec in lines:
        if rec["direction"] is not None:
            k = p.positions.index(rec["position"])
            ok &= rec["direction"] in p[k]
    return ok


def run_experiment(scn, name, seed, rep: Report) -> list[dict]:
    exp = scn.experiments[name]
    kind = exp["kind"]
    T = int(exp.get("T", 1))
    if kind == "unroll_exact":
        ps = scn.priored(exp["system"])
        lines = []
        for t, d in enumerate(closed_unroll_exact(ps, T)):
            lines.append({"t": t, "state": ps.states[d.argmax()], "marginal": [float(x) for x in d.mass]})
        worst = max(abs(sum(r["marginal"]) - 1.0) for r in lines)
        rep.check("marginals_normalized", worst <= config.EPS_NORM, worst)
        return lines
    if kind == "unroll_sample":
        ps = scn.priored(exp["system"])
        n = int(exp.get("n", 1))
        traj = closed_unroll_batch(ps, T, seed, n)
        exact = np.stack([d.mass for d in closed_unroll_exact(ps, T)])
        emp = empirical_marginals(traj, len(ps.states))
        tv = float(0.5 * np.abs(emp - exact).sum(axis=1).max())
        rep.check("empirical_vs_exact_tv", True, tv)
        return [{"trajectory": k, "t": t, "state": ps.states[int(s)]}
                for k in range(n) for t, s in enumerate(traj[k])]
    if kind == "simulate":
        agent = scn.agents[exp["agent"]]
        env = scn.priored(exp["env"]) if exp.get("env") else agent.model
        lines = list(_episode_lines(agent, env, T, seed, int(exp.get("episodes", 1))))
        rep.check("typed_actions", _typed_ok(lines, env.iface), records=len(lines))
        return lines
    if kind == "plan":
        agent = scn.agents[exp["agent"]]
        belief = agent.model.prior
        position = agent.iface.positions.index(exp["position"]) if "position" in exp \
            else agent.model.system.out[belief.argmax()]
        rows = plan(agent, belief, position, exp.get("horizon"))
        return [_plan_row(agent, k, r) for k, r in enumerate(rows)]
    if kind == "structure":
        objs = [scn.groth_objects[o] for o in exp["objects"]]
        tables = morphism_tables(objs)
        for law, res in check_groth_category(objs, tables).items():
            rep.check(f"groth.{law}", res <= config.EPS_STRICT, res)
        sysm = structure_system(objs, tables)
        env = sysm.with_prior(Dist.uniform(sysm.states))
        agent = make_agent(env, Dist.uniform(sysm.iface.positions), horizon=1, name="structure")
        rep.data["structure_interface"] = str(structure_agent_interface(objs, tables))
        lines = list(_episode_lines(agent, env, T, seed, int(exp.get("episodes", 1))))
        rep.check("typed_actions", _typed_ok(lines, env.iface), records=len(lines))
        return lines
    raise ParseError(f"experiments.{name}.kind", f"unknown kind {kind!r}")


def cmd_simulate(args) -> Report:
    scn = _load(args.scenario)
    if args.experiment not in scn.experiments:
        raise ScenarioReferenceError(args.experiment, "no such experiment")
    exp = scn.experiments[args.experiment]
    seed = _seed(args, exp)
    rep = Report("simulate", scn, seed)
    rep.data["experiment"] = args.experiment
    try:
        lines = run_experiment(scn, args.experiment, seed, rep)
    except (ScenarioError, SizeGuardExceeded):
        raise
    except PolyAgentError as exc:
        raise ModuleFailure(exc) from exc
    out = args.out or f"{args.experiment}.jsonl"
    write_atomic(out, "".join(canonical_dumps(r) + "\n" for r in lines))
    rep.data["artifacts"].append(str(out))
    rep.data["records"] = len(lines)
    return rep


class ModuleFailure(Exception):
    def __init__(self, exc):
        self.exc = exc
        super().__init__(f"{type(exc).__name__}: {exc}")


# -- plan --------------------------------------------------------------------

def _plan_row(agent, rank, row):
    return {"rank": rank, "index": row.index, "policy": row.policy.render(agent.iface), "G": row.G}


def _belief(arg, carrier, default):
    if arg is None:
        return default
    try:
        val = json.loads(arg)
    except json.JSONDecodeError as exc:
        raise ParseError("--belief", exc.msg) from None
    if isinstance(val, dict):
        unknown = set(val) - set(carrier)
        if unknown:
            raise ScenarioReferenceError("--belief", f"unknown states {sorted(unknown)}")
        val = [float(val.get(x, 0.0)) for x in carrier]
    return Dist(carrier, np.asarray(val, dtype=float))


def cmd_plan(args) -> Report:
    scn = _load(args.scenario)
    if args.agent not in scn.agents:
        raise ScenarioReferenceError(args.agent, "no such agent")
    agent = scn.agents[args.agent]
    p = agent.iface
    belief = _belief(args.belief, agent.model.states, agent.model.prior)
    if args.position is None:
        # default: the position emitted by the most probable state
        position = agent.model.system.out[belief.argmax()]
    elif args.position in p.positions:
        position = p.positions.index(args.position)
    else:
        raise ScenarioReferenceError("--position", f"unknown position {args.position!r}")
    H = agent.horizon if args.horizon is None else args.horizon
    rep = Report("plan", scn)
    rows = plan(agent, belief, position, H)
    rep.data["policies"] = [_plan_row(agent, k, r) for k, r in enumerate(rows)]
    if rows:
        post = condition(agent.model.system, belief, position)
        chosen = _efe_decide(agent.model.system, agent.preferences, H, post, position).direction
        rep.check("winner_matches_select_action", rows[0].policy.steps[0][position] == chosen)
    return rep


# -- compose -----------------------------------------------------------------

def cmd_compose(args) -> Report:
    scn = _load(args.scenario)
    rep = Report("compose", scn)
    if args.chain:
        names = args.chain.split(",")
        levels = [scn.agents[names[0]]] + [scn.hier_agents[n] for n in names[1:]] \
            if names[0] in scn.agents and all(n in scn.hier_agents for n in names[1:]) else None
        if levels is None:
            raise ScenarioReferenceError("--chain", f"unresolvable levels {names}")
        agent = build_deep_chain(levels)
    else:
        missing = [n for n, pool in ((args.manager, scn.hier_agents), (args.left, scn.agents),
                                     (args.right, scn.agents)) if n not in pool]
        if missing:
            raise ScenarioReferenceError("compose", f"undeclared {missing}")
        agent = compose_hierarchy(scn.hier_agents[args.manager], scn.agents[args.left],
                                  scn.agents[args.right])
    name = args.name
    fragment = {
        "version": "polyagent/1",
        "systems": {f"{name}_model": system_to_json(agent.model)},
        "agents": {name: {
            "model": f"{name}_model",
            "preferences": [float(x) for x in agent.preferences.mass],
            "horizon": agent.horizon,
        }},
    }
    rep.check("composite", True, states=len(agent.model.states), interface=str(agent.iface))
    if args.out:
        write_atomic(args.out, canonical_dumps(fragment) + "\n")
        rep.data["artifacts"].append(str(args.out))
    else:
        rep.data["fragment"] = fragment
    return rep


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyagent", description="Compositional active-inference engine.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--report", help="also write the run report to this file")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="parse and check a scenario")
    sp.add_argument("scenario")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("check-laws", help="run the algebraic law suites")
    sp.add_argument("scenario", nargs="?", help="include the scenario's declared objects")
    sp.add_argument("--random", type=int, metavar="SEED", help="seed for random instances (default 0)")
    sp.add_argument("--sizes", nargs="*", metavar="KEY=N",
                    help=f"instance counts; keys: {', '.join(DEFAULT_SIZES)}")
    sp.set_defaults(func=cmd_check_laws)

    sp = sub.add_parser("hom", help="compute the internal hom [p, q]")
    sp.add_argument("p", help="declared polynomial name or expression like 2y^3+1")
    sp.add_argument("q")
    sp.add_argument("--scenario")
    sp.add_argument("--enumerate", action="store_true", help="include the lens behind each position")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_hom)

    sp = sub.add_parser("simulate", help="run an experiment and write JSONL records")
    sp.add_argument("scenario")
    sp.add_argument("experiment")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="JSONL path (default <experiment>.jsonl)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("plan", help="rank an agent's policies by expected free energy")
    sp.add_argument("scenario")
    sp.add_argument("agent")
    sp.add_argument("--belief", help="JSON list or label->mass object (default: model prior)")
    sp.add_argument("--position", help="observed position label (default: emitted by the most probable state)")
    sp.add_argument("--horizon", type=int)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("compose", help="flatten a composite agent into a scenario fragment")
    sp.add_argument("scenario")
    sp.add_argument("--manager")
    sp.add_argument("--left")
    sp.add_argument("--right")
    sp.add_argument("--chain", help="comma-separated: bottom agent, then managers")
    sp.add_argument("--name", default="composite")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_compose)
    return ap


def _error_report(args, code, exc):
    data = {"command": getattr(args, "command", None), "ok": False, "exit_code": code,
            "error": {"type": type(exc).__name__, "message": str(exc)}}
    loc = getattr(exc, "location", None)
    if loc is not None:
        data["error"]["location"] = loc
    if isinstance(exc, SizeGuardExceeded):
        data["error"]["cardinality"] = exc.cardinality
        data["error"]["guard"] = exc.guard
    return canonical_dumps(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "compose" and not args.chain and not (args.manager and args.left and args.right):
        print("compose needs --chain or all of --manager/--left/--right", file=sys.stderr)
        return 2
    try:
        rep = args.func(args)
    except ScenarioError as exc:
        code, err = exc.exit_code, exc
    except SizeGuardExceeded as exc:
        code, err = EXIT_GUARD, exc
    except ModuleFailure as exc:
        code, err = EXIT_MODULE, exc.exc
    except PolyAgentError as exc:
        code, err = EXIT_MODULE, exc
    else:
        text = rep.dumps()
        print(text)
        if args.report:
            write_atomic(args.report, text + "\n")
        if not rep.ok:
            print("some checks failed", file=sys.stderr)
        return 0 if rep.ok else EXIT_FAIL
    print(f"error: {err}", file=sys.stderr)
    print(_error_report(args, code, err))
    return code


if __name__ == "__main__":
    sys.exit(main())
