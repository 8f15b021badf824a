"""Law-checking suites over random and declared instances.

Each suite returns a :class:`LawResult` carrying the worst residual seen.
Table-valued laws (lenses, rewiring) report 0.0 on exact equality and
``inf`` on any mismatch.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import config
from .agent import make_agent, simulate_episode
from .errors import SizeGuardExceeded
from .generators import (random_channel, random_dist, random_lens, random_polynomial,
                         random_system)
from .hom import curry, dual, enumerate_lenses, eval_lens, internal_compose, internal_hom, uncurry
from .poly import (FinSet, Polynomial, Y, lens_compose, lens_identity, monomial, swap_lens,
                   tensor_lens, tensor_poly)
from .stoch import Channel, bayes_posterior, channel_compose, channel_tensor, dirac_channel
from .systems import GenSystem, check_system_morphism, gen_parallel, gen_rewire, trivial_system

INF = float("inf")


@dataclass
class LawResult:
    name: str
    passed: bool
    residual: float
    instances: int
    tolerance: float = 0.0
    skipped: str | None = None
    notes: list[str] = field(default_factory=list)

    def as_json(self):
        out = {"law": self.name, "passed": self.passed, "residual": self.residual,
               "instances": self.instances, "tolerance": self.tolerance}
        if self.skipped:
            out["skipped"] = self.skipped
        return out


def _result(name, residual, n, tol=0.0):
    return LawResult(name, residual <= tol, residual, n, tol)


def _exact(a, b) -> float:
    return 0.0 if a == b else INF


DEFAULT_SIZES = {"lens_triples": 200, "channels": 100, "systems": 100, "filter_models": 20}


def small_polys():
    two = monomial(FinSet(("a", "b")), FinSet(("*",)))
    y2_1 = Polynomial.from_dict({"u": ["l", "r"], "v": []})
    return {"y": Y, "2y": two, "y^2+1": y2_1}


def _lens_triple(rng):
    while True:
        p, q, r, s = (random_polynomial(rng) for _ in range(4))
        phi, psi, chi = random_lens(rng, p, q), random_lens(rng, q, r), random_lens(rng, r, s)
        if phi and psi and chi:
            return phi, psi, chi


def lens_category(rng, n) -> list[LawResult]:
    assoc = unit = 0.0
    for _ in range(n):
        phi, psi, chi = _lens_triple(rng)
        assoc = max(assoc, _exact(lens_compose(lens_compose(phi, psi), chi),
                                  lens_compose(phi, lens_compose(psi, chi))))
        unit = max(unit, _exact(lens_compose(lens_identity(phi.dom), phi), phi),
                   _exact(lens_compose(phi, lens_identity(phi.cod)), phi))
    return [_result("lens.associativity", assoc, n), _result("lens.unit", unit, n)]


def tensor_laws(rng, n) -> list[LawResult]:
    func = sym = 0.0
    for _ in range(n):
        p, p2, p3 = (random_polynomial(rng, 2, 2) for _ in range(3))
        q, q2, q3 = (random_polynomial(rng, 2, 2) for _ in range(3))
        a, a2 = random_lens(rng, p, p2), random_lens(rng, p2, p3)
        b, b2 = random_lens(rng, q, q2), random_lens(rng, q2, q3)
        if not (a and a2 and b and b2):
            continue
        func = max(func, _exact(tensor_lens(lens_compose(a, a2), lens_compose(b, b2)),
                                lens_compose(tensor_lens(a, b), tensor_lens(a2, b2))),
                   _exact(tensor_lens(lens_identity(p), lens_identity(q)),
                          lens_identity(tensor_poly(p, q))))
        sym = max(sym, _exact(lens_compose(swap_lens(p, q), swap_lens(q, p)),
                              lens_identity(tensor_poly(p, q))))
    return [_result("tensor.functoriality", func, n), _result("tensor.symmetry", sym, n)]


def adjunction(polys=None) -> list[LawResult]:
    polys = polys or small_polys()
    card = trip = tri = 0.0
    count = 0
    for p, q, r in itertools.product(polys.values(), repeat=3):
        h = internal_hom(q, r)
        left = enumerate_lenses(tensor_poly(p, q), r)
        right = enumerate_lenses(p, h.underlying)
        card = max(card, _exact(len(left), len(right)))
        for phi in left:
            trip = max(trip, _exact(uncurry(curry(phi, p, q, h), h), phi))
        for psi in right:
            trip = max(trip, _exact(curry(uncurry(psi, h), p, q, h), psi))
        count += 1
    for q, r in itertools.product(polys.values(), repeat=2):
        h = internal_hom(q, r)
        tri = max(tri, _exact(curry(eval_lens(q, r, h), h.underlying, q, h), lens_identity(h.underlying)))
    return [_result("adjunction.cardinality", card, count),
            _result("adjunction.round_trip", trip, count),
            _result("adjunction.eval_triangle", tri, len(polys) ** 2)]


def internal_composition() -> list[LawResult]:
    two = small_polys()["2y"]
    h = internal_hom(two, two)
    mu = internal_compose(two, two, two, (h, h, h))
    res = 0.0
    lenses = h.position_lenses
    for a, b, c in itertools.product(range(len(h)), repeat=3):
        ab = mu.fwd[a * len(h) + b]
        left = mu.fwd[ab * len(h) + c]
        bc = mu.fwd[b * len(h) + c]
        right = mu.fwd[a * len(h) + bc]
        res = max(res, _exact(left, right),
                  _exact(lenses[left], lens_compose(lens_compose(lenses[a], lenses[b]), lenses[c])))
    ident = h.position_of(lens_identity(two))
    unit = max(_exact(mu.fwd[ident * len(h) + a], a) for a in range(len(h)))
    return [_result("internal_compose.associativity", res, len(h) ** 3),
            _result("internal_compose.unit", unit, len(h))]


def dual_shape(max_size=3) -> list[LawResult]:
    res = 0.0
    n = 0
    for no, na in itertools.product(range(1, max_size + 1), repeat=2):
        p = monomial(FinSet.range(no, "o"), FinSet.range(na, "a"))
        d = dual(p)
        res = max(res, _exact(len(d), na ** no), _exact(len(enumerate_lenses(p, Y)), na ** no),
                  _exact(set(d.underlying.dir_counts()), {no}))
        n += 1
    return [_result("dual.shape", res, n)]


def channel_laws(rng, n) -> list[LawResult]:
    assoc = unit = inter = 0.0
    tol = config.EPS_STRICT
    for _ in range(n):
        sets = [FinSet.range(int(k), "x") for k in rng.integers(1, 7, size=4)]
        f, g, h = (random_channel(rng, sets[k], sets[k + 1]) for k in range(3))
        assoc = max(assoc, channel_compose(channel_compose(f, g), h).residual(
            channel_compose(f, channel_compose(g, h))))
        unit = max(unit, channel_compose(Channel.identity(f.dom), f).residual(f),
                   channel_compose(f, Channel.identity(f.cod)).residual(f))
        X2, Y2, Z2 = (FinSet.range(int(k), "y") for k in rng.integers(1, 4, size=3))
        X1, Y1, Z1 = (FinSet.range(int(k), "z") for k in rng.integers(1, 4, size=3))
        q1, q2 = random_channel(rng, X1, Y1), random_channel(rng, Y1, Z1)
        r1, r2 = random_channel(rng, X2, Y2), random_channel(rng, Y2, Z2)
        inter = max(inter, channel_tensor(channel_compose(q1, q2), channel_compose(r1, r2)).residual(
            channel_compose(channel_tensor(q1, r1), channel_tensor(q2, r2))))
    return [_result("channel.associativity", assoc, n, tol), _result("channel.unit", unit, n, tol),
            _result("channel.interchange", inter, n, tol)]


def joint_condition_oracle(prior: np.ndarray, like: np.ndarray, obs: int) -> np.ndarray:
    """Condition by building the full joint table and renormalizing the observed column."""
    nS, nO = like.shape
    joint = {}
    for s in range(nS):
        for o in range(nO):
            joint[(s, o)] = prior[s] * like[s, o]
    z = sum(v for (s, o), v in joint.items() if o == obs)
    return np.array([joint[(s, obs)] / z for s in range(nS)])


def bayes_laws(rng, n) -> list[LawResult]:
    res = 0.0
    for _ in range(n):
        S = FinSet.range(int(rng.integers(1, 6)), "s")
        O = FinSet.range(int(rng.integers(1, 6)), "o")
        prior, like = random_dist(rng, S), random_channel(rng, S, O)
        obs = int(rng.integers(0, len(O)))
        post = bayes_posterior(prior, like, obs)
        res = max(res, float(np.max(np.abs(post.mass - joint_condition_oracle(prior.mass, like.matrix, obs)))))
    return [_result("bayes.joint_oracle", res, n, config.EPS_STRICT)]


def _rewire_instance(rng):
    while True:
        p, q, r = (random_polynomial(rng) for _ in range(3))
        phi, psi = random_lens(rng, p, q), random_lens(rng, q, r)
        if phi and psi:
            return p, phi, psi, random_system(rng, p, int(rng.integers(1, 5)))


def gen_laws(rng, n) -> list[LawResult]:
    func = ident = pres = 0.0
    for _ in range(n):
        p, phi, psi, sys = _rewire_instance(rng)
        a = gen_rewire(lens_compose(phi, psi), sys)
        b = gen_rewire(psi, gen_rewire(phi, sys))
        func = max(func, 0.0 if a.equals(b) else INF)
        ident = max(ident, 0.0 if gen_rewire(lens_identity(p), sys).equals(sys) else INF)
        # a state-merging morphism: duplicate the system's states and quotient back
        dup = _duplicate(sys)
        f = _merge_channel(sys)
        base = check_system_morphism(f, dup, sys).residual
        after = check_system_morphism(f, gen_rewire(phi, dup), gen_rewire(phi, sys)).residual
        pres = max(pres, base, after)
    return [_result("gen.pseudofunctoriality", func, n), _result("gen.identity", ident, n),
            _result("gen.rewire_preserves_morphisms", pres, n, config.EPS_LAW)]


def _duplicate(sys):
    """Two copies of every state; each copy's update splits mass evenly over both copies."""
    states = FinSet(tuple(f"{s}{tag}" for s in sys.states for tag in ("'", '"')))
    out = tuple(i for i in sys.out for _ in range(2))
    rows = []
    for s, i in enumerate(sys.out):
        for _ in range(2):
            for d in range(len(sys.iface[i])):
                rows.append(np.repeat(sys.transition(s, d), 2) / 2)
    return GenSystem.build(sys.iface, states, out, np.array(rows).reshape(len(rows), len(states)))


def _merge_channel(sys):
    n = len(sys.states)
    return dirac_channel([k // 2 for k in range(2 * n)],
                         FinSet(tuple(f"{s}{tag}" for s in sys.states for tag in ("'", '"'))), sys.states)


def laxator_unit(rng, n) -> list[LawResult]:
    res = 0.0
    for _ in range(n):
        p = random_polynomial(rng, 2, 2)
        sys = random_system(rng, p, int(rng.integers(1, 4)))
        par = gen_parallel(sys, trivial_system())
        ok = (par.out == sys.out and par.iface.dir_counts() == p.dir_counts()
              and np.array_equal(par.upd.matrix, sys.upd.matrix))
        res = max(res, 0.0 if ok else INF)
    return [_result("gen.laxator_unit", res, n)]


def brute_force_filter(sys, prior, positions, directions) -> list[np.ndarray]:
    """Filtered posteriors by summing over every state path consistent with the history."""
    nS = len(sys.states)
    out = []
    for t in range(len(positions)):
        post = np.zeros(nS)
        for path in itertools.product(range(nS), repeat=t + 1):
            w = prior[path[0]]
            for k in range(t + 1):
                if sys.out[path[k]] != positions[k]:
                    w = 0.0
                    break
                if k < t:
                    w *= sys.upd.matrix[sys.row_index(path[k], directions[k]), path[k + 1]]
            post[path[-1]] += w
        out.append(post / post.sum())
    return out


def filter_equivalence(rng, n, T=5, max_states=6) -> list[LawResult]:
    res = 0.0
    for k in range(n):
        nO = int(rng.integers(1, 4))
        nA = int(rng.integers(1, 4))
        p = monomial(FinSet.range(nO, "o"), FinSet.range(nA, "a"))
        sys = random_system(rng, p, int(rng.integers(1, max_states + 1)), sparsity=0.3)
        prior = random_dist(rng, sys.states)
        model = sys.with_prior(prior)
        agent = make_agent(model, random_dist(rng, p.positions), horizon=1)
        recs = simulate_episode(agent, model, T, seed=k)
        oracle = brute_force_filter(sys, prior.mass, [r.position for r in recs],
                                    [r.direction for r in recs[:-1]])
        for r, o in zip(recs, oracle):
            res = max(res, 0.5 * float(np.abs(r.belief.mass - o).sum()))
    return [_result("agent.filter_equivalence", res, n, config.EPS_LAW)]


def scenario_laws(scn) -> list[LawResult]:
    """Laws exercised on the objects declared in a scenario."""
    out = []
    lenses = list(scn.lenses.values())
    if lenses:
        unit = assoc = 0.0
        n = 0
        for phi in lenses:
            unit = max(unit, _exact(lens_compose(lens_identity(phi.dom), phi), phi),
                       _exact(lens_compose(phi, lens_identity(phi.cod)), phi))
        for a, b, c in itertools.product(lenses, repeat=3):
            if a.cod == b.dom and b.cod == c.dom:
                assoc = max(assoc, _exact(lens_compose(lens_compose(a, b), c),
                                          lens_compose(a, lens_compose(b, c))))
                n += 1
        out += [_result("scenario.lens.unit", unit, len(lenses)),
                _result("scenario.lens.associativity", assoc, n)]
    chans = list(scn.channels.values())
    if chans:
        assoc = unit = 0.0
        n = 0
        for f in chans:
            unit = max(unit, channel_compose(Channel.identity(f.dom), f).residual(f))
        for f, g, h in itertools.product(chans, repeat=3):
            if f.cod == g.dom and g.cod == h.dom:
                assoc = max(assoc, channel_compose(channel_compose(f, g), h).residual(
                    channel_compose(f, channel_compose(g, h))))
                n += 1
        out += [_result("scenario.channel.unit", unit, len(chans), config.EPS_STRICT),
                _result("scenario.channel.associativity", assoc, n, config.EPS_STRICT)]
    if scn.systems:
        func = 0.0
        n = 0
        for sys in scn.systems.values():
            func = max(func, 0.0 if gen_rewire(lens_identity(sys.iface), sys).equals(sys) else INF)
            n += 1
            for phi, psi in itertools.product(lenses, repeat=2):
                if phi.dom == sys.iface and phi.cod == psi.dom:
                    ok = gen_rewire(lens_compose(phi, psi), sys).equals(gen_rewire(psi, gen_rewire(phi, sys)))
                    func = max(func, 0.0 if ok else INF)
                    n += 1
        out.append(_result("scenario.gen.pseudofunctoriality", func, n))
    for name, C in scn.categories.items():
        C.check_laws()
        out.append(_result(f"scenario.category.{name}", 0.0, 1))
    return out


def run_all(seed: int, sizes=None, scn=None) -> list[LawResult]:
    sizes = {**DEFAULT_SIZES, **(sizes or {})}
    rng = np.random.default_rng(seed)
    suites = [
        ("lens", lambda: lens_category(rng, sizes["lens_triples"])),
        ("tensor", lambda: tensor_laws(rng, sizes["lens_triples"] // 4)),
        ("adjunction", adjunction),
        ("internal_compose", internal_composition),
        ("dual", dual_shape),
        ("channel", lambda: channel_laws(rng, sizes["channels"])),
        ("bayes", lambda: bayes_laws(rng, sizes["channels"])),
        ("gen", lambda: gen_laws(rng, sizes["systems"])),
        ("gen.laxator", lambda: laxator_unit(rng, sizes["systems"] // 4)),
        ("agent.filter", lambda: filter_equivalence(rng, sizes["filter_models"])),
    ]
    if scn is not None:
        suites.append(("scenario", lambda: scenario_laws(scn)))
    results = []
    for name, suite in suites:
        try:
            results.extend(suite())
        except SizeGuardExceeded as exc:
            results.append(LawResult(name, True, 0.0, 0, skipped=str(exc)))
    return results
