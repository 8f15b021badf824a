"""End-to-end acceptance checks; each prints one PASS/FAIL line."""
import time

import numpy as np

from oracles import hierarchy_law
from polyagent import laws
from polyagent.agent import (branch_law, build_deep_chain, compose_hierarchy, count_typed_policies,
                             enumerate_typed_policies, episode_distribution, make_agent,
                             simulate_episode, trivial_agent, tv_between_laws)
from polyagent.generators import random_dist, random_system
from polyagent.meta import (check_groth_category, morphism_tables, structure_agent_interface,
                            structure_system)
from polyagent.poly import FinSet, Y, monomial
from polyagent.scenario import bundled, load
from polyagent.stoch import Dist
from polyagent.systems import closed_unroll_batch, closed_unroll_exact, empirical_marginals
from test_hierarchy import boss, bottom_agent


def report(n, what, ok):
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {what}")
    assert ok, what


def worst(results):
    return max((r.residual for r in results), default=0.0), all(r.passed for r in results)


def test_criterion_1_lens_category():
    t0 = time.perf_counter()
    res, ok = worst(laws.lens_category(np.random.default_rng(1), 200))
    dt = time.perf_counter() - t0
    report(1, f"lens associativity/unit on 200 triples, residual {res}, {dt:.2f}s", ok and dt < 10)


def test_criterion_2_adjunction():
    t0 = time.perf_counter()
    results = laws.adjunction()
    dt = time.perf_counter() - t0
    from polyagent.hom import count_lenses, internal_hom
    from polyagent.poly import tensor_poly
    two_y = monomial(FinSet(("a", "b")), FinSet(("*",)))
    sixteen = (count_lenses(tensor_poly(two_y, two_y), two_y)
               == count_lenses(two_y, internal_hom(two_y, two_y).underlying) == 16)
    res, ok = worst(results)
    report(2, f"adjunction over {{y, 2y, y^2+1}}, 2y case = 16: {sixteen}, {dt:.2f}s",
           ok and sixteen and dt < 30)


def test_criterion_3_gen_pseudofunctoriality():
    results = laws.gen_laws(np.random.default_rng(3), 100)
    res, ok = worst(results)
    report(3, f"Gen pseudofunctoriality on 100 instances, morphism residual {res:.2e}",
           ok and res <= 1e-9 and all(r.instances >= 100 for r in results))


def test_criterion_4_stochastic_laws():
    rng = np.random.default_rng(4)
    results = laws.channel_laws(rng, 100) + laws.bayes_laws(rng, 100)
    res, ok = worst(results)
    report(4, f"channel laws and Bayes oracle, residual {res:.2e}", ok and res <= 1e-12)


def test_criterion_5_dual_shape():
    res, ok = worst(laws.dual_shape(3))
    report(5, "dual(Oy^A) has |A|^|O| positions of |O| directions, |O|,|A| <= 3", ok and res == 0.0)


def test_criterion_6_filtering():
    results = laws.filter_equivalence(np.random.default_rng(6), 20, T=5, max_states=6)
    res, ok = worst(results)
    report(6, f"beliefs vs brute-force filter on 20 models, TV {res:.2e}", ok and res <= 1e-9)


def test_criterion_7_hierarchy():
    scn = load(bundled("hierarchy"))
    mgr, left, right = scn.hier_agents["manager"], scn.agents["left"], scn.agents["right"]
    agent = compose_hierarchy(mgr, left, right)
    tv = tv_between_laws(branch_law(episode_distribution(agent, agent.model, 3)),
                         hierarchy_law(mgr, left, right, 3))
    bottom = bottom_agent()
    top = boss(bottom.iface[0], FinSet(("go", "stay")), seed=1)
    chain = build_deep_chain([bottom, top])
    direct = compose_hierarchy(top, bottom, trivial_agent())
    same = all(
        [(r.env_state, r.direction) for r in simulate_episode(chain, chain.model, 6, seed)]
        == [(r.env_state, r.direction) for r in simulate_episode(direct, direct.model, 6, seed)]
        for seed in range(20))
    report(7, f"flattening TV {tv:.2e}; degenerate chain seed-for-seed: {same}", tv <= 1e-9 and same)


def test_criterion_8_typed_policies():
    rng = np.random.default_rng(8)
    from polyagent.generators import random_polynomial
    steps = bad = 0
    k = 0
    while steps < 1000:
        p = random_polynomial(rng, 3, 3, allow_empty=False)
        sys = random_system(rng, p, int(rng.integers(1, 5)))
        model = sys.with_prior(random_dist(rng, sys.states))
        agent = make_agent(model, random_dist(rng, p.positions), horizon=int(rng.integers(1, 3)))
        for r in simulate_episode(agent, model, 10, seed=k)[:-1]:
            bad += not (0 <= r.direction < len(p[r.position]))
            steps += 1
        k += 1
    counts_ok = all(
        len(enumerate_typed_policies(monomial(FinSet.range(no, "o"), FinSet.range(na, "a")), H))
        == count_typed_policies(monomial(FinSet.range(no, "o"), FinSet.range(na, "a")), H) == na ** H
        for no in (1, 2, 3) for na in (1, 2, 3) for H in (0, 1, 2, 3))
    report(8, f"{steps} episode steps, {bad} ill-typed; monomial count |A|^H: {counts_ok}",
           bad == 0 and counts_ok)


def test_criterion_9_monte_carlo():
    rng = np.random.default_rng(9)
    t0 = time.perf_counter()
    sys = random_system(rng, Y, 6, sparsity=0.3)
    model = sys.with_prior(random_dist(rng, sys.states))
    traj = closed_unroll_batch(model, 10, seed=9, n=100_000)
    exact = np.array([d.mass for d in closed_unroll_exact(model, 10)])
    tv = float((0.5 * np.abs(exact - empirical_marginals(traj, 6)).sum(axis=1)).max())
    dt = time.perf_counter() - t0
    report(9, f"1e5 unrolls, worst per-step TV {tv:.4f}, {dt:.2f}s", tv <= 0.02 and dt < 60)


def test_criterion_10_groth():
    scn = load(bundled("meta"))
    exp = scn.experiments["structure"]
    objs = [scn.groth_objects[o] for o in exp["objects"]]
    tables = morphism_tables(objs)
    res = max(check_groth_category(objs, tables).values())
    iface = structure_agent_interface(objs, tables)
    sysm = structure_system(objs, tables)
    env = sysm.with_prior(Dist.uniform(sysm.states))
    agent = make_agent(env, Dist.uniform(iface.positions), horizon=1)
    recs = simulate_episode(agent, env, 3, seed=0)
    typed = all(0 <= r.direction < len(iface[r.position]) for r in recs[:-1])
    report(10, f"groth residual {res}, interface {iface}, {len(recs) - 1}-step episode typed: {typed}",
           res <= 1e-12 and sysm.iface == iface and len(recs) == 4 and typed)
