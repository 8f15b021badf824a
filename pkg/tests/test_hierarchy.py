import numpy as np
import pytest

from oracles import hierarchy_law, nested_chain_states
from polyagent.agent import (HierAgent, branch_law, build_deep_chain, compose_hierarchy,
                             episode_distribution, make_agent, simulate_episode, trivial_agent,
                             tv_between_laws)
from polyagent.errors import CarrierMismatch
from polyagent.poly import FinSet, monomial
from polyagent.scenario import bundled, load
from polyagent.stoch import Channel, Dist
from polyagent.systems import GenSystem

ONE = FinSet(("*",))


@pytest.fixture(scope="module")
def team():
    scn = load(bundled("hierarchy"))
    return scn.hier_agents["manager"], scn.agents["left"], scn.agents["right"]


def bottom_agent(n_actions=2, seed=0):
    rng = np.random.default_rng(seed)
    p = monomial(ONE, FinSet.range(n_actions, "x"))
    S = FinSet(("t0", "t1"))
    upd = rng.dirichlet(np.ones(2), size=2 * n_actions)
    return make_agent(GenSystem.build(p, S, (0, 0), upd).with_prior([0.7, 0.3]), [1.0])


def boss(C, A, seed, policy=True):
    rng = np.random.default_rng(seed)
    S = FinSet(("u", "v"))
    nA = len(A)
    trans = Channel(FinSet.range(2 * nA), S, rng.dirichlet(np.ones(2), size=2 * nA))
    act_left = tuple(int(x) for x in rng.integers(0, len(C), size=2 * nA))
    return HierAgent(
        S, ONE, C, ONE, ONE, ONE, A,
        like=(0, 0), act_left=act_left, act_right=(0,) * (2 * nA),
        trans=trans, prior=Dist(S, [0.4, 0.6]), preferences=Dist(ONE, [1.0]),
        policy=(lambda b, o, c, e: (b.argmax() + c) % nA) if policy else None,
    )


def test_composite_shape(team):
    mgr, left, right = team
    agent = compose_hierarchy(mgr, left, right)
    assert len(agent.model.states) == 8
    assert agent.iface == monomial(mgr.O, mgr.A)
    assert np.allclose(agent.model.system.upd.matrix.sum(axis=1), 1.0)


def test_worker_interface_checked(team):
    mgr, left, right = team
    with pytest.raises(CarrierMismatch):
        compose_hierarchy(mgr, trivial_agent(), right)


def test_hand_flattened_oracle(team):
    mgr, left, right = team
    agent = compose_hierarchy(mgr, left, right)
    ours = branch_law(episode_distribution(agent, agent.model, 3))
    oracle = hierarchy_law(mgr, left, right, 3)
    assert abs(sum(ours.values()) - 1.0) < 1e-12
    assert tv_between_laws(ours, oracle) <= 1e-9


def test_single_action_workers_reduce_to_manager():
    """With |C| = |E| = 1 the workers are inert and only the manager matters."""
    S = FinSet(("u", "v"))
    A = FinSet(("go", "stay"))
    O = FinSet(("lo", "hi"))
    B = FinSet(("b0",))
    mgr = HierAgent(S, B, ONE, B, ONE, O, A, like=(0, 1), act_left=(0,) * 4, act_right=(0,) * 4,
                    trans=Channel(FinSet.range(4), S, [[0.9, 0.1], [0.3, 0.7], [0.5, 0.5], [0.2, 0.8]]),
                    prior=Dist(S, [0.5, 0.5]), preferences=Dist(O, [0.8, 0.2]))
    worker = make_agent(GenSystem.build(monomial(B, ONE), FinSet(("w",)), (0,), [[1.0]]).with_prior([1.0]),
                        [1.0])
    agent = compose_hierarchy(mgr, worker, worker)
    law = branch_law(episode_distribution(agent, agent.model, 3))
    # manager alone: a Markov chain on S with the manager's own policy
    alone = {}

    def walk(prob, s, m, t, hs, ho, ha):
        o = mgr.like[s]
        hs, ho = hs + (s,), ho + (o,)
        if t == 3:
            alone[(hs, ho, ha)] = alone.get((hs, ho, ha), 0.0) + prob
            return
        a = mgr.policy_at(m, o, 0, 0)
        nxt = mgr.predict_at(mgr.infer_at(m, o, 0, 0), 0, 0, a)
        row = mgr.trans.matrix[s * 2 + a]
        for s2 in range(2):
            walk(prob * row[s2], s2, nxt, t + 1, hs, ho, ha + (a,))

    for s in range(2):
        walk(0.5, s, mgr.prior, 0, (), (), ())
    assert tv_between_laws(law, alone) <= 1e-12


def test_deep_chain_one_level_is_identity():
    b = bottom_agent()
    assert build_deep_chain([b]) is b


def test_deep_chain_equals_degenerate_composite():
    bottom = bottom_agent()
    top = boss(bottom.iface[0], FinSet(("go", "stay")), seed=1)
    chain = build_deep_chain([bottom, top])
    direct = compose_hierarchy(top, bottom, trivial_agent())
    assert chain.model.system.equals(direct.model.system)
    for seed in range(20):
        a = simulate_episode(chain, chain.model, 6, seed)
        b = simulate_episode(direct, direct.model, 6, seed)
        assert [(r.env_state, r.direction) for r in a] == [(r.env_state, r.direction) for r in b]


def test_three_level_chain_matches_nested_loop():
    bottom = bottom_agent(seed=2)
    A2, A3 = FinSet(("p", "q", "r")), FinSet(("go", "stay"))
    boss1 = boss(bottom.iface[0], A2, seed=3)
    boss2 = boss(A2, A3, seed=4)
    chain = build_deep_chain([bottom, boss1, boss2])
    assert chain.iface == monomial(ONE, A3)
    for seed in range(10):
        recs = simulate_episode(chain, chain.model, 8, seed)
        assert [r.env_state for r in recs] == nested_chain_states(bottom, boss1, boss2, 8, seed)


def test_deep_chain_rejects_nontrivial_carriers(team):
    mgr, left, _ = team
    with pytest.raises(CarrierMismatch):
        build_deep_chain([left, mgr])


def test_manager_defaults(team):
    mgr, _, _ = team
    b = mgr.prior
    assert mgr.gen_left_at(b, 1) == 1  # noisy -> hi
    post = mgr.infer_at(b, 1, 1, 0)
    assert abs(post.mass.sum() - 1.0) < 1e-12
    assert 0 <= mgr.policy_at(b, 0, 0, 0) < len(mgr.A)
    pred = mgr.predict_at(Dist.point(mgr.states, 0), 0, 0, 0)
    assert np.allclose(pred.mass, mgr.trans.matrix[0])


def test_hier_table_validation(team):
    mgr, _, _ = team
    with pytest.raises(CarrierMismatch):
        HierAgent(mgr.states, mgr.B, mgr.C, mgr.D, mgr.E, mgr.O, mgr.A, like=(0,) * 3,
                  act_left=mgr.act_left, act_right=mgr.act_right, trans=mgr.trans, prior=mgr.prior)
