"""Independent reference implementations used as test oracles."""
import itertools

import numpy as np

from polyagent.agent import condition, predict
from polyagent.systems import sample_categorical, trajectory_rng


def _controller_step(mgr, left, right, m, bl, br, o):
    """One perception/decision pass of the two-level loop, written out by hand."""
    b = mgr.gen_left_at(m, o)
    d = mgr.gen_right_at(m, o)
    bl = left.controller.infer(bl, b)
    br = right.controller.infer(br, d)
    c = left.controller.decide(bl, b).direction
    e = right.controller.decide(br, d).direction
    post = mgr.infer_at(m, o, c, e)
    a = mgr.policy_at(m, o, c, e)
    nxt = (mgr.predict_at(post, b, d, a), left.controller.predict(bl, c),
           right.controller.predict(br, e))
    return a, nxt


def _env_row(mgr, left, right, s, tl, tr, a):
    """Next-state law on the product S×T_L×T_R, by explicit loops."""
    L, R = left.model.system, right.model.system
    b, d = L.out[tl], R.out[tr]
    nB, nD, nA = len(mgr.B), len(mgr.D), len(mgr.A)
    k = ((s * nB + b) * nD + d) * nA + a
    c, e = mgr.act_left[k], mgr.act_right[k]
    ps, pl, pr = mgr.trans.matrix[k], L.transition(tl, c), R.transition(tr, e)
    nS, nL, nR = len(ps), len(pl), len(pr)
    row = np.zeros(nS * nL * nR)
    for s2, l2, r2 in itertools.product(range(nS), range(nL), range(nR)):
        row[(s2 * nL + l2) * nR + r2] = ps[s2] * pl[l2] * pr[r2]
    return row


def _obs(mgr, left, right, s, tl, tr):
    b, d = left.model.system.out[tl], right.model.system.out[tr]
    return mgr.like[(s * len(mgr.B) + b) * len(mgr.D) + d]


def hierarchy_law(mgr, left, right, T):
    """Exact law of (states, observations, actions) histories of the flattened loop."""
    nL, nR = len(left.model.states), len(right.model.states)
    prior = np.zeros(len(mgr.states) * nL * nR)
    for s, l, r in itertools.product(range(len(mgr.states)), range(nL), range(nR)):
        prior[(s * nL + l) * nR + r] = mgr.prior[s] * left.model.prior[l] * right.model.prior[r]
    law = {}
    ctrl0 = (mgr.prior, left.controller.init, right.controller.init)

    def walk(prob, x, ctrl, t, hs, ho, ha):
        s, rest = divmod(x, nL * nR)
        tl, tr = divmod(rest, nR)
        o = _obs(mgr, left, right, s, tl, tr)
        hs, ho = hs + (x,), ho + (o,)
        if t == T:
            key = (hs, ho, ha)
            law[key] = law.get(key, 0.0) + prob
            return
        a, nxt = _controller_step(mgr, left, right, *ctrl, o)
        row = _env_row(mgr, left, right, s, tl, tr, a)
        for x2 in np.nonzero(row)[0]:
            walk(prob * row[x2], int(x2), nxt, t + 1, hs, ho, ha + (a,))

    for x in np.nonzero(prior)[0]:
        walk(prior[x], int(x), ctrl0, 0, (), (), ())
    return law


def nested_chain_states(bottom, boss1, boss2, T, seed):
    """Sampled env states of a 3-level B=D=E=O=1 chain, by a hand-written nested loop.

    Returns flat indices over (s2, s1, t0), matching the composite's lexicographic layout.
    """
    U = trajectory_rng(seed, 0).random(T + 1)
    n1, n0 = len(boss1.states), len(bottom.model.states)
    prior = np.einsum("i,j,k->ijk", boss2.prior.mass, boss1.prior.mass, bottom.model.prior.mass).ravel()
    x = sample_categorical(prior, U[0])
    m2, m1, bb = boss2.prior, boss1.prior, bottom.model.prior
    bsys = bottom.model.system
    out = [x]
    for t in range(T):
        # perception and decisions, bottom up
        bb = condition(bsys, bb, 0)
        c1 = bottom.controller.decide(bb, 0).direction
        m1_post = boss1.infer_at(m1, 0, c1, 0)
        c2 = boss1.policy_at(m1, 0, c1, 0)
        m2_post = boss2.infer_at(m2, 0, c2, 0)
        a3 = boss2.policy_at(m2, 0, c2, 0)
        m2 = boss2.predict_at(m2_post, 0, 0, a3)
        m1 = boss1.predict_at(m1_post, 0, 0, c2)
        bb = predict(bsys, bb, c1)
        # environment, top down
        s2, rest = divmod(x, n1 * n0)
        s1, t0 = divmod(rest, n0)
        k2 = s2 * len(boss2.A) + a3
        c2_env = boss2.act_left[k2]
        k1 = s1 * len(boss1.A) + c2_env
        c1_env = boss1.act_left[k1]
        row = np.einsum("i,j,k->ijk", boss2.trans.matrix[k2], boss1.trans.matrix[k1],
                        bsys.transition(t0, c1_env)).ravel()
        x = sample_categorical(row, U[t + 1])
        out.append(x)
    return out
