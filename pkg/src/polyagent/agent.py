"""Active-inference agents: a generative model paired with a dual controller.

The controller is the Moore machine on ``[p, y]`` realized by procedures:
``infer`` conditions the belief on the observed position, ``decide`` picks a
direction valid at that position, and ``predict`` advances the belief once
the action is known.  :meth:`Controller.step` bundles the three into the
``(state, position) -> (action, next state)`` shape of a Moore machine.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Sequence

import numpy as np

from . import config
from .errors import (CarrierMismatch, InterfaceMismatch, NoAvailableAction,
                     SizeGuardExceeded, UnknownMorphism)
from .poly import FinCategory, FinSet, Polynomial, monomial, Y
from .stoch import Channel, Dist, dirac_channel, bayes_posterior, kl_divergence
from .systems import (GenSystem, PrioredGenSystem, sample_categorical,
                      trajectory_rng, trivial_system)


class TypedActionViolation(InterfaceMismatch):
    pass


# -- inference ---------------------------------------------------------------

def condition(model: GenSystem, belief: Dist, position: int) -> Dist:
    """Bayesian conditioning on the observed position (likelihood ``δ_out``)."""
    like = dirac_channel(model.out, model.states, model.iface.positions)
    return bayes_posterior(belief, like, position)


def predict(model: GenSystem, belief: Dist, direction: int) -> Dist:
    """Push a position-consistent belief through the update at ``direction``."""
    support = np.nonzero(belief.mass)[0]
    positions = {model.out[s] for s in support}
    if len(positions) > 1:
        raise InterfaceMismatch("belief spans several positions; condition it first")
    (i,) = positions
    if not 0 <= direction < len(model.iface[i]):
        raise TypedActionViolation(
            f"direction {direction} is not valid at position {model.iface.positions[i]}")
    rows = model.offsets[support] + direction
    mass = belief.mass[support] @ model.upd.matrix[rows]
    return Dist(model.states, mass)


def exact_infer(model: GenSystem, belief: Dist, observed_position: int,
                taken_direction: int) -> Dist:
    return predict(model, condition(model, belief, observed_position), taken_direction)


# -- typed policies ----------------------------------------------------------

@dataclass(frozen=True)
class TypedPolicy:
    """A sequence of sections; ``steps[t][i]`` is the direction used at position ``i``.

    Positions without directions carry ``None``.
    """

    steps: tuple[tuple[int | None, ...], ...]

    def __len__(self):
        return len(self.steps)

    def render(self, p: Polynomial) -> list[dict[str, str | None]]:
        return [
            {p.positions[i]: (None if d is None else p[i][d]) for i, d in enumerate(sec)}
            for sec in self.steps
        ]


def _classical(p: Polynomial) -> bool:
    return len(p) > 0 and p.is_monomial


def sections(p: Polynomial) -> list[tuple[int | None, ...]]:
    """Per-step policy choices in canonical order.

    On a monomial ``Oy^A`` these are the constant sections, one per action, so
    policies are classical action sequences; otherwise every section counts.
    """
    if _classical(p):
        if not len(p[0]):
            return [(None,) * len(p)]
        return [(a,) * len(p) for a in range(len(p[0]))]
    choices = [range(len(d)) if len(d) else (None,) for d in p.directions]
    return list(itertools.product(*choices))


def count_typed_policies(p: Polynomial, horizon: int) -> int:
    if _classical(p):
        return max(len(p[0]), 1) ** horizon
    per_step = 1
    for n in p.dir_counts():
        per_step *= max(n, 1)
    return per_step ** horizon


def enumerate_typed_policies(p: Polynomial, horizon: int, guard: int | None = None) -> list[TypedPolicy]:
    limit = config.guard(config.POLICY_GUARD) if guard is None else guard
    n = count_typed_policies(p, horizon)
    if n > limit:
        raise SizeGuardExceeded(f"typed policies of {p} to horizon {horizon}", n, limit)
    secs = sections(p)
    return [TypedPolicy(steps) for steps in itertools.product(secs, repeat=horizon)]


def check_policy_composable(C: FinCategory, ms: Sequence[str]) -> bool:
    for m in ms:
        if not C.has(m):
            raise UnknownMorphism(f"{m!r} is not a morphism of the category")
    return all(C.cod(a) == C.dom(b) for a, b in zip(ms, ms[1:]))


# -- agents ------------------------------------------------------------------

class Decision(NamedTuple):
    direction: int
    policy_index: int | None = None
    G: float | None = None


@dataclass(frozen=True, eq=False)
class Controller:
    iface: Polynomial
    init: Any
    infer: Callable[[Any, int], Any]
    decide: Callable[[Any, int], Decision]
    predict: Callable[[Any, int], Any]

    def policy(self, state, position) -> int:
        return self.decide(state, position).direction

    def step(self, state, position):
        perceived = self.infer(state, position)
        decision = self.decide(perceived, position)
        return decision.direction, self.predict(perceived, decision.direction)


@dataclass(frozen=True, eq=False)
class Agent:
    model: PrioredGenSystem
    controller: Controller
    preferences: Dist
    horizon: int
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.controller.iface != self.model.iface:
            raise InterfaceMismatch("controller and model interfaces differ")
        if self.preferences.carrier != self.model.iface.positions:
            raise CarrierMismatch("preferences must be a distribution over positions")
        if self.horizon < 1:
            raise ValueError("horizon must be a positive integer")

    @property
    def iface(self) -> Polynomial:
        return self.model.iface


def make_agent(model: PrioredGenSystem, preferences: Dist | Sequence[float], horizon: int = 1,
               controller: Controller | None = None, name: str = "") -> Agent:
    if not isinstance(preferences, Dist):
        preferences = Dist(model.iface.positions, preferences)
    if controller is None:
        controller = efe_controller(model, preferences, horizon)
    return Agent(model, controller, preferences, horizon, name)


def _rollout_step(model: GenSystem, b: np.ndarray, section) -> np.ndarray | None:
    """One predicted step under ``section``; ``None`` if mass sits where no action exists."""
    support = np.nonzero(b)[0]
    rows = []
    for s in support:
        d = section[model.out[s]]
        if d is None:
            return None
        rows.append(model.offsets[s] + d)
    return b[support] @ model.upd.matrix[np.array(rows, dtype=int)]


def _position_marginal(model: GenSystem, b: np.ndarray) -> np.ndarray:
    q = np.zeros(len(model.iface))
    np.add.at(q, np.asarray(model.out, dtype=int), b)
    return q


def expected_free_energy(agent: Agent, belief: Dist, pol: TypedPolicy) -> float:
    """Cumulative KL between predicted position marginals and the preferences."""
    if len(pol) > agent.horizon:
        raise ValueError("policy longer than the agent's horizon")
    model = agent.model.system
    b = belief.mass
    G = 0.0
    for section in pol.steps:
        b = _rollout_step(model, b, section)
        if b is None:
            return float("inf")
        G += kl_divergence(_position_marginal(model, b), agent.preferences.mass)
    return G


def score_policies(model: GenSystem, preferences: np.ndarray, belief: Dist, horizon: int,
                   guard: int | None = None) -> np.ndarray:
    """EFE of every typed policy, in enumeration order, sharing prefix rollouts."""
    p = model.iface
    limit = config.guard(config.POLICY_GUARD) if guard is None else guard
    n = count_typed_policies(p, horizon)
    if n > limit:
        raise SizeGuardExceeded(f"typed policies of {p} to horizon {horizon}", n, limit)
    secs = sections(p)
    out = np.empty(n)
    pos = 0

    def walk(b, depth, acc):
        nonlocal pos
        if depth == horizon:
            out[pos] = acc
            pos += 1
            return
        for sec in secs:
            nb = None if b is None else _rollout_step(model, b, sec)
            if nb is None:
                width = len(secs) ** (horizon - depth - 1)
                out[pos:pos + width] = np.inf
                pos += width
                continue
            walk(nb, depth + 1, acc + kl_divergence(_position_marginal(model, nb), preferences))

    walk(belief.mass, 0, 0.0)
    return out


class PlanRow(NamedTuple):
    index: int
    policy: TypedPolicy
    G: float


def plan(agent: Agent, belief: Dist, position: int, horizon: int | None = None,
         guard: int | None = None) -> list[PlanRow]:
    """Policies ranked by EFE from the belief conditioned on ``position`` (stable sort)."""
    H = agent.horizon if horizon is None else horizon
    if H == 0:
        return []
    model = agent.model.system
    if not len(model.iface[position]):
        raise NoAvailableAction(f"position {model.iface.positions[position]} has no directions")
    post = condition(model, belief, position)
    G = score_policies(model, agent.preferences.mass, post, H, guard)
    policies = enumerate_typed_policies(model.iface, H, guard)
    order = np.argsort(G, kind="stable")
    return [PlanRow(int(k), policies[k], float(G[k])) for k in order]


def _efe_decide(model: GenSystem, preferences: Dist, horizon: int, belief: Dist, position: int) -> Decision:
    p = model.iface
    if not len(p[position]):
        raise NoAvailableAction(f"position {p.positions[position]} has no directions")
    G = score_policies(model, preferences.mass, belief, horizon)
    k = int(np.argmin(G))
    secs = sections(p)
    first = secs[k // len(secs) ** (horizon - 1)]
    return Decision(first[position], k, float(G[k]))


def select_action(agent: Agent, belief: Dist, position: int) -> int:
    post = condition(agent.model.system, belief, position)
    return _efe_decide(agent.model.system, agent.preferences, agent.horizon, post, position).direction


def efe_controller(model: PrioredGenSystem, preferences: Dist, horizon: int) -> Controller:
    sys = model.system
    return Controller(
        iface=sys.iface,
        init=model.prior,
        infer=lambda b, i: condition(sys, b, i),
        decide=lambda b, i: _efe_decide(sys, preferences, horizon, b, i),
        predict=lambda b, a: predict(sys, b, a),
    )


def constant_controller(model: PrioredGenSystem, section: Sequence[int]) -> Controller:
    """Ignores beliefs and plays ``section[position]``."""
    sys = model.system
    return Controller(
        iface=sys.iface,
        init=model.prior,
        infer=lambda b, i: condition(sys, b, i),
        decide=lambda b, i: Decision(int(section[i])),
        predict=lambda b, a: predict(sys, b, a),
    )


# -- episodes ----------------------------------------------------------------

@dataclass(frozen=True)
class StepRecord:
    step: int
    env_state: int
    position: int
    belief: Any
    direction: int | None
    policy_index: int | None = None
    G: float | None = None


def belief_payload(state) -> Any:
    if isinstance(state, Dist):
        return [float(x) for x in state.mass]
    if isinstance(state, HierBelief):
        return {
            "manager": belief_payload(state.manager),
            "left": belief_payload(state.left),
            "right": belief_payload(state.right),
        }
    return state


def _check_typed(p: Polynomial, position: int, direction: int):
    if not 0 <= direction < len(p[position]):
        raise TypedActionViolation(
            f"action {direction} emitted at position {p.positions[position]} "
            f"which has {len(p[position])} directions")


def simulate_episode(agent: Agent, env: PrioredGenSystem, T: int, seed: int,
                     index: int = 0) -> list[StepRecord]:
    """Couple an agent to an environment for ``T`` transitions (``T + 1`` records)."""
    if agent.iface != env.iface:
        raise InterfaceMismatch("agent and environment interfaces differ")
    rng = trajectory_rng(seed, index)
    U = rng.random(T + 1)
    ctrl = agent.controller
    p = env.iface
    s = sample_categorical(env.prior.mass, U[0])
    state = ctrl.init
    records = []
    for t in range(T + 1):
        i = env.system.out[s]
        perceived = ctrl.infer(state, i)
        if t == T:
            records.append(StepRecord(t, s, i, perceived, None))
            break
        decision = ctrl.decide(perceived, i)
        _check_typed(p, i, decision.direction)
        records.append(StepRecord(t, s, i, perceived, decision.direction,
                                  decision.policy_index, decision.G))
        s = sample_categorical(env.system.transition(s, decision.direction), U[t + 1])
        state = ctrl.predict(perceived, decision.direction)
    return records


class Branch(NamedTuple):
    prob: float
    env_states: tuple[int, ...]
    positions: tuple[int, ...]
    directions: tuple[int, ...]
    beliefs: tuple[Any, ...]


def episode_distribution(agent: Agent, env: PrioredGenSystem, T: int,
                         tol: float = 0.0) -> list[Branch]:
    """Exact distribution over environment trajectories of an episode.

    The controller is deterministic, so branching comes only from the
    environment; branches with probability ``<= tol`` are pruned.
    """
    if agent.iface != env.iface:
        raise InterfaceMismatch("agent and environment interfaces differ")
    ctrl = agent.controller
    p = env.iface
    out: list[Branch] = []

    def walk(prob, s, state, t, hist_s, hist_i, hist_a, hist_b):
        i = env.system.out[s]
        perceived = ctrl.infer(state, i)
        hist_s, hist_i, hist_b = hist_s + (s,), hist_i + (i,), hist_b + (perceived,)
        if t == T:
            out.append(Branch(prob, hist_s, hist_i, hist_a, hist_b))
            return
        a = ctrl.decide(perceived, i).direction
        _check_typed(p, i, a)
        nxt = ctrl.predict(perceived, a)
        row = env.system.transition(s, a)
        for s2 in np.nonzero(row)[0]:
            pr = prob * row[s2]
            if pr > tol:
                walk(pr, int(s2), nxt, t + 1, hist_s, hist_i, hist_a + (a,), hist_b)

    for s0 in np.nonzero(env.prior.mass)[0]:
        walk(float(env.prior.mass[s0]), int(s0), ctrl.init, 0, (), (), (), ())
    return out


def branch_law(branches: Sequence[Branch]) -> dict[tuple, float]:
    """Probability of each (states, positions, directions) history."""
    law: dict[tuple, float] = {}
    for b in branches:
        key = (b.env_states, b.positions, b.directions)
        law[key] = law.get(key, 0.0) + b.prob
    return law


def tv_between_laws(a: dict, b: dict) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)


# -- hierarchical agents -----------------------------------------------------

def _lex(*dims):
    """Row-major index function for a product of the given sizes."""
    def index(*ks):
        code = 0
        for k, n in zip(ks, dims):
            code = code * n + k
        return code
    return index


@dataclass(frozen=True, eq=False)
class HierAgent:
    """A manager agent ``By^C ⊗ Dy^E -> Oy^A``.

    Maps over products are flat tables in lexicographic order:
    ``like`` on S×B×D, ``act_left``/``act_right`` and the rows of ``trans``
    on S×B×D×A.  The generative processes, high-level policy and inference
    are procedures; when left as ``None`` the defaults documented on
    :meth:`gen_left_at`, :meth:`policy_at` and :meth:`infer_at` apply.
    """

    states: FinSet
    B: FinSet
    C: FinSet
    D: FinSet
    E: FinSet
    O: FinSet
    A: FinSet
    like: tuple[int, ...]
    act_left: tuple[int, ...]
    act_right: tuple[int, ...]
    trans: Channel
    prior: Dist
    gen_left_table: tuple[int, ...] | None = None
    gen_right_table: tuple[int, ...] | None = None
    preferences: Dist | None = None
    horizon: int = 1
    gen_left: Callable[[Dist, int], int] | None = None
    gen_right: Callable[[Dist, int], int] | None = None
    policy: Callable[[Dist, int, int, int], int] | None = None
    infer: Callable[[Dist, int, int, int], Dist] | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        nS, nB, nD, nA = len(self.states), len(self.B), len(self.D), len(self.A)
        for attr in ("like", "act_left", "act_right", "gen_left_table", "gen_right_table"):
            val = getattr(self, attr)
            if val is not None:
                object.__setattr__(self, attr, tuple(int(v) for v in val))

        def total(table, size, cod, what):
            if len(table) != size or any(not 0 <= v < len(cod) for v in table):
                raise CarrierMismatch(f"{what} is not a total map into its codomain")

        total(self.like, nS * nB * nD, self.O, "likelihood S×B×D→O")
        total(self.act_left, nS * nB * nD * nA, self.C, "low action S×B×D×A→C")
        total(self.act_right, nS * nB * nD * nA, self.E, "low action S×B×D×A→E")
        if len(self.trans.dom) != nS * nB * nD * nA or self.trans.cod != self.states:
            raise CarrierMismatch("transition must be a channel S×B×D×A ⇝ S")
        if self.prior.carrier != self.states:
            raise CarrierMismatch("prior must be a distribution over S")
        for table, cod, what in ((self.gen_left_table, self.B, "left"),
                                 (self.gen_right_table, self.D, "right")):
            if table is not None:
                total(table, nS * len(self.O), cod, f"{what} generative process S×O")
        if self.preferences is not None and self.preferences.carrier != self.O:
            raise CarrierMismatch("manager preferences must be over O")

    @property
    def sbd(self):
        return _lex(len(self.states), len(self.B), len(self.D))

    @property
    def sbda(self):
        return _lex(len(self.states), len(self.B), len(self.D), len(self.A))

    # generative processes D S × O -> B, D S × O -> D
    def gen_left_at(self, belief: Dist, o: int) -> int:
        """Default: the table on S×O read at the most probable state."""
        if self.gen_left is not None:
            return self.gen_left(belief, o)
        return self._gen(self.gen_left_table, self.B, belief, o)

    def gen_right_at(self, belief: Dist, o: int) -> int:
        if self.gen_right is not None:
            return self.gen_right(belief, o)
        return self._gen(self.gen_right_table, self.D, belief, o)

    def _gen(self, table, cod, belief, o):
        if table is None:
            if len(cod) == 1:
                return 0
            raise CarrierMismatch("no generative process given for a non-trivial carrier")
        return table[belief.argmax() * len(self.O) + o]

    def infer_at(self, belief: Dist, o: int, c: int, e: int) -> Dist:
        """Default: condition on ``o`` and on the observed low-level actions.

        The likelihood of ``o`` is read at the manager's own generated
        low-level observations; ``(c, e)`` has likelihood proportional to the
        number of high-level actions that would have produced it.  If the
        evidence vanishes the prior is returned unchanged.
        """
        if self.infer is not None:
            return self.infer(belief, o, c, e)
        b, d = self.gen_left_at(belief, o), self.gen_right_at(belief, o)
        sbd, sbda = self.sbd, self.sbda
        nA = len(self.A)
        lik = np.zeros(len(self.states))
        for s in range(len(self.states)):
            if self.like[sbd(s, b, d)] != o:
                continue
            hits = sum(
                1 for a in range(nA)
                if self.act_left[sbda(s, b, d, a)] == c and self.act_right[sbda(s, b, d, a)] == e
            )
            lik[s] = hits / nA
        joint = belief.mass * lik
        z = joint.sum()
        if z <= config.EPS_NORM:
            return belief
        return Dist(self.states, joint / z)

    def predict_at(self, belief: Dist, b: int, d: int, a: int) -> Dist:
        sbda = self.sbda
        rows = [sbda(s, b, d, a) for s in range(len(self.states))]
        return Dist(self.states, belief.mass @ self.trans.matrix[rows])

    def policy_at(self, belief: Dist, o: int, c: int, e: int) -> int:
        """Default: EFE over high-level action sequences against ``preferences``.

        The generated low-level observations are held fixed over the horizon;
        the first minimizer in lexicographic order wins.
        """
        if self.policy is not None:
            return self.policy(belief, o, c, e)
        if self.preferences is None:
            return 0
        b, d = self.gen_left_at(belief, o), self.gen_right_at(belief, o)
        post = self.infer_at(belief, o, c, e)
        sbd = self.sbd
        nA = len(self.A)
        best, best_G = 0, float("inf")
        for k, seq in enumerate(itertools.product(range(nA), repeat=self.horizon)):
            m = post
            G = 0.0
            for a in seq:
                m = self.predict_at(m, b, d, a)
                q = np.zeros(len(self.O))
                for s in range(len(self.states)):
                    q[self.like[sbd(s, b, d)]] += m.mass[s]
                G += kl_divergence(q, self.preferences.mass)
            if G < best_G:
                best, best_G = seq[0], G
        return best


@dataclass(frozen=True)
class HierBelief:
    """Controller state of a composite agent."""

    manager: Dist
    left: Any
    right: Any
    obs: int | None = None
    b: int | None = None
    d: int | None = None
    c: int | None = None
    e: int | None = None
    manager_prior: Dist | None = None


def _worker_iface_ok(agent: Agent, out: FinSet, inp: FinSet) -> bool:
    p = agent.iface
    return len(p) == len(out) and all(len(d) == len(inp) for d in p.directions)


def compose_hierarchy(mgr: HierAgent, left: Agent, right: Agent, name: str = "") -> Agent:
    """Wire two low-level agents into a manager, giving an agent on ``Oy^A``.

    Composite model state is ``(s, t_left, t_right)``: the manager's low
    actions drive the workers' transitions and the workers' outputs feed the
    manager's likelihood and transition.  The composite controller generates
    the workers' observations from the manager belief, lets the workers act,
    and hands their actions to the manager's policy and inference.
    """
    if not _worker_iface_ok(left, mgr.B, mgr.C):
        raise CarrierMismatch(f"left worker interface {left.iface} is not By^C")
    if not _worker_iface_ok(right, mgr.D, mgr.E):
        raise CarrierMismatch(f"right worker interface {right.iface} is not Dy^E")
    L, R = left.model, right.model
    S, TL, TR = mgr.states, L.states, R.states
    nS, nL, nR = len(S), len(TL), len(TR)
    states = FinSet(tuple(
        f"({s},{tl},{tr})" for s in S for tl in TL for tr in TR
    ), f"{S.name}×{TL.name}×{TR.name}")
    iface = monomial(mgr.O, mgr.A)
    sbd, sbda = mgr.sbd, mgr.sbda
    out = []
    rows = []
    for s in range(nS):
        for tl in range(nL):
            b = L.system.out[tl]
            for tr in range(nR):
                d = R.system.out[tr]
                out.append(mgr.like[sbd(s, b, d)])
                for a in range(len(mgr.A)):
                    k = sbda(s, b, d, a)
                    c, e = mgr.act_left[k], mgr.act_right[k]
                    rows.append(np.kron(np.kron(mgr.trans.matrix[k], L.system.transition(tl, c)),
                                        R.system.transition(tr, e)))
    sys = GenSystem.build(iface, states, out, np.array(rows))
    prior = np.kron(np.kron(mgr.prior.mass, L.prior.mass), R.prior.mass)
    model = sys.with_prior(prior)

    lc, rc = left.controller, right.controller

    def infer(st: HierBelief, o: int) -> HierBelief:
        b = mgr.gen_left_at(st.manager, o)
        d = mgr.gen_right_at(st.manager, o)
        sl = lc.infer(st.left, b)
        sr = rc.infer(st.right, d)
        c = lc.decide(sl, b).direction
        e = rc.decide(sr, d).direction
        post = mgr.infer_at(st.manager, o, c, e)
        return HierBelief(post, sl, sr, o, b, d, c, e, st.manager)

    def decide(st: HierBelief, o: int) -> Decision:
        return Decision(mgr.policy_at(st.manager_prior, o, st.c, st.e))

    def advance(st: HierBelief, a: int) -> HierBelief:
        return HierBelief(
            mgr.predict_at(st.manager, st.b, st.d, a),
            lc.predict(st.left, st.c),
            rc.predict(st.right, st.e),
        )

    ctrl = Controller(iface, HierBelief(mgr.prior, lc.init, rc.init), infer, decide, advance)
    prefs = mgr.preferences if mgr.preferences is not None else Dist.uniform(mgr.O)
    return Agent(model, ctrl, prefs, mgr.horizon, name)


def trivial_agent() -> Agent:
    """The one-state agent on ``y``; the unit worker in deep chains."""
    model = trivial_system(Y).with_prior([1.0])
    return make_agent(model, [1.0], 1)


def build_deep_chain(levels: Sequence) -> Agent:
    """Stack a bottom agent on ``y^{A_1}`` under managers with B=D=E=O=1.

    ``levels[0]`` is an :class:`Agent`; every later level is a
    :class:`HierAgent` whose ``C`` is the action set of the level below.
    """
    if not levels:
        raise ValueError("a deep chain needs at least one level")
    current = levels[0]
    if not isinstance(current, Agent):
        raise TypeError("the bottom level must be an Agent")
    for k, mgr in enumerate(levels[1:], start=1):
        for carrier in (mgr.B, mgr.D, mgr.E, mgr.O):
            if len(carrier) != 1:
                raise CarrierMismatch(f"level {k}: deep chains need B=D=E=O=1")
        current = compose_hierarchy(mgr, current, trivial_agent(), name=f"level{k}")
    return current
