"""Plausibility models: belief from ranked indistinguishability.

States carry a per-agent equivalence relation (what the agent cannot tell
apart) and per-agent natural-number ranks (lower is more plausible). Belief
is truth at the most plausible states of the current equivalence class;
plausible announcements update ranks anti-lexicographically instead of
cutting arrows.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from .language import (
    And, Announcement, Believes, Bot, CondBelieves, Dyn, Formula, Iff,
    Implies, Knows, Not, Or, PlAgBluff, PlAgLie, PlAgTruth, PlPubLie,
    PlPubTruth, Prop, PubTruth, Top,
)
from .models import KripkeModel, ModelError, PointedModel
from .actions import product_state

Pair = Tuple[str, str]


def _check_equivalence(pairs: FrozenSet[Pair], states: Sequence[str], label: str):
    present = set(pairs)
    for s in states:
        if (s, s) not in present:
            raise ModelError("%s is not reflexive (missing (%s,%s))" % (label, s, s))
    for (x, y) in present:
        if (y, x) not in present:
            raise ModelError("%s is not symmetric" % label)
    for (x, y) in present:
        for (y2, z) in present:
            if y2 == y and (x, z) not in present:
                raise ModelError("%s is not transitive" % label)


@dataclass(frozen=True)
class PlausibilityModel:
    states: Tuple[str, ...]
    agents: Tuple[str, ...]
    atoms: Tuple[str, ...]
    epi: Dict[str, FrozenSet[Pair]]
    rank: Dict[str, Dict[str, int]]
    val: Dict[str, FrozenSet[str]]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(
            self, "epi", {a: frozenset(map(tuple, ps)) for a, ps in self.epi.items()}
        )
        object.__setattr__(self, "rank", {a: dict(r) for a, r in self.rank.items()})
        object.__setattr__(
            self, "val", {p: frozenset(ss) for p, ss in self.val.items()}
        )
        if not self.states:
            raise ModelError("a plausibility model needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise ModelError("duplicate state names")
        known = set(self.states)
        for a in self.agents:
            pairs = self.epi.get(a, frozenset())
            for (x, y) in pairs:
                if x not in known or y not in known:
                    raise ModelError("epi pair (%s,%s) references unknown state" % (x, y))
            _check_equivalence(pairs, self.states, "epi relation for %r" % a)
            ranks = self.rank.get(a)
            if ranks is None:
                raise ModelError("missing ranks for agent %r" % a)
            for s in self.states:
                r = ranks.get(s)
                if not isinstance(r, int) or isinstance(r, bool) or r < 0:
                    raise ModelError("rank of %r for agent %r must be a natural number" % (s, a))
        for a in self.epi:
            if a not in self.agents:
                raise ModelError("epi relation for unknown agent %r" % a)
        for a in self.rank:
            if a not in self.agents:
                raise ModelError("ranks for unknown agent %r" % a)
        for p, ss in self.val.items():
            if p not in self.atoms:
                raise ModelError("valuation for unknown atom %r" % p)
            for s in ss:
                if s not in known:
                    raise ModelError("valuation of %r names unknown state %r" % (p, s))
        for p in self.atoms:
            self.val.setdefault(p, frozenset())

    def cell(self, agent: str, state: str) -> FrozenSet[str]:
        """The ~_agent equivalence class of a state."""
        return frozenset(t for (s, t) in self.epi[agent] if s == state)

    def atoms_at(self, state: str) -> FrozenSet[str]:
        return frozenset(p for p in self.atoms if state in self.val[p])


@dataclass(frozen=True)
class PointedPlausibilityModel:
    model: PlausibilityModel
    point: str

    def __post_init__(self):
        if self.point not in self.model.states:
            raise ModelError("point %r is not a state" % self.point)


@dataclass(frozen=True)
class PlausibilityActionModel:
    actions: Tuple[str, ...]
    agents: Tuple[str, ...]
    epi: Dict[str, FrozenSet[Pair]]
    rank: Dict[str, Dict[str, int]]
    pre: Dict[str, Formula]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(
            self, "epi", {a: frozenset(map(tuple, ps)) for a, ps in self.epi.items()}
        )
        object.__setattr__(self, "rank", {a: dict(r) for a, r in self.rank.items()})
        object.__setattr__(self, "pre", dict(self.pre))
        if not self.actions:
            raise ModelError("a plausibility action model needs at least one action")
        known = set(self.actions)
        for a in self.agents:
            pairs = self.epi.get(a, frozenset())
            for (x, y) in pairs:
                if x not in known or y not in known:
                    raise ModelError("epi pair (%s,%s) references unknown action" % (x, y))
            _check_equivalence(pairs, self.actions, "action epi relation for %r" % a)
            ranks = self.rank.get(a)
            if ranks is None:
                raise ModelError("missing action ranks for agent %r" % a)
            for x in self.actions:
                r = ranks.get(x)
                if not isinstance(r, int) or isinstance(r, bool) or r < 0:
                    raise ModelError("rank of %r for agent %r must be a natural number" % (x, a))
        for x in self.actions:
            if x not in self.pre:
                raise ModelError("missing precondition for action %r" % x)


@dataclass(frozen=True)
class PointedPlausibilityActionModel:
    model: PlausibilityActionModel
    point: str

    def __post_init__(self):
        if self.point not in self.model.actions:
            raise ModelError("point %r is not an action" % self.point)


# ---------------------------------------------------------------------------
# derived belief


def _minimal(ranks: Dict[str, int], members: Set[str]) -> FrozenSet[str]:
    if not members:
        return frozenset()
    best = min(ranks[t] for t in members)
    return frozenset(t for t in members if ranks[t] == best)


def belief_relation(m: PlausibilityModel, agent: str) -> FrozenSet[Pair]:
    """Arrows from each state to the rank-minimal states of its class."""
    if agent not in m.agents:
        raise ModelError("unknown agent %r" % agent)
    ranks = m.rank[agent]
    pairs = set()
    for s in m.states:
        for t in _minimal(ranks, set(m.cell(agent, s))):
            pairs.add((s, t))
    return frozenset(pairs)


def to_kripke(m: PlausibilityModel) -> KripkeModel:
    """The belief-accessibility Kripke model induced by the ranks."""
    rel = {a: belief_relation(m, a) for a in m.agents}
    return KripkeModel(m.states, m.agents, m.atoms, rel, m.val)


# ---------------------------------------------------------------------------
# evaluation


def denotation_pl(m: PlausibilityModel, f: Formula) -> FrozenSet[str]:
    universe = frozenset(m.states)
    if isinstance(f, Prop):
        if f.name not in m.atoms:
            raise ModelError("unknown atom %r" % f.name)
        return m.val[f.name]
    if isinstance(f, Top):
        return universe
    if isinstance(f, Bot):
        return frozenset()
    if isinstance(f, Not):
        return universe - denotation_pl(m, f.body)
    if isinstance(f, And):
        return denotation_pl(m, f.left) & denotation_pl(m, f.right)
    if isinstance(f, Or):
        return denotation_pl(m, f.left) | denotation_pl(m, f.right)
    if isinstance(f, Implies):
        return (universe - denotation_pl(m, f.left)) | denotation_pl(m, f.right)
    if isinstance(f, Iff):
        left = denotation_pl(m, f.left)
        right = denotation_pl(m, f.right)
        return (left & right) | ((universe - left) & (universe - right))
    if isinstance(f, Believes):
        if f.agent not in m.agents:
            raise ModelError("unknown agent %r" % f.agent)
        body = denotation_pl(m, f.body)
        rel = belief_relation(m, f.agent)
        return frozenset(
            s for s in m.states
            if all(t in body for (x, t) in rel if x == s)
        )
    if isinstance(f, Knows):
        if f.agent not in m.agents:
            raise ModelError("unknown agent %r" % f.agent)
        body = denotation_pl(m, f.body)
        return frozenset(s for s in m.states if m.cell(f.agent, s) <= body)
    if isinstance(f, CondBelieves):
        if f.agent not in m.agents:
            raise ModelError("unknown agent %r" % f.agent)
        cond = denotation_pl(m, f.cond)
        body = denotation_pl(m, f.body)
        ranks = m.rank[f.agent]
        out = set()
        for s in m.states:
            targets = _minimal(ranks, set(m.cell(f.agent, s)) & cond)
            if targets <= body:
                out.add(s)
        return frozenset(out)
    if isinstance(f, Dyn):
        return _denote_dyn_pl(m, f.announcement, f.body)
    raise ModelError("cannot evaluate %r on a plausibility model" % type(f).__name__)


def _denote_dyn_pl(m: PlausibilityModel, ann: Announcement, body: Formula) -> FrozenSet[str]:
    universe = frozenset(m.states)
    if isinstance(ann, PubTruth):
        guard = denotation_pl(m, ann.content)
        if not guard:
            return universe
        restricted = hard_restrict(m, ann.content)
        inner = denotation_pl(restricted, body)
        return (universe - guard) | (guard & inner)
    if isinstance(ann, (PlPubTruth, PlPubLie, PlAgTruth, PlAgLie, PlAgBluff)):
        am, action = builtin_pl_for(ann, m.agents)
        guard = denotation_pl(m, am.pre[action])
        if not guard:
            return universe
        product = _pl_product(m, am)
        inner = denotation_pl(product, body)
        ok = frozenset(
            s for s in guard if product_state(s, action) in inner
        )
        return (universe - guard) | ok
    raise ModelError(
        "announcement flavor %r is not supported on plausibility models"
        % type(ann).__name__
    )


def eval_pl(pm: PointedPlausibilityModel, f: Formula) -> bool:
    return pm.point in denotation_pl(pm.model, f)


# ---------------------------------------------------------------------------
# updates


def hard_restrict(m: PlausibilityModel, f: Formula) -> PlausibilityModel:
    """State elimination: keep exactly the states satisfying f."""
    keep = denotation_pl(m, f)
    if not keep:
        raise ModelError("restriction removes every state")
    states = tuple(s for s in m.states if s in keep)
    epi = {
        a: frozenset((x, y) for (x, y) in m.epi[a] if x in keep and y in keep)
        for a in m.agents
    }
    rank = {a: {s: m.rank[a][s] for s in states} for a in m.agents}
    val = {p: m.val[p] & keep for p in m.atoms}
    return PlausibilityModel(states, m.agents, m.atoms, epi, rank, val)


def hard_restrict_pointed(pm: PointedPlausibilityModel, f: Formula) -> PointedPlausibilityModel:
    restricted = hard_restrict(pm.model, f)
    if pm.point not in restricted.states:
        raise ModelError("restriction eliminates the point")
    return PointedPlausibilityModel(restricted, pm.point)


def _pl_product(m: PlausibilityModel, am: PlausibilityActionModel) -> PlausibilityModel:
    missing = set(m.agents) - set(am.agents)
    if missing:
        raise ModelError(
            "plausibility action model lacks agents: %s" % ", ".join(sorted(missing))
        )
    alive = {beta: denotation_pl(m, am.pre[beta]) for beta in am.actions}
    pairs: List[Tuple[str, str]] = [
        (s, beta) for s in m.states for beta in am.actions if s in alive[beta]
    ]
    if not pairs:
        raise ModelError("plausible update leaves no state alive")
    states = tuple(product_state(s, beta) for (s, beta) in pairs)
    epi = {}
    for a in m.agents:
        rel = set()
        for (s, beta) in pairs:
            for (t, gamma) in pairs:
                if (s, t) in m.epi[a] and (beta, gamma) in am.epi[a]:
                    rel.add((product_state(s, beta), product_state(t, gamma)))
        epi[a] = frozenset(rel)
    rank = {}
    for a in m.agents:
        key = {
            product_state(s, beta): (am.rank[a][beta], m.rank[a][s])
            for (s, beta) in pairs
        }
        ranks: Dict[str, int] = {}
        seen: Set[str] = set()
        for (s, beta) in pairs:
            name = product_state(s, beta)
            if name in seen:
                continue
            members = frozenset(t for (x, t) in epi[a] if x == name)
            seen |= members
            ordered = sorted(set(key[t] for t in members))
            level = {k: i for i, k in enumerate(ordered)}
            for t in members:
                ranks[t] = level[key[t]]
        rank[a] = ranks
    val = {
        p: frozenset(product_state(s, beta) for (s, beta) in pairs if s in m.val[p])
        for p in m.atoms
    }
    return PlausibilityModel(states, m.agents, m.atoms, epi, rank, val)


def pl_product_update(
    pm: PointedPlausibilityModel, pa: PointedPlausibilityActionModel
) -> Optional[PointedPlausibilityModel]:
    """Anti-lexicographic product: action plausibility dominates, state
    plausibility breaks ties, ranks renumbered per class. None when the
    precondition fails at the point.
    """
    if pm.point not in denotation_pl(pm.model, pa.model.pre[pa.point]):
        return None
    product = _pl_product(pm.model, pa.model)
    return PointedPlausibilityModel(product, product_state(pm.point, pa.point))


# ---------------------------------------------------------------------------
# builtin plausibility action models


def pl_pub_action_model(f: Formula, agents: Sequence[str]) -> PlausibilityActionModel:
    """Plausible public announcement: hearers keep the lie branch as a less
    plausible alternative instead of discarding it.
    """
    agents = tuple(agents)
    actions = ("truth_pl", "lie_pl")
    universal = frozenset((x, y) for x in actions for y in actions)
    return PlausibilityActionModel(
        actions=actions,
        agents=agents,
        epi={a: universal for a in agents},
        rank={a: {"truth_pl": 0, "lie_pl": 1} for a in agents},
        pre={"truth_pl": f, "lie_pl": Not(f)},
    )


def pl_agent_action_model(
    speaker: str, f: Formula, agents: Sequence[str]
) -> PlausibilityActionModel:
    """Plausible agent announcement: the speaker knows her own flavor, the
    hearers rank truth above bluff above lie.
    """
    agents = tuple(agents)
    if speaker not in agents:
        raise ModelError("speaker %r not among agents" % speaker)
    actions = ("bluff_pl", "truth_pl", "lie_pl")
    universal = frozenset((x, y) for x in actions for y in actions)
    identity = frozenset((x, x) for x in actions)
    epi = {}
    rank = {}
    for a in agents:
        if a == speaker:
            epi[a] = identity
            rank[a] = {x: 0 for x in actions}
        else:
            epi[a] = universal
            rank[a] = {"truth_pl": 0, "bluff_pl": 1, "lie_pl": 2}
    pre = {
        "bluff_pl": Not(Or(Believes(speaker, f), Believes(speaker, Not(f)))),
        "truth_pl": Believes(speaker, f),
        "lie_pl": Believes(speaker, Not(f)),
    }
    return PlausibilityActionModel(actions, agents, epi, rank, pre)


def builtin_pl_for(ann: Announcement, agents: Sequence[str]):
    """The (plausibility action model, action name) realizing a plausible flavor."""
    agents = tuple(agents)
    if isinstance(ann, PlPubTruth):
        return pl_pub_action_model(ann.content, agents), "truth_pl"
    if isinstance(ann, PlPubLie):
        return pl_pub_action_model(ann.content, agents), "lie_pl"
    if isinstance(ann, PlAgTruth):
        return pl_agent_action_model(ann.speaker, ann.content, agents), "truth_pl"
    if isinstance(ann, PlAgLie):
        return pl_agent_action_model(ann.speaker, ann.content, agents), "lie_pl"
    if isinstance(ann, PlAgBluff):
        return pl_agent_action_model(ann.speaker, ann.content, agents), "bluff_pl"
    raise ModelError("no plausibility action model for %r" % type(ann).__name__)


def pl_announce(
    pm: PointedPlausibilityModel, ann: Announcement
) -> Optional[PointedPlausibilityModel]:
    """Execute a plausible flavor at the point; None when its precondition fails."""
    am, action = builtin_pl_for(ann, pm.model.agents)
    return pl_product_update(pm, PointedPlausibilityActionModel(am, action))


# ---------------------------------------------------------------------------
# enumeration (for the invariant and axiom sweeps)


def _set_partitions(items: List[str]) -> Iterator[List[List[str]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1:]
        yield [[first]] + partition


def enumerate_plausibility_models(
    max_states: int,
    agents: Sequence[str],
    atoms: Sequence[str],
    max_rank: int = 1,
) -> Iterator[PlausibilityModel]:
    """All plausibility models up to a size: every per-agent partition of the
    states into classes, every rank assignment up to max_rank, every valuation.
    """
    from itertools import product as iproduct

    agents = tuple(agents)
    atoms = tuple(atoms)
    names = ["s%d" % i for i in range(max_states)]
    for n in range(1, max_states + 1):
        states = names[:n]
        partitions = list(_set_partitions(states))
        epis = [
            frozenset((x, y) for block in part for x in block for y in block)
            for part in partitions
        ]
        rank_maps = [
            dict(zip(states, combo))
            for combo in iproduct(range(max_rank + 1), repeat=n)
        ]
        agent_choices = [(e, r) for e in epis for r in rank_maps]
        for assignment in iproduct(agent_choices, repeat=len(agents)):
            epi = {a: assignment[i][0] for i, a in enumerate(agents)}
            rank = {a: assignment[i][1] for i, a in enumerate(agents)}
            for bits in iproduct([False, True], repeat=n * len(atoms)):
                val = {
                    p: frozenset(
                        states[j] for j in range(n) if bits[i * n + j]
                    )
                    for i, p in enumerate(atoms)
                }
                yield PlausibilityModel(tuple(states), agents, atoms, epi, rank, val)


# ---------------------------------------------------------------------------
# JSON files

_PL_KEYS = {"agents", "atoms", "states", "val", "epi", "rank", "point"}


def from_pl_json_dict(doc: dict):
    """Build a plausibility model from JSON; pointed when "point" is present."""
    if not isinstance(doc, dict):
        raise ModelError("plausibility document must be a JSON object")
    unknown = set(doc) - _PL_KEYS
    if unknown:
        raise ModelError(
            "unknown keys in plausibility document: %s" % ", ".join(sorted(unknown))
        )
    for key in ("agents", "atoms", "states", "val", "epi", "rank"):
        if key not in doc:
            raise ModelError("plausibility document is missing %r" % key)
    for key in ("agents", "atoms", "states"):
        if not isinstance(doc[key], list):
            raise ModelError("%r must be a list" % key)
    if not isinstance(doc["epi"], dict) or not isinstance(doc["rank"], dict):
        raise ModelError("epi and rank must be objects")
    epi = {}
    for a, pairs in doc["epi"].items():
        if not isinstance(pairs, list) or not all(
            isinstance(p, list) and len(p) == 2 for p in pairs
        ):
            raise ModelError("epi[%s] entries must be [from, to] pairs" % a)
        epi[a] = [(p[0], p[1]) for p in pairs]
    rank = {}
    for a, ranks in doc["rank"].items():
        if not isinstance(ranks, dict):
            raise ModelError("rank[%s] must be an object" % a)
        rank[a] = dict(ranks)
    val = doc["val"]
    if not isinstance(val, dict):
        raise ModelError("val must be an object")
    model = PlausibilityModel(
        tuple(doc["states"]), tuple(doc["agents"]), tuple(doc["atoms"]),
        epi, rank, {p: frozenset(ss) for p, ss in val.items()},
    )
    if "point" in doc:
        return PointedPlausibilityModel(model, doc["point"])
    return model


def to_pl_json_dict(m, point: Optional[str] = None) -> dict:
    if isinstance(m, PointedPlausibilityModel):
        point = m.point
        m = m.model
    order = {s: i for i, s in enumerate(m.states)}
    doc = {
        "agents": list(m.agents),
        "atoms": list(m.atoms),
        "states": list(m.states),
        "val": {p: sorted(m.val[p], key=lambda s: order[s]) for p in m.atoms},
        "epi": {
            a: [
                [x, y]
                for (x, y) in sorted(m.epi[a], key=lambda p: (order[p[0]], order[p[1]]))
            ]
            for a in m.agents
        },
        "rank": {a: {s: m.rank[a][s] for s in m.states} for a in m.agents},
    }
    if point is not None:
        doc["point"] = point
    return doc


def load_plausibility_model(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError("not valid JSON: %s" % exc) from exc
    return from_pl_json_dict(doc)


def dump_plausibility_model(m, point: Optional[str] = None) -> str:
    return json.dumps(to_pl_json_dict(m, point), indent=2)
