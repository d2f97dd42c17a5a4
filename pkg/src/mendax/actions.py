"""Action models, product update, and the builtin action-model library.

Builtins: the 2-point public announcement model, the 3-point agent
announcement model, the 3-point skeptical public model and the 6-point
skeptical agent model. Skeptical announcement flavors execute by product
update with the matching builtin.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Tuple

from .language import (
    And, Announcement, Believes, Formula, Not, Or, SkAgBluff,
    SkAgBluffRejected, SkAgLie, SkAgLieRejected, SkAgTruth, SkAgTruthRejected,
    SkPubLie, SkPubReject, SkPubTruth, format_formula, parse_formula,
)
from .models import KripkeModel, ModelError, PointedModel
from . import semantics

Pair = Tuple[str, str]


@dataclass(frozen=True)
class ActionModel:
    actions: Tuple[str, ...]
    agents: Tuple[str, ...]
    rel: Dict[str, FrozenSet[Pair]]
    pre: Dict[str, Formula]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(
            self, "rel", {a: frozenset(map(tuple, pairs)) for a, pairs in self.rel.items()}
        )
        object.__setattr__(self, "pre", dict(self.pre))
        if not self.actions:
            raise ModelError("an action model needs at least one action")
        if len(set(self.actions)) != len(self.actions):
            raise ModelError("duplicate action identifiers")
        known = set(self.actions)
        for agent in self.rel:
            if agent not in self.agents:
                raise ModelError("relation for unknown agent %r" % agent)
            for x, y in self.rel[agent]:
                if x not in known or y not in known:
                    raise ModelError("relation pair (%s,%s) references unknown action" % (x, y))
        for action in self.actions:
            if action not in self.pre:
                raise ModelError("missing precondition for action %r" % action)
        for action in self.pre:
            if action not in known:
                raise ModelError("precondition for unknown action %r" % action)
        for agent in self.agents:
            self.rel.setdefault(agent, frozenset())


@dataclass(frozen=True)
class PointedActionModel:
    model: ActionModel
    point: str

    def __post_init__(self):
        if self.point not in self.model.actions:
            raise ModelError("point %r is not an action" % self.point)


@dataclass(frozen=True)
class GenericAction(Announcement):
    """An arbitrary pointed action model used as an announcement operator."""

    action: PointedActionModel


def transitive_closure(pairs: Iterable[Pair]) -> FrozenSet[Pair]:
    closed = set(pairs)
    changed = True
    while changed:
        changed = False
        for (x, y) in list(closed):
            for (y2, z) in list(closed):
                if y2 == y and (x, z) not in closed:
                    closed.add((x, z))
                    changed = True
    return frozenset(closed)


# ---------------------------------------------------------------------------
# product update


def product_state(state: str, action: str) -> str:
    return "(%s,%s)" % (state, action)


def product_model(m: KripkeModel, am: ActionModel) -> KripkeModel:
    """Restricted modal product of an epistemic model and an action model.

    Domain: pairs whose precondition holds; relations componentwise;
    valuation inherited from the state component.
    """
    missing = set(m.agents) - set(am.agents)
    if missing:
        raise ModelError(
            "action model lacks agents: %s" % ", ".join(sorted(missing))
        )
    alive: Dict[str, FrozenSet[str]] = {
        beta: semantics.denotation(m, am.pre[beta]) for beta in am.actions
    }
    states = tuple(
        product_state(s, beta)
        for s in m.states
        for beta in am.actions
        if s in alive[beta]
    )
    if not states:
        raise ModelError("product update leaves no state alive")
    rel = {}
    for a in m.agents:
        pairs = set()
        arel = am.rel[a]
        for (s, t) in m.rel[a]:
            for (beta, gamma) in arel:
                if s in alive[beta] and t in alive[gamma]:
                    pairs.add((product_state(s, beta), product_state(t, gamma)))
        rel[a] = frozenset(pairs)
    val = {
        p: frozenset(
            product_state(s, beta)
            for s in m.val[p]
            for beta in am.actions
            if s in alive[beta]
        )
        for p in m.atoms
    }
    return KripkeModel(states, m.agents, m.atoms, rel, val)


def product_update(pm: PointedModel, pa: PointedActionModel) -> Optional[PointedModel]:
    """None when the pointed action's precondition fails at the point."""
    if not semantics.evaluate(pm, pa.model.pre[pa.point]):
        return None
    product = product_model(pm.model, pa.model)
    return PointedModel(product, product_state(pm.point, pa.point))


def eval_generic(pm: PointedModel, pa: PointedActionModel, f: Formula) -> bool:
    """Truth of [pa]f at the pointed model (vacuously true if pre fails)."""
    updated = product_update(pm, pa)
    if updated is None:
        return True
    return semantics.evaluate(updated, f)


# ---------------------------------------------------------------------------
# builtins


def pub_action_model(f: Formula, agents: Sequence[str]) -> ActionModel:
    """Two actions: a truthful and a lying public announcement of f.

    Every agent takes whichever happened for the truthful one.
    """
    agents = tuple(agents)
    rel = {a: frozenset({("truth", "truth"), ("lie", "truth")}) for a in agents}
    return ActionModel(
        actions=("truth", "lie"),
        agents=agents,
        rel=rel,
        pre={"truth": f, "lie": Not(f)},
    )


def agent_action_model(speaker: str, f: Formula, agents: Sequence[str]) -> ActionModel:
    """Three actions (bluff, truth, lie) announced by a modeled speaker.

    The speaker knows which she performed; everyone else takes it for the
    truthful one.
    """
    agents = tuple(agents)
    if speaker not in agents:
        raise ModelError("speaker %r not among agents" % speaker)
    actions = ("bluff", "truth", "lie")
    rel = {}
    for a in agents:
        if a == speaker:
            rel[a] = frozenset((x, x) for x in actions)
        else:
            rel[a] = frozenset((x, "truth") for x in actions)
    pre = {
        "bluff": Not(Or(Believes(speaker, f), Believes(speaker, Not(f)))),
        "truth": Believes(speaker, f),
        "lie": Believes(speaker, Not(f)),
    }
    return ActionModel(actions=actions, agents=agents, rel=rel, pre=pre)


def sk_pub_action_model(f: Formula, agents: Sequence[str]) -> ActionModel:
    """Skeptical public announcement for a single observer.

    A believable truth, a believable lie, and a rejected announcement; the
    observer mistakes a believable lie for a truth and is unmoved by a
    rejected one.
    """
    agents = tuple(agents)
    if len(agents) != 1:
        raise ModelError(
            "skeptical public announcements are defined for a single observer"
        )
    x = agents[0]
    doubt = Not(Believes(x, Not(f)))
    rel = {
        x: frozenset(
            {("truth_sk", "truth_sk"), ("lie_sk", "truth_sk"), ("rej_sk", "rej_sk")}
        )
    }
    return ActionModel(
        actions=("truth_sk", "lie_sk", "rej_sk"),
        agents=agents,
        rel=rel,
        pre={
            "truth_sk": And(f, doubt),
            "lie_sk": And(Not(f), doubt),
            "rej_sk": Believes(x, Not(f)),
        },
    )


_BELIEVED_ROW = ("bluff_sk", "truth_sk", "lie_sk")
_REJECTED_ROW = ("bluff_skr", "truth_skr", "lie_skr")


def sk_agent_action_model(
    speaker: str,
    addressee: str,
    f: Formula,
    agents: Optional[Sequence[str]] = None,
) -> ActionModel:
    """Skeptical agent announcement: six actions.

    A believed row (addressee takes the announcement for a truth) and a
    rejected row (addressee already believed the opposite and keeps track
    only of which rejected flavor might have happened). The speaker cannot
    tell whether she was believed. Third agents get addressee-like access.
    """
    if speaker == addressee:
        raise ModelError("speaker and addressee must differ")
    if agents is None:
        agents = (speaker, addressee)
    agents = tuple(agents)
    if speaker not in agents or addressee not in agents:
        raise ModelError("speaker and addressee must be among agents")
    actions = _BELIEVED_ROW + _REJECTED_ROW
    flavor_parts = {
        "bluff": Not(Or(Believes(speaker, f), Believes(speaker, Not(f)))),
        "truth": Believes(speaker, f),
        "lie": Believes(speaker, Not(f)),
    }
    rejected_part = Believes(addressee, Not(f))
    pre = {}
    for flavor in ("bluff", "truth", "lie"):
        pre[flavor + "_sk"] = And(flavor_parts[flavor], Not(rejected_part))
        pre[flavor + "_skr"] = And(flavor_parts[flavor], rejected_part)
    rel = {}
    speaker_pairs = {(x, x) for x in actions}
    for flavor in ("bluff", "truth", "lie"):
        speaker_pairs.add((flavor + "_sk", flavor + "_skr"))
        speaker_pairs.add((flavor + "_skr", flavor + "_sk"))
    others_pairs = {(x, "truth_sk") for x in _BELIEVED_ROW}
    others_pairs |= {(x, y) for x in _REJECTED_ROW for y in _REJECTED_ROW}
    for a in agents:
        pairs = speaker_pairs if a == speaker else others_pairs
        rel[a] = transitive_closure(pairs)
    return ActionModel(actions=actions, agents=agents, rel=rel, pre=pre)


def builtin_for(ann: Announcement, agents: Sequence[str]):
    """The (builtin action model, action name) pair realizing a skeptical flavor."""
    agents = tuple(agents)
    if isinstance(ann, (SkPubTruth, SkPubLie, SkPubReject)):
        am = sk_pub_action_model(ann.content, agents)
        name = {
            SkPubTruth: "truth_sk",
            SkPubLie: "lie_sk",
            SkPubReject: "rej_sk",
        }[type(ann)]
        return am, name
    sk_agent_names = {
        SkAgTruth: "truth_sk",
        SkAgLie: "lie_sk",
        SkAgBluff: "bluff_sk",
        SkAgTruthRejected: "truth_skr",
        SkAgLieRejected: "lie_skr",
        SkAgBluffRejected: "bluff_skr",
    }
    if type(ann) in sk_agent_names:
        addressee = semantics._unique_addressee(ann.speaker, agents)
        am = sk_agent_action_model(ann.speaker, addressee, ann.content, agents)
        return am, sk_agent_names[type(ann)]
    raise ModelError("no builtin action model for %r" % type(ann).__name__)


def sk_announce(pm: PointedModel, ann: Announcement) -> Optional[PointedModel]:
    """Execute a skeptical flavor at the point via its builtin action model."""
    am, name = builtin_for(ann, pm.model.agents)
    return product_update(pm, PointedActionModel(am, name))


def sk_agent_execute(
    pm: PointedModel, speaker: str, flavor: str, f: Formula
):
    """Run a skeptical agent announcement, picking the believed or rejected
    variant by which precondition holds at the point.

    Returns (updated pointed model, executed action name), or None when the
    speaker-side precondition fails.
    """
    if flavor not in ("truth", "lie", "bluff"):
        raise ModelError("unknown flavor %r" % flavor)
    addressee = semantics._unique_addressee(speaker, pm.model.agents)
    am = sk_agent_action_model(speaker, addressee, f, pm.model.agents)
    for name in (flavor + "_sk", flavor + "_skr"):
        updated = product_update(pm, PointedActionModel(am, name))
        if updated is not None:
            return updated, name
    return None


# ---------------------------------------------------------------------------
# JSON files

_ACTION_KEYS = {"agents", "actions", "rel", "pre", "point"}


def from_action_json_dict(doc: dict):
    """Build an action model from JSON; pointed when "point" is present."""
    if not isinstance(doc, dict):
        raise ModelError("action document must be a JSON object")
    unknown = set(doc) - _ACTION_KEYS
    if unknown:
        raise ModelError("unknown keys in action document: %s" % ", ".join(sorted(unknown)))
    for key in ("agents", "actions", "rel", "pre"):
        if key not in doc:
            raise ModelError("action document is missing %r" % key)
    agents = doc["agents"]
    actions = doc["actions"]
    if not isinstance(agents, list) or not isinstance(actions, list):
        raise ModelError("agents and actions must be lists")
    if not isinstance(doc["pre"], dict):
        raise ModelError("pre must be an object of formula texts")
    pre = {}
    for action, text in doc["pre"].items():
        if not isinstance(text, str):
            raise ModelError("pre[%s] must be a formula string" % action)
        pre[action] = parse_formula(text)
    rel = {}
    if not isinstance(doc["rel"], dict):
        raise ModelError("rel must be an object")
    for a, pairs in doc["rel"].items():
        if not isinstance(pairs, list) or not all(
            isinstance(p, list) and len(p) == 2 for p in pairs
        ):
            raise ModelError("rel[%s] entries must be [from, to] pairs" % a)
        rel[a] = [(p[0], p[1]) for p in pairs]
    model = ActionModel(tuple(actions), tuple(agents), rel, pre)
    if "point" in doc:
        return PointedActionModel(model, doc["point"])
    return model


def to_action_json_dict(am, point: Optional[str] = None) -> dict:
    if isinstance(am, PointedActionModel):
        point = am.point
        am = am.model
    order = {x: i for i, x in enumerate(am.actions)}
    doc = {
        "agents": list(am.agents),
        "actions": list(am.actions),
        "rel": {
            a: [[x, y] for (x, y) in sorted(am.rel[a], key=lambda p: (order[p[0]], order[p[1]]))]
            for a in am.agents
        },
        "pre": {x: format_formula(am.pre[x]) for x in am.actions},
    }
    if point is not None:
        doc["point"] = point
    return doc


def load_action_model(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError("not valid JSON: %s" % exc) from exc
    return from_action_json_dict(doc)


def dump_action_model(am, point: Optional[str] = None) -> str:
    return json.dumps(to_action_json_dict(am, point), indent=2, sort_keys=False)
