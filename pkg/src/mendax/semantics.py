"""Satisfaction and the direct update semantics.

State elimination (restrict), arrow elimination (believed public
announcement), agent announcements, flavor preconditions, announcement
classification, and lie-vs-mistake detection. Skeptical flavors are
evaluated through their action models (see actions.py); plausible flavors
only make sense on plausibility models (see plausibility.py).
"""
from __future__ import annotations

from typing import Dict, FrozenSet, Optional, Tuple

from .language import (
    AgBluff, AgLie, AgTruth, And, Announcement, Believes, Bot, CondBelieves,
    Dyn, Formula, Iff, Implies, Knows, Not, Or, PlAgBluff, PlAgLie, PlAgTruth,
    PlPubLie, PlPubTruth, Prop, PubLie, PubTruth, SkAgBluff,
    SkAgBluffRejected, SkAgLie, SkAgLieRejected, SkAgTruth, SkAgTruthRejected,
    SkPubLie, SkPubReject, SkPubTruth, Top, ann_speaker,
)
from .models import KripkeModel, ModelError, PointedModel

TRUTHFUL = "Truthful"
LYING = "Lying"
BLUFFING = "Bluffing"

BELIEVES_LIE = "BelievesLie"
BELIEVES_MISTAKE = "BelievesMistake"
NEITHER = "Neither"

_SK_PUBLIC = (SkPubTruth, SkPubLie, SkPubReject)
_SK_AGENT = (
    SkAgTruth, SkAgLie, SkAgBluff,
    SkAgTruthRejected, SkAgLieRejected, SkAgBluffRejected,
)
_PLAUSIBLE = (PlPubTruth, PlPubLie, PlAgTruth, PlAgLie, PlAgBluff)


class InconsistentSpeaker(ModelError):
    """classify() cannot pick a flavor when the speaker believes everything."""


# ---------------------------------------------------------------------------
# satisfaction


def denotation(m: KripkeModel, f: Formula) -> FrozenSet[str]:
    """The set of states of m satisfying f."""
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
        return universe - denotation(m, f.body)
    if isinstance(f, And):
        return denotation(m, f.left) & denotation(m, f.right)
    if isinstance(f, Or):
        return denotation(m, f.left) | denotation(m, f.right)
    if isinstance(f, Implies):
        return (universe - denotation(m, f.left)) | denotation(m, f.right)
    if isinstance(f, Iff):
        left = denotation(m, f.left)
        right = denotation(m, f.right)
        return (left & right) | (universe - left - right)
    if isinstance(f, Believes):
        if f.agent not in m.agents:
            raise ModelError("unknown agent %r" % f.agent)
        body = denotation(m, f.body)
        out = set()
        for s in m.states:
            if m.successors(f.agent, s) <= body:
                out.add(s)
        return frozenset(out)
    if isinstance(f, (Knows, CondBelieves)):
        raise ModelError("plausibility-only operator on a plain model")
    if isinstance(f, Dyn):
        return _denote_dyn(m, f)
    raise ModelError("cannot evaluate %r" % (f,))


def _denote_dyn(m: KripkeModel, f: Dyn) -> FrozenSet[str]:
    universe = frozenset(m.states)
    ann = f.announcement
    if isinstance(ann, (PubTruth, PubLie)):
        updated = arrow_update(m, ann.content)
        guard = denotation(m, announcement_precondition(ann, m.agents))
        return (universe - guard) | (guard & denotation(updated, f.body))
    if isinstance(ann, (AgTruth, AgLie, AgBluff)):
        if ann.speaker not in m.agents:
            raise ModelError("unknown agent %r" % ann.speaker)
        updated = agent_arrow_update(m, ann.speaker, ann.content)
        guard = denotation(m, announcement_precondition(ann, m.agents))
        return (universe - guard) | (guard & denotation(updated, f.body))
    if isinstance(ann, _SK_PUBLIC + _SK_AGENT):
        from . import actions

        am, action = actions.builtin_for(ann, m.agents)
        return _denote_action(m, am, action, f.body)
    if isinstance(ann, _PLAUSIBLE):
        raise ModelError("plausible announcement on a plain model")
    action_model = getattr(ann, "action", None)
    if action_model is not None:
        return _denote_action(m, action_model.model, action_model.point, f.body)
    raise ModelError("cannot evaluate announcement %r" % (ann,))


def _denote_action(m: KripkeModel, am, action: str, body: Formula) -> FrozenSet[str]:
    from . import actions

    universe = frozenset(m.states)
    guard = denotation(m, am.pre[action])
    if not guard:
        return universe
    product = actions.product_model(m, am)
    inner = denotation(product, body)
    ok = {s for s in guard if actions.product_state(s, action) in inner}
    return (universe - guard) | frozenset(ok)


def satisfies(m: KripkeModel, state: str, f: Formula) -> bool:
    if state not in m.states:
        raise ModelError("unknown state %r" % state)
    return state in denotation(m, f)


def evaluate(pm: PointedModel, f: Formula) -> bool:
    """Truth of f at the pointed model."""
    return satisfies(pm.model, pm.point, f)


# ---------------------------------------------------------------------------
# flavor preconditions


def _single_observer(agents: Tuple[str, ...]) -> str:
    if len(agents) != 1:
        raise ModelError(
            "skeptical public announcements are defined for a single observer; "
            "model has agents %s" % ", ".join(agents)
        )
    return agents[0]


def _unique_addressee(speaker: str, agents: Tuple[str, ...]) -> str:
    others = [a for a in agents if a != speaker]
    if speaker not in agents or len(others) != 1:
        raise ModelError(
            "skeptical agent announcements need exactly one addressee; "
            "speaker %r over agents %s" % (speaker, ", ".join(agents))
        )
    return others[0]


def announcement_precondition(ann: Announcement, agents) -> Formula:
    """The executability precondition of an announcement, as a formula."""
    agents = tuple(agents)
    if isinstance(ann, (PubTruth, PlPubTruth)):
        return ann.content
    if isinstance(ann, (PubLie, PlPubLie)):
        return Not(ann.content)
    if isinstance(ann, (AgTruth, PlAgTruth)):
        return Believes(ann.speaker, ann.content)
    if isinstance(ann, (AgLie, PlAgLie)):
        return Believes(ann.speaker, Not(ann.content))
    if isinstance(ann, (AgBluff, PlAgBluff)):
        return Not(
            Or(
                Believes(ann.speaker, ann.content),
                Believes(ann.speaker, Not(ann.content)),
            )
        )
    if isinstance(ann, _SK_PUBLIC):
        x = _single_observer(agents)
        doubt = Not(Believes(x, Not(ann.content)))
        if isinstance(ann, SkPubTruth):
            return And(ann.content, doubt)
        if isinstance(ann, SkPubLie):
            return And(Not(ann.content), doubt)
        return Believes(x, Not(ann.content))
    if isinstance(ann, _SK_AGENT):
        b = _unique_addressee(ann.speaker, agents)
        if isinstance(ann, (SkAgTruth, SkAgTruthRejected)):
            speaker_part: Formula = Believes(ann.speaker, ann.content)
        elif isinstance(ann, (SkAgLie, SkAgLieRejected)):
            speaker_part = Believes(ann.speaker, Not(ann.content))
        else:
            speaker_part = Not(
                Or(
                    Believes(ann.speaker, ann.content),
                    Believes(ann.speaker, Not(ann.content)),
                )
            )
        rejected = isinstance(
            ann, (SkAgTruthRejected, SkAgLieRejected, SkAgBluffRejected)
        )
        addressee_part = Believes(b, Not(ann.content))
        if not rejected:
            addressee_part = Not(addressee_part)
        return And(speaker_part, addressee_part)
    action_model = getattr(ann, "action", None)
    if action_model is not None:
        return action_model.model.pre[action_model.point]
    raise ModelError("no precondition for %r" % (ann,))


# ---------------------------------------------------------------------------
# updates


def restrict(m: KripkeModel, f: Formula) -> KripkeModel:
    """State elimination: keep exactly the states satisfying f."""
    keep = denotation(m, f)
    if not keep:
        raise ModelError("restriction removes every state")
    states = tuple(s for s in m.states if s in keep)
    rel = {
        a: frozenset((s, t) for (s, t) in m.rel[a] if s in keep and t in keep)
        for a in m.agents
    }
    val = {p: m.val[p] & keep for p in m.atoms}
    return KripkeModel(states, m.agents, m.atoms, rel, val)


def restrict_pointed(pm: PointedModel, f: Formula) -> PointedModel:
    keep = denotation(pm.model, f)
    if pm.point not in keep:
        raise ModelError("restriction eliminates the point")
    return PointedModel(restrict(pm.model, f), pm.point)


def arrow_update(m: KripkeModel, f: Formula) -> KripkeModel:
    """Arrow elimination: every agent keeps only arrows into f-states.

    Target sets are computed on the original model before any cut.
    """
    keep = denotation(m, f)
    rel = {a: frozenset((s, t) for (s, t) in m.rel[a] if t in keep) for a in m.agents}
    return KripkeModel(m.states, m.agents, m.atoms, rel, m.val)


def agent_arrow_update(m: KripkeModel, speaker: str, f: Formula) -> KripkeModel:
    """Announcement by a modeled speaker: the speaker's own arrows stay,
    every other agent keeps only arrows into states where the speaker
    believes f (computed on the original model)."""
    if speaker not in m.agents:
        raise ModelError("unknown agent %r" % speaker)
    keep = denotation(m, Believes(speaker, f))
    rel = {}
    for a in m.agents:
        if a == speaker:
            rel[a] = m.rel[a]
        else:
            rel[a] = frozenset((s, t) for (s, t) in m.rel[a] if t in keep)
    return KripkeModel(m.states, m.agents, m.atoms, rel, m.val)


def announce(pm: PointedModel, ann: Announcement) -> Optional[PointedModel]:
    """Execute a direct-semantics announcement at the point.

    Returns None when the flavor's precondition fails there. Skeptical
    flavors execute via actions.sk_announce, plausible ones via
    plausibility.pl_announce.
    """
    m = pm.model
    if isinstance(ann, (PubTruth, PubLie)):
        if not evaluate(pm, announcement_precondition(ann, m.agents)):
            return None
        return PointedModel(arrow_update(m, ann.content), pm.point)
    if isinstance(ann, (AgTruth, AgLie, AgBluff)):
        if not evaluate(pm, announcement_precondition(ann, m.agents)):
            return None
        return PointedModel(agent_arrow_update(m, ann.speaker, ann.content), pm.point)
    raise ModelError(
        "announce() handles direct flavors only; got %r" % type(ann).__name__
    )


# ---------------------------------------------------------------------------
# classification


def classify(pm: PointedModel, speaker: str, f: Formula) -> str:
    """Which flavor an announcement of f by the speaker would be, at the point."""
    if speaker not in pm.model.agents:
        raise ModelError("unknown agent %r" % speaker)
    if not pm.model.successors(speaker, pm.point):
        raise InconsistentSpeaker(
            "speaker %r believes everything at %r; no flavor applies"
            % (speaker, pm.point)
        )
    if evaluate(pm, Believes(speaker, f)):
        return TRUTHFUL
    if evaluate(pm, Believes(speaker, Not(f))):
        return LYING
    return BLUFFING


def detect(pm: PointedModel, observer: str, speaker: str, f: Formula) -> str:
    """What the observer makes of the speaker's announcement of f.

    BelievesLie when the observer believes the speaker believed the
    opposite; BelievesMistake when the observer believes f is false but
    the speaker believed it. The lie check runs first: an observer whose
    beliefs broke down (empty row) satisfies both vacuously and the
    collapsed reading is that the announcement was a lie.
    """
    if observer == speaker:
        raise ModelError("observer and speaker must differ")
    if evaluate(pm, Believes(observer, Believes(speaker, Not(f)))):
        return BELIEVES_LIE
    if evaluate(pm, Believes(observer, And(Not(f), Believes(speaker, f)))):
        return BELIEVES_MISTAKE
    return NEITHER
