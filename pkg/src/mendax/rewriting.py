"""Reduction-axiom rewriting and belief normal forms.

translate eliminates announcement operators by repeatedly rewriting an
innermost announcement with the matching reduction axiom. adf rebuilds an
announcement-free formula as a disjunction of single-level belief blocks
(no same-agent modality directly inside the same agent's modality), and
strictify peels a speaker's belief prefix down to the strict content. Every
shape produced here is accepted only after the bounded-model equivalence
oracle agrees with it.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .language import (
    AgBluff, AgLie, AgTruth, And, Announcement, Believes, Bot, CondBelieves,
    Dyn, Formula, Iff, Implies, Knows, Not, Or, Prop, PubLie, PubTruth,
    SkAgBluff, SkAgBluffRejected, SkAgLie, SkAgLieRejected, SkAgTruth,
    SkAgTruthRejected, SkPubLie, SkPubReject, SkPubTruth, Top, agents_in,
    atoms_in, format_formula,
)
from .models import ModelError
from . import actions as actions_mod
from . import semantics
from .sweep import check_validity


class NormalFormError(ModelError):
    pass


@dataclass
class RewriteTrace:
    """Whole-formula rewrite steps: (axiom name, before, after), chained."""

    steps: List[Tuple[str, Formula, Formula]] = field(default_factory=list)

    def pretty(self) -> str:
        lines = []
        for name, before, after in self.steps:
            lines.append("%s:" % name)
            lines.append("  %s" % format_formula(before))
            lines.append("  => %s" % format_formula(after))
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# translate

_SK_AGENT_CLASSES = {
    "truth_sk": SkAgTruth,
    "lie_sk": SkAgLie,
    "bluff_sk": SkAgBluff,
    "truth_skr": SkAgTruthRejected,
    "lie_skr": SkAgLieRejected,
    "bluff_skr": SkAgBluffRejected,
}
_SK_PUBLIC_CLASSES = {
    "truth_sk": SkPubTruth,
    "lie_sk": SkPubLie,
    "rej_sk": SkPubReject,
}


def _and_fold(parts: Sequence[Formula]) -> Formula:
    if not parts:
        return Top()
    out = parts[-1]
    for part in reversed(parts[:-1]):
        out = And(part, out)
    return out


def _or_fold(parts: Sequence[Formula]) -> Formula:
    if not parts:
        return Bot()
    out = parts[-1]
    for part in reversed(parts[:-1]):
        out = Or(part, out)
    return out


def _signature_agents(f: Formula) -> Tuple[str, ...]:
    return tuple(sorted(agents_in(f)))


def _successor_announcement(ann: Announcement, name: str) -> Announcement:
    """The announcement class for an action reachable inside a builtin."""
    if isinstance(ann, (SkPubTruth, SkPubLie, SkPubReject)):
        return _SK_PUBLIC_CLASSES[name](ann.content)
    return _SK_AGENT_CLASSES[name](ann.speaker, ann.content)


def _belief_clause(ann: Announcement, agent: str, body: Formula, agents: Tuple[str, ...]):
    """One reduction step for [ann] B_agent body. Returns (axiom name, result)."""
    if isinstance(ann, PubTruth):
        guard = ann.content
        return "belief-public-truth", Implies(guard, Believes(agent, Dyn(ann, body)))
    if isinstance(ann, PubLie):
        guard = Not(ann.content)
        return (
            "belief-public-lie",
            Implies(guard, Believes(agent, Dyn(PubTruth(ann.content), body))),
        )
    if isinstance(ann, AgTruth):
        guard = Believes(ann.speaker, ann.content)
        return "belief-agent-truth", Implies(guard, Believes(agent, Dyn(ann, body)))
    if isinstance(ann, AgLie):
        guard = Believes(ann.speaker, Not(ann.content))
        if agent == ann.speaker:
            inner: Announcement = ann
        else:
            inner = AgTruth(ann.speaker, ann.content)
        return "belief-agent-lie", Implies(guard, Believes(agent, Dyn(inner, body)))
    if isinstance(ann, AgBluff):
        guard = Not(
            Or(
                Believes(ann.speaker, ann.content),
                Believes(ann.speaker, Not(ann.content)),
            )
        )
        if agent == ann.speaker:
            inner = ann
        else:
            inner = AgTruth(ann.speaker, ann.content)
        return "belief-agent-bluff", Implies(guard, Believes(agent, Dyn(inner, body)))
    action = getattr(ann, "action", None)
    if action is not None:
        am, point = action.model, action.point
        if agent not in am.agents:
            raise NormalFormError("agent %r is not in the action model" % agent)
        guard = am.pre[point]
        succ = [gamma for (beta, gamma) in am.rel[agent] if beta == point]
        order = {x: i for i, x in enumerate(am.actions)}
        succ.sort(key=lambda x: order[x])
        conj = _and_fold(
            [
                Believes(
                    agent,
                    Dyn(
                        actions_mod.GenericAction(
                            actions_mod.PointedActionModel(am, gamma)
                        ),
                        body,
                    ),
                )
                for gamma in succ
            ]
        )
        return "belief-action", Implies(guard, conj)
    try:
        am, point = actions_mod.builtin_for(ann, agents)
    except ModelError as exc:
        raise NormalFormError(str(exc)) from exc
    guard = semantics.announcement_precondition(ann, agents)
    succ = [gamma for (beta, gamma) in am.rel[agent] if beta == point]
    order = {x: i for i, x in enumerate(am.actions)}
    succ.sort(key=lambda x: order[x])
    conj = _and_fold(
        [
            Believes(agent, Dyn(_successor_announcement(ann, gamma), body))
            for gamma in succ
        ]
    )
    return "belief-skeptical", Implies(guard, conj)


def _has_dyn(f: Formula) -> bool:
    if isinstance(f, Dyn):
        return True
    if isinstance(f, (Prop, Top, Bot)):
        return False
    if isinstance(f, Not):
        return _has_dyn(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return _has_dyn(f.left) or _has_dyn(f.right)
    if isinstance(f, (Believes, Knows)):
        return _has_dyn(f.body)
    if isinstance(f, CondBelieves):
        return _has_dyn(f.cond) or _has_dyn(f.body)
    return False


def _announcement_contents(ann: Announcement) -> List[Formula]:
    action = getattr(ann, "action", None)
    if action is not None:
        return [action.model.pre[x] for x in action.model.actions]
    content = getattr(ann, "content", None)
    return [content] if content is not None else []


def _replace_contents(ann: Announcement, contents: List[Formula]) -> Announcement:
    action = getattr(ann, "action", None)
    if action is not None:
        am = action.model
        pre = dict(zip(am.actions, contents))
        new_am = actions_mod.ActionModel(am.actions, am.agents, am.rel, pre)
        return actions_mod.GenericAction(
            actions_mod.PointedActionModel(new_am, action.point)
        )
    return dataclasses.replace(ann, content=contents[0])


def _pre_formula(ann: Announcement, agents: Tuple[str, ...]) -> Formula:
    action = getattr(ann, "action", None)
    if action is not None:
        return action.model.pre[action.point]
    try:
        return semantics.announcement_precondition(ann, agents)
    except ModelError as exc:
        raise NormalFormError(str(exc)) from exc


def _apply_axiom(d: Dyn, agents: Tuple[str, ...]) -> Tuple[str, Formula]:
    """Rewrite an innermost announcement (contents and body announcement-free)."""
    ann, body = d.announcement, d.body
    kind = type(ann).__name__
    if kind.startswith("Pl"):
        raise NormalFormError("no reduction axioms for plausible announcements")
    if isinstance(body, (Prop, Top, Bot)):
        return "atom", Implies(_pre_formula(ann, agents), body)
    if isinstance(body, Not):
        return "negation", Implies(_pre_formula(ann, agents), Not(Dyn(ann, body.body)))
    if isinstance(body, And):
        return "conjunction", And(Dyn(ann, body.left), Dyn(ann, body.right))
    if isinstance(body, Or):
        return "disjunction", Or(Dyn(ann, body.left), Dyn(ann, body.right))
    if isinstance(body, Implies):
        return "implication", Implies(Dyn(ann, body.left), Dyn(ann, body.right))
    if isinstance(body, Iff):
        return "equivalence", Iff(Dyn(ann, body.left), Dyn(ann, body.right))
    if isinstance(body, Believes):
        return _belief_clause(ann, body.agent, body.body, agents)
    raise NormalFormError(
        "no reduction axiom for %r under an announcement" % type(body).__name__
    )


def _rewrite_once(f: Formula, agents: Tuple[str, ...]) -> Optional[Tuple[str, Formula]]:
    """Rewrite the leftmost innermost announcement; None when none is left."""
    if isinstance(f, (Prop, Top, Bot)):
        return None
    if isinstance(f, Not):
        hit = _rewrite_once(f.body, agents)
        return None if hit is None else (hit[0], Not(hit[1]))
    if isinstance(f, (And, Or, Implies, Iff)):
        hit = _rewrite_once(f.left, agents)
        if hit is not None:
            return hit[0], type(f)(hit[1], f.right)
        hit = _rewrite_once(f.right, agents)
        if hit is not None:
            return hit[0], type(f)(f.left, hit[1])
        return None
    if isinstance(f, (Believes, Knows)):
        hit = _rewrite_once(f.body, agents)
        return None if hit is None else (hit[0], type(f)(f.agent, hit[1]))
    if isinstance(f, CondBelieves):
        hit = _rewrite_once(f.cond, agents)
        if hit is not None:
            return hit[0], CondBelieves(f.agent, hit[1], f.body)
        hit = _rewrite_once(f.body, agents)
        if hit is not None:
            return hit[0], CondBelieves(f.agent, f.cond, hit[1])
        return None
    if isinstance(f, Dyn):
        contents = _announcement_contents(f.announcement)
        for i, content in enumerate(contents):
            hit = _rewrite_once(content, agents)
            if hit is not None:
                new_contents = list(contents)
                new_contents[i] = hit[1]
                return hit[0], Dyn(_replace_contents(f.announcement, new_contents), f.body)
        hit = _rewrite_once(f.body, agents)
        if hit is not None:
            return hit[0], Dyn(f.announcement, hit[1])
        return _apply_axiom(f, agents)
    raise NormalFormError("cannot rewrite %r" % type(f).__name__)


def translate(f: Formula, max_steps: int = 20000) -> Tuple[Formula, RewriteTrace]:
    """Eliminate all announcement operators via the reduction axioms.

    Each trace step records the axiom used and the whole formula before and
    after. Announcement-free input comes back unchanged with an empty trace.
    """
    agents = _signature_agents(f)
    trace = RewriteTrace()
    current = f
    for _ in range(max_steps):
        hit = _rewrite_once(current, agents)
        if hit is None:
            return current, trace
        name, after = hit
        trace.steps.append((name, current, after))
        current = after
    raise NormalFormError("rewriting did not terminate within %d steps" % max_steps)


# ---------------------------------------------------------------------------
# bounded equivalence oracle


def kd45_equivalent(
    f: Formula,
    g: Formula,
    max_states: int = 3,
    agents: Optional[Sequence[str]] = None,
    atoms: Optional[Sequence[str]] = None,
) -> bool:
    """Bounded-model equivalence over the KD45 class."""
    if agents is None:
        agents = sorted(agents_in(f) | agents_in(g)) or ["a"]
    if atoms is None:
        atoms = sorted(atoms_in(f) | atoms_in(g)) or ["p"]
    return check_validity(Iff(f, g), "kd45", max_states, tuple(agents), tuple(atoms)) is None


# ---------------------------------------------------------------------------
# alternating disjunctive form

# A budget of 63 binary splits covers six distinct same-agent literals.
_SPLIT_CAP = 63
_CLAUSE_CAP = 64


def _bsimp(f: Formula) -> Formula:
    """Constant folding plus the seriality collapses B⊤ → ⊤ and B⊥ → ⊥."""
    if isinstance(f, Not):
        body = _bsimp(f.body)
        if isinstance(body, Top):
            return Bot()
        if isinstance(body, Bot):
            return Top()
        if isinstance(body, Not):
            return body.body
        return Not(body)
    if isinstance(f, And):
        left, right = _bsimp(f.left), _bsimp(f.right)
        if isinstance(left, Bot) or isinstance(right, Bot):
            return Bot()
        if isinstance(left, Top):
            return right
        if isinstance(right, Top):
            return left
        return And(left, right)
    if isinstance(f, Or):
        left, right = _bsimp(f.left), _bsimp(f.right)
        if isinstance(left, Top) or isinstance(right, Top):
            return Top()
        if isinstance(left, Bot):
            return right
        if isinstance(right, Bot):
            return left
        return Or(left, right)
    if isinstance(f, Implies):
        left, right = _bsimp(f.left), _bsimp(f.right)
        if isinstance(left, Bot) or isinstance(right, Top):
            return Top()
        if isinstance(left, Top):
            return right
        if isinstance(right, Bot):
            return _bsimp(Not(left))
        return Implies(left, right)
    if isinstance(f, Iff):
        left, right = _bsimp(f.left), _bsimp(f.right)
        if isinstance(left, Top):
            return right
        if isinstance(right, Top):
            return left
        if isinstance(left, Bot):
            return _bsimp(Not(right))
        if isinstance(right, Bot):
            return _bsimp(Not(left))
        return Iff(left, right)
    if isinstance(f, Believes):
        body = _bsimp(f.body)
        if isinstance(body, Top):
            return Top()
        if isinstance(body, Bot):
            return Bot()
        return Believes(f.agent, body)
    return f


def _boolean_level_belief(f: Formula, agent: str) -> Optional[Believes]:
    """A Believes(agent, ·) node at a purely boolean position, if any."""
    if isinstance(f, Believes):
        return f if f.agent == agent else None
    if isinstance(f, Not):
        return _boolean_level_belief(f.body, agent)
    if isinstance(f, (And, Or, Implies, Iff)):
        hit = _boolean_level_belief(f.left, agent)
        if hit is not None:
            return hit
        return _boolean_level_belief(f.right, agent)
    return None


def _substitute(f: Formula, target: Formula, value: Formula) -> Formula:
    if f == target:
        return value
    if isinstance(f, Not):
        return Not(_substitute(f.body, target, value))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(
            _substitute(f.left, target, value), _substitute(f.right, target, value)
        )
    return f


def _clean(f: Formula, budget: List[int]) -> Formula:
    """Remove same-agent modalities nested at boolean level inside a belief.

    Uses the introspective invariance of B_a-formulas across a's belief
    cell: B_a(... L ...) with L = B_a(χ) splits into the L and not-L cases,
    with L pulled outside. Collapses like B_a B_a χ → B_a χ fall out of the
    same split.
    """
    if isinstance(f, (Prop, Top, Bot)):
        return f
    if isinstance(f, Not):
        return _bsimp(Not(_clean(f.body, budget)))
    if isinstance(f, (And, Or, Implies, Iff)):
        return _bsimp(type(f)(_clean(f.left, budget), _clean(f.right, budget)))
    if isinstance(f, Believes):
        body = _clean(f.body, budget)
        lit = _boolean_level_belief(body, f.agent)
        if lit is None:
            return _bsimp(Believes(f.agent, body))
        budget[0] -= 1
        if budget[0] < 0:
            raise NormalFormError(
                "normal form construction exceeded the case-split budget"
            )
        yes = _bsimp(Believes(f.agent, _bsimp(_substitute(body, lit, Top()))))
        no = _bsimp(Believes(f.agent, _bsimp(_substitute(body, lit, Bot()))))
        split = Or(And(lit, yes), And(_bsimp(Not(lit)), no))
        return _clean(_bsimp(split), budget)
    raise NormalFormError(
        "%r has no alternating disjunctive form" % type(f).__name__
    )


def _dnf(f: Formula, neg: bool = False) -> List[List[Formula]]:
    """Disjunctive normal form over propositional and belief literals."""
    if isinstance(f, Not):
        return _dnf(f.body, not neg)
    if isinstance(f, Top):
        return [[]] if not neg else []
    if isinstance(f, Bot):
        return [] if not neg else [[]]
    if isinstance(f, And) and not neg or isinstance(f, Or) and neg:
        lefts, rights = _dnf(f.left, neg), _dnf(f.right, neg)
        out = [lc + rc for lc in lefts for rc in rights]
        if len(out) > _CLAUSE_CAP:
            raise NormalFormError("normal form construction exceeded the clause cap")
        return out
    if isinstance(f, Or) and not neg or isinstance(f, And) and neg:
        return _dnf(f.left, neg) + _dnf(f.right, neg)
    if isinstance(f, Implies):
        return _dnf(Or(Not(f.left), f.right), neg)
    if isinstance(f, Iff):
        return _dnf(Or(And(f.left, f.right), And(Not(f.left), Not(f.right))), neg)
    if isinstance(f, (Prop, Believes)):
        return [[Not(f) if neg else f]]
    raise NormalFormError("%r cannot appear in a belief normal form" % type(f).__name__)


@dataclass
class _Clause:
    objective: List[Formula]
    blocks: Dict[str, List[Formula]]


def _shape_clause(literals: List[Formula], outermost: str) -> Optional[_Clause]:
    objective: List[Formula] = []
    positives: Dict[str, List[Formula]] = {}
    negatives: Dict[str, List[Formula]] = {}
    for lit in literals:
        core = lit.body if isinstance(lit, Not) else lit
        if isinstance(core, Believes):
            target = negatives if isinstance(lit, Not) else positives
            bucket = target.setdefault(core.agent, [])
            if core.body not in bucket:
                bucket.append(core.body)
        elif lit not in objective:
            objective.append(lit)
    blocks: Dict[str, List[Formula]] = {}
    agents = sorted(set(positives) | set(negatives))
    agents.sort(key=lambda a: (a != outermost, a))
    for b in agents:
        base = _bsimp(_and_fold(positives.get(b, [])))
        if isinstance(base, Bot):
            return None
        psis = [base]
        for beta in negatives.get(b, []):
            psi = _bsimp(And(base, Not(beta)))
            psis.append(psi)
        blocks[b] = psis
    return _Clause(objective, blocks)


def _clause_formula(clause: _Clause) -> Formula:
    parts: List[Formula] = []
    objective = _bsimp(_and_fold(clause.objective))
    if not isinstance(objective, Top):
        parts.append(objective)
    for b, psis in clause.blocks.items():
        parts.append(Believes(b, _or_fold(psis)))
        for psi in psis:
            parts.append(Not(Believes(b, _bsimp(Not(psi)))))
    return _bsimp(_and_fold(parts))


def _adf_clauses(f: Formula, outermost: str) -> List[_Clause]:
    budget = [_SPLIT_CAP]
    cleaned = _clean(_bsimp(f), budget)
    clauses = _dnf(cleaned)
    if len(clauses) > _CLAUSE_CAP:
        raise NormalFormError("normal form construction exceeded the clause cap")
    shaped = []
    for literals in clauses:
        clause = _shape_clause(literals, outermost)
        if clause is not None:
            shaped.append(clause)
    return shaped


def adf(f: Formula, outermost: str) -> Formula:
    """Alternating disjunctive form, checked against the bounded oracle.

    The named agent's belief block is listed first in each clause; the
    result never stacks an agent's modality directly inside its own.
    """
    if _has_dyn(f):
        raise NormalFormError("announcements must be translated away first")
    clauses = _adf_clauses(f, outermost)
    parts = [_clause_formula(c) for c in clauses]
    out = _bsimp(_or_fold(parts))
    if not kd45_equivalent(f, out):
        raise NormalFormError(
            "constructed form failed the bounded equivalence check"
        )
    return out


# ---------------------------------------------------------------------------
# strict announcements


def strictify(speaker: str, f: Formula) -> Formula:
    """The strict content of announcing f: what the speaker's belief in f
    actually amounts to, with the redundant belief prefix removed.
    """
    if _has_dyn(f):
        raise NormalFormError("announcements must be translated away first")
    wrapped = Believes(speaker, f)
    if kd45_equivalent(wrapped, Top()):
        return Top()
    clauses = _adf_clauses(wrapped, speaker)
    live = [c for c in clauses if not _clause_is_absurd(c)]
    if len(live) != 1:
        raise NormalFormError(
            "announced content does not reduce to a single belief block"
        )
    clause = live[0]
    objective = _bsimp(_and_fold(clause.objective))
    if not isinstance(objective, Top) or set(clause.blocks) != {speaker}:
        raise NormalFormError(
            "announced content does not reduce to a single belief block"
        )
    psis = clause.blocks[speaker]
    disjunction = _or_fold(psis)
    residue = [Not(Believes(speaker, _bsimp(Not(psi)))) for psi in psis]
    kept: List[Formula] = []
    for i, conjunct in enumerate(residue):
        trial = _bsimp(_and_fold([disjunction] + kept + residue[i + 1:]))
        if not kd45_equivalent(Believes(speaker, trial), wrapped):
            kept.append(conjunct)
    result = _bsimp(_and_fold([disjunction] + kept))
    if not kd45_equivalent(Believes(speaker, result), wrapped):
        raise NormalFormError(
            "strict form failed the bounded equivalence check"
        )
    return result


def _clause_is_absurd(clause: _Clause) -> bool:
    probe = _clause_formula(clause)
    return isinstance(probe, Bot)
