"""The consecutive-numbers riddle: model generation and scenario scripts.

Two agents each hold a natural number, the numbers are one apart, and each
only sees their own. States are pairs "(m,n)"; agent a cannot tell apart
states sharing the first coordinate, agent b the second. Scenario scripts
announce "I know your number" style utterances under a chosen update mode.

The infinite chain of the puzzle is truncated: run_scenario works on an
enlarged internal bound (the user's bound plus the script length plus two)
and reports survivors inside the user's window, so edge effects stay out of
the reported answers. Each step also gets a boundary flag saying whether
anything within the step formula's modal reach of the point touches the
internal edge.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from .language import (
    And, Believes, Bot, Formula, Not, Or, PlAgBluff, PlAgLie, PlAgTruth,
    Prop, format_formula, modal_depth,
)
from .models import KripkeModel, ModelError, PointedModel
from . import actions as actions_mod
from . import plausibility as pl_mod
from . import semantics

AGENT_A = "a"
AGENT_B = "b"
PARITIES = ("both", "actual-only")
FLAVORS = ("truth", "lie", "bluff")
UTTERANCES = ("knows_number", "not_knows_number", "thats_a_lie")
MODES = ("public", "direct", "skeptical", "plausible")

VACUOUS_NOTE = "not executable -- announcement was vacuous"


@dataclass(frozen=True)
class RiddleConfig:
    bound: int
    actual: Tuple[int, int]
    parity_component: str = "both"

    def __post_init__(self):
        object.__setattr__(self, "actual", tuple(self.actual))
        m, n = self.actual
        if self.bound < 1:
            raise ModelError("bound must be at least 1")
        if abs(m - n) != 1:
            raise ModelError("the two numbers must be one apart")
        if not (0 <= m <= self.bound and 0 <= n <= self.bound):
            raise ModelError("actual numbers exceed the bound")
        if self.parity_component not in PARITIES:
            raise ModelError(
                "parity_component must be one of %s" % (PARITIES,)
            )


def _state_name(m: int, n: int) -> str:
    return "(%d,%d)" % (m, n)


_COORD_RE = re.compile(r"\((\d+),(\d+)\)")


def state_coords(name: str) -> Tuple[int, int]:
    """The (m,n) pair embedded in a riddle state name, also after products."""
    hit = _COORD_RE.search(name)
    if hit is None:
        raise ModelError("state %r carries no riddle coordinates" % name)
    return int(hit.group(1)), int(hit.group(2))


def _pairs(cfg: RiddleConfig) -> List[Tuple[int, int]]:
    out = []
    for m in range(cfg.bound + 1):
        for n in (m - 1, m + 1):
            if 0 <= n <= cfg.bound:
                if cfg.parity_component == "actual-only" and m % 2 != cfg.actual[0] % 2:
                    continue
                out.append((m, n))
    return out


def riddle_model(cfg: RiddleConfig) -> PointedModel:
    """The truncated riddle model, pointed at the actual pair.

    Both agents' relations are equivalences: a links states agreeing on the
    first coordinate, b on the second.
    """
    pairs = _pairs(cfg)
    states = tuple(_state_name(m, n) for (m, n) in pairs)
    atoms = tuple("a%d" % i for i in range(cfg.bound + 1)) + tuple(
        "b%d" % i for i in range(cfg.bound + 1)
    )
    rel_a = frozenset(
        (_state_name(m1, n1), _state_name(m2, n2))
        for (m1, n1) in pairs
        for (m2, n2) in pairs
        if m1 == m2
    )
    rel_b = frozenset(
        (_state_name(m1, n1), _state_name(m2, n2))
        for (m1, n1) in pairs
        for (m2, n2) in pairs
        if n1 == n2
    )
    val = {}
    for i in range(cfg.bound + 1):
        val["a%d" % i] = frozenset(_state_name(m, n) for (m, n) in pairs if m == i)
        val["b%d" % i] = frozenset(_state_name(m, n) for (m, n) in pairs if n == i)
    model = KripkeModel(states, (AGENT_A, AGENT_B), atoms, {"a": rel_a, "b": rel_b}, val)
    return PointedModel(model, _state_name(*cfg.actual))


def riddle_plausibility_model(cfg: RiddleConfig) -> pl_mod.PointedPlausibilityModel:
    """The riddle as a plausibility model: same cells, all ranks zero."""
    pm = riddle_model(cfg)
    m = pm.model
    rank = {a: {s: 0 for s in m.states} for a in m.agents}
    plm = pl_mod.PlausibilityModel(m.states, m.agents, m.atoms, dict(m.rel), rank, dict(m.val))
    return pl_mod.PointedPlausibilityModel(plm, pm.point)


def expand_utterance(utterance: str, speaker: str, cfg: RiddleConfig) -> Formula:
    """The riddle utterances as formulas at the config's bound.

    knows_number(sp) is the finite disjunction over the other agent's
    possible numbers n of (n holds and sp believes n holds).
    """
    if speaker not in (AGENT_A, AGENT_B):
        raise ModelError("unknown speaker %r" % speaker)
    other_prefix = "b" if speaker == AGENT_A else "a"
    if utterance == "knows_number":
        parts = [
            And(Prop("%s%d" % (other_prefix, n)), Believes(speaker, Prop("%s%d" % (other_prefix, n))))
            for n in range(cfg.bound + 1)
        ]
        out = parts[-1]
        for part in reversed(parts[:-1]):
            out = Or(part, out)
        return out
    if utterance == "not_knows_number":
        return Not(expand_utterance("knows_number", speaker, cfg))
    if utterance == "thats_a_lie":
        return Believes(speaker, Bot())
    raise ModelError("unknown utterance %r" % utterance)


# ---------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class ScenarioStep:
    speaker: str
    flavor: str
    utterance: str

    def __post_init__(self):
        if self.speaker not in (AGENT_A, AGENT_B):
            raise ModelError("unknown speaker %r" % self.speaker)
        if self.flavor not in FLAVORS:
            raise ModelError("unknown flavor %r" % self.flavor)
        if self.utterance not in UTTERANCES:
            raise ModelError("unknown utterance %r" % self.utterance)


@dataclass(frozen=True)
class Scenario:
    config: RiddleConfig
    steps: Tuple[ScenarioStep, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))


_SCENARIO_KEYS = {"bound", "actual", "steps", "parity_component"}


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ModelError("scenario document must be a JSON object")
    unknown = set(doc) - _SCENARIO_KEYS
    if unknown:
        raise ModelError("unknown keys in scenario: %s" % ", ".join(sorted(unknown)))
    for key in ("bound", "actual", "steps"):
        if key not in doc:
            raise ModelError("scenario is missing %r" % key)
    actual = doc["actual"]
    if not isinstance(actual, list) or len(actual) != 2:
        raise ModelError("actual must be a [m, n] pair")
    cfg = RiddleConfig(
        int(doc["bound"]), (int(actual[0]), int(actual[1])),
        doc.get("parity_component", "both"),
    )
    steps = []
    for raw in doc["steps"]:
        if not isinstance(raw, dict):
            raise ModelError("each step must be an object")
        extra = set(raw) - {"speaker", "flavor", "utterance"}
        if extra:
            raise ModelError("unknown step keys: %s" % ", ".join(sorted(extra)))
        try:
            steps.append(
                ScenarioStep(raw["speaker"], raw["flavor"], raw["utterance"])
            )
        except KeyError as exc:
            raise ModelError("step is missing %s" % exc) from exc
    return Scenario(cfg, tuple(steps))


def load_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError("not valid JSON: %s" % exc) from exc
    return scenario_from_dict(doc)


AnyPointed = Union[PointedModel, pl_mod.PointedPlausibilityModel]


@dataclass
class StepReport:
    index: int
    speaker: str
    flavor: str
    utterance: str
    formula: str
    classification: str
    executable: bool
    note: str = ""
    action: Optional[str] = None
    detect_observer: Optional[str] = None
    detect_verdict: Optional[str] = None
    boundary: bool = False
    survivors: List[str] = field(default_factory=list)
    window_model: Optional[AnyPointed] = None


@dataclass
class ScenarioResult:
    config: RiddleConfig
    mode: str
    working_bound: int
    initial: AnyPointed
    steps: List[StepReport]

    @property
    def models(self) -> List[AnyPointed]:
        return [s.window_model for s in self.steps if s.window_model is not None]


def _within_window(name: str, bound: int) -> bool:
    m, n = state_coords(name)
    return m <= bound and n <= bound


def _window_kripke(pm: PointedModel, bound: int) -> PointedModel:
    m = pm.model
    keep = frozenset(s for s in m.states if _within_window(s, bound))
    if pm.point not in keep:
        raise ModelError("the actual state left the reporting window")
    states = tuple(s for s in m.states if s in keep)
    rel = {
        a: frozenset((x, y) for (x, y) in m.rel[a] if x in keep and y in keep)
        for a in m.agents
    }
    val = {p: m.val[p] & keep for p in m.atoms}
    return PointedModel(KripkeModel(states, m.agents, m.atoms, rel, val), pm.point)


def _window_plausibility(
    pm: pl_mod.PointedPlausibilityModel, bound: int
) -> pl_mod.PointedPlausibilityModel:
    m = pm.model
    keep = frozenset(s for s in m.states if _within_window(s, bound))
    if pm.point not in keep:
        raise ModelError("the actual state left the reporting window")
    states = tuple(s for s in m.states if s in keep)
    epi = {
        a: frozenset((x, y) for (x, y) in m.epi[a] if x in keep and y in keep)
        for a in m.agents
    }
    rank = {a: {s: m.rank[a][s] for s in states} for a in m.agents}
    val = {p: m.val[p] & keep for p in m.atoms}
    return pl_mod.PointedPlausibilityModel(
        pl_mod.PlausibilityModel(states, m.agents, m.atoms, epi, rank, val), pm.point
    )


def _window(pm: AnyPointed, bound: int) -> AnyPointed:
    if isinstance(pm, PointedModel):
        return _window_kripke(pm, bound)
    return _window_plausibility(pm, bound)


def _sorted_states(states: Sequence[str]) -> List[str]:
    return sorted(states, key=lambda s: (state_coords(s), s))


def _boundary_flag(pm: AnyPointed, f: Formula, workbound: int) -> bool:
    """Whether the internal edge lies within the formula's modal reach."""
    if isinstance(pm, PointedModel):
        rel = pm.model.rel
        states = pm.model.states
    else:
        rel = pm.model.epi
        states = pm.model.states
    radius = modal_depth(f) + 1
    seen = {pm.point}
    frontier = {pm.point}
    succ: Dict[str, set] = {s: set() for s in states}
    for pairs in rel.values():
        for (x, y) in pairs:
            succ[x].add(y)
    for _ in range(radius):
        frontier = {t for s in frontier for t in succ[s]} - seen
        if not frontier:
            break
        seen |= frontier
    return any(workbound in state_coords(s) for s in seen)


def _classify(pm: AnyPointed, speaker: str, f: Formula) -> str:
    if isinstance(pm, PointedModel):
        try:
            return semantics.classify(pm, speaker, f)
        except semantics.InconsistentSpeaker:
            return "Inconsistent"
    if pl_mod.eval_pl(pm, Believes(speaker, f)):
        return semantics.TRUTHFUL
    if pl_mod.eval_pl(pm, Believes(speaker, Not(f))):
        return semantics.LYING
    return semantics.BLUFFING


def _flavor_precondition(speaker: str, flavor: str, f: Formula) -> Formula:
    if flavor == "truth":
        return Believes(speaker, f)
    if flavor == "lie":
        return Believes(speaker, Not(f))
    return Not(Or(Believes(speaker, f), Believes(speaker, Not(f))))


def _executable(pm: AnyPointed, mode: str, speaker: str, flavor: str, f: Formula) -> bool:
    if mode == "public":
        return semantics.evaluate(pm, f)
    pre = _flavor_precondition(speaker, flavor, f)
    if isinstance(pm, PointedModel):
        return semantics.evaluate(pm, pre)
    return pl_mod.eval_pl(pm, pre)


def _sincere_update(pm: PointedModel, speaker: str, f: Formula) -> PointedModel:
    """Addressee arrows keep only targets where the speaker sincerely and
    consistently believes the content; the speaker's own arrows stay.
    """
    m = pm.model
    sincere = And(Believes(speaker, f), Not(Believes(speaker, Not(f))))
    target = semantics.denotation(m, sincere)
    rel = {
        a: (m.rel[a] if a == speaker else frozenset(
            (s, t) for (s, t) in m.rel[a] if t in target
        ))
        for a in m.agents
    }
    return PointedModel(
        KripkeModel(m.states, m.agents, m.atoms, rel, m.val), pm.point
    )


_PL_FLAVORS = {"truth": PlAgTruth, "lie": PlAgLie, "bluff": PlAgBluff}


def _apply_step(
    pm: AnyPointed, mode: str, speaker: str, flavor: str, f: Formula
) -> Tuple[AnyPointed, Optional[str]]:
    if mode == "public":
        return semantics.restrict_pointed(pm, f), None
    if mode == "direct":
        return _sincere_update(pm, speaker, f), None
    if mode == "skeptical":
        hit = actions_mod.sk_agent_execute(pm, speaker, flavor, f)
        if hit is None:
            raise ModelError("skeptical step lost its precondition")
        return hit[0], hit[1]
    ann = _PL_FLAVORS[flavor](speaker, f)
    updated = pl_mod.pl_announce(pm, ann)
    if updated is None:
        raise ModelError("plausible step lost its precondition")
    return updated, None


def _detect(pm: AnyPointed, observer: str, speaker: str, f: Formula) -> str:
    if isinstance(pm, PointedModel):
        return semantics.detect(pm, observer, speaker, f)
    if pl_mod.eval_pl(pm, Believes(observer, Believes(speaker, Not(f)))):
        return semantics.BELIEVES_LIE
    if pl_mod.eval_pl(pm, Believes(observer, And(Not(f), Believes(speaker, f)))):
        return semantics.BELIEVES_MISTAKE
    return semantics.NEITHER


def run_scenario(sc: Scenario, mode: str = "direct") -> ScenarioResult:
    """Execute a scenario script step by step under the chosen update mode.

    Each step is classified before it happens, executed only when its
    flavor's precondition holds at the point (public mode: when the content
    is true), and judged by the other agent afterwards. Execution stops at
    the first non-executable step.
    """
    if mode not in MODES:
        raise ModelError("unknown mode %r (choose from %s)" % (mode, ", ".join(MODES)))
    if mode == "public":
        for step in sc.steps:
            if step.flavor != "truth":
                raise ModelError("public mode supports truthful announcements only")
    cfg = sc.config
    workbound = cfg.bound + len(sc.steps) + 2
    work_cfg = RiddleConfig(workbound, cfg.actual, cfg.parity_component)
    if mode == "plausible":
        current: AnyPointed = riddle_plausibility_model(work_cfg)
    else:
        current = riddle_model(work_cfg)
    initial = _window(current, cfg.bound)
    reports: List[StepReport] = []
    for i, step in enumerate(sc.steps):
        f = expand_utterance(step.utterance, step.speaker, work_cfg)
        report = StepReport(
            index=i,
            speaker=step.speaker,
            flavor=step.flavor,
            utterance=step.utterance,
            formula=format_formula(f),
            classification=_classify(current, step.speaker, f),
            executable=_executable(current, mode, step.speaker, step.flavor, f),
            boundary=_boundary_flag(current, f, workbound),
        )
        reports.append(report)
        if not report.executable:
            report.note = VACUOUS_NOTE
            break
        current, action = _apply_step(current, mode, step.speaker, step.flavor, f)
        report.action = action
        other = AGENT_B if step.speaker == AGENT_A else AGENT_A
        report.detect_observer = other
        report.detect_verdict = _detect(current, other, step.speaker, f)
        window = _window(current, cfg.bound)
        report.window_model = window
        report.survivors = _sorted_states(window.model.states)
    return ScenarioResult(cfg, mode, workbound, initial, reports)
