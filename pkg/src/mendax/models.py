"""Finite Kripke models: structure, classes, bisimulation, JSON and DOT."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .language import valid_agent_name, valid_atom_name

Pair = Tuple[str, str]


class ModelError(ValueError):
    """Structural problem with a model or a model file."""


@dataclass(frozen=True)
class KripkeModel:
    states: Tuple[str, ...]
    agents: Tuple[str, ...]
    atoms: Tuple[str, ...]
    rel: Dict[str, FrozenSet[Pair]]
    val: Dict[str, FrozenSet[str]]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(
            self, "rel", {a: frozenset(map(tuple, pairs)) for a, pairs in self.rel.items()}
        )
        object.__setattr__(
            self, "val", {p: frozenset(states) for p, states in self.val.items()}
        )
        if not self.states:
            raise ModelError("a model needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise ModelError("duplicate state identifiers")
        known = set(self.states)
        for agent in self.rel:
            if agent not in self.agents:
                raise ModelError("relation for unknown agent %r" % agent)
            for s, t in self.rel[agent]:
                if s not in known or t not in known:
                    raise ModelError("relation pair (%s,%s) references unknown state" % (s, t))
        for atom in self.val:
            if atom not in self.atoms:
                raise ModelError("valuation for unknown atom %r" % atom)
            for s in self.val[atom]:
                if s not in known:
                    raise ModelError("valuation of %r references unknown state %r" % (atom, s))
        for agent in self.agents:
            self.rel.setdefault(agent, frozenset())
        for atom in self.atoms:
            self.val.setdefault(atom, frozenset())

    def successors(self, agent: str, state: str) -> FrozenSet[str]:
        if agent not in self.rel:
            raise ModelError("unknown agent %r" % agent)
        return frozenset(t for (s, t) in self.rel[agent] if s == state)

    def atoms_at(self, state: str) -> FrozenSet[str]:
        return frozenset(p for p in self.atoms if state in self.val[p])


@dataclass(frozen=True)
class PointedModel:
    model: KripkeModel
    point: str

    def __post_init__(self):
        if self.point not in self.model.states:
            raise ModelError("point %r is not a state" % self.point)


# ---------------------------------------------------------------------------
# frame classes


def _serial(pairs: FrozenSet[Pair], states: Sequence[str]) -> bool:
    sources = {s for s, _ in pairs}
    return all(s in sources for s in states)


def _transitive(pairs: FrozenSet[Pair]) -> bool:
    succ: Dict[str, Set[str]] = {}
    for s, t in pairs:
        succ.setdefault(s, set()).add(t)
    for s, t in pairs:
        for u in succ.get(t, ()):
            if (s, u) not in pairs:
                return False
    return True


def _euclidean(pairs: FrozenSet[Pair]) -> bool:
    succ: Dict[str, Set[str]] = {}
    for s, t in pairs:
        succ.setdefault(s, set()).add(t)
    for s, targets in succ.items():
        for t in targets:
            for u in targets:
                if (t, u) not in pairs:
                    return False
    return True


def _reflexive(pairs: FrozenSet[Pair], states: Sequence[str]) -> bool:
    return all((s, s) in pairs for s in states)


def _symmetric(pairs: FrozenSet[Pair]) -> bool:
    return all((t, s) in pairs for s, t in pairs)


def class_of(m: KripkeModel) -> Set[str]:
    """Every frame class the model belongs to, from {k, k45, kd45, s5}."""
    out = {"k"}
    rels = [m.rel[a] for a in m.agents]
    trans = all(_transitive(r) for r in rels)
    eucl = all(_euclidean(r) for r in rels)
    if trans and eucl:
        out.add("k45")
        if all(_serial(r, m.states) for r in rels):
            out.add("kd45")
    if (
        trans
        and all(_reflexive(r, m.states) for r in rels)
        and all(_symmetric(r) for r in rels)
    ):
        out.add("s5")
    return out


MODEL_CLASSES = ("k", "k45", "kd45", "s5")


def relation_in_class(pairs: FrozenSet[Pair], states: Sequence[str], cls: str) -> bool:
    if cls == "k":
        return True
    if cls == "k45":
        return _transitive(pairs) and _euclidean(pairs)
    if cls == "kd45":
        return _transitive(pairs) and _euclidean(pairs) and _serial(pairs, states)
    if cls == "s5":
        return _reflexive(pairs, states) and _symmetric(pairs) and _transitive(pairs)
    raise ModelError("unknown model class %r" % cls)


# ---------------------------------------------------------------------------
# reachability and bisimulation


def reachable(m: KripkeModel, start: str) -> FrozenSet[str]:
    """States reachable from start over the union of all agents' arrows."""
    seen = {start}
    frontier = [start]
    succ: Dict[str, Set[str]] = {}
    for pairs in m.rel.values():
        for s, t in pairs:
            succ.setdefault(s, set()).add(t)
    while frontier:
        s = frontier.pop()
        for t in succ.get(s, ()):
            if t not in seen:
                seen.add(t)
                frontier.append(t)
    return frozenset(seen)


def _same_signature(m1: KripkeModel, m2: KripkeModel) -> bool:
    return set(m1.agents) == set(m2.agents) and set(m1.atoms) == set(m2.atoms)


def bisimilar(pm1: PointedModel, pm2: PointedModel) -> bool:
    """Pointed bisimilarity, by partition refinement on the disjoint union.

    Both models are first cut down to the part reachable from their points,
    which does not change the answer and speeds up the common case.
    """
    m1, m2 = pm1.model, pm2.model
    if not _same_signature(m1, m2):
        raise ModelError("models have different signatures")
    agents = sorted(set(m1.agents))
    atoms = sorted(set(m1.atoms))

    reach1 = reachable(m1, pm1.point)
    reach2 = reachable(m2, pm2.point)

    # fast path: literally identical generated substructures
    if reach1 == reach2 and pm1.point == pm2.point:
        same = all(
            {(s, t) for (s, t) in m1.rel[a] if s in reach1}
            == {(s, t) for (s, t) in m2.rel[a] if s in reach2}
            for a in agents
        ) and all((m1.val[p] & reach1) == (m2.val[p] & reach2) for p in atoms)
        if same:
            return True

    # disjoint union over the reachable parts
    nodes: List[Tuple[int, str]] = [(0, s) for s in m1.states if s in reach1]
    nodes += [(1, s) for s in m2.states if s in reach2]
    index = {node: i for i, node in enumerate(nodes)}
    succ: List[Dict[str, List[int]]] = [dict() for _ in nodes]
    for side, m, reach in ((0, m1, reach1), (1, m2, reach2)):
        for a in agents:
            for s, t in m.rel[a]:
                if s in reach and t in reach:
                    succ[index[(side, s)]].setdefault(a, []).append(index[(side, t)])

    def profile(node):
        side, s = node
        m = m1 if side == 0 else m2
        return tuple(s in m.val[p] for p in atoms)

    block = {}
    labels = {}
    for i, node in enumerate(nodes):
        key = profile(node)
        labels.setdefault(key, len(labels))
        block[i] = labels[key]

    while True:
        signatures = {}
        new_block = {}
        for i in range(len(nodes)):
            sig = (
                block[i],
                tuple(
                    frozenset(block[j] for j in succ[i].get(a, ())) for a in agents
                ),
            )
            if sig not in signatures:
                signatures[sig] = len(signatures)
            new_block[i] = signatures[sig]
        if new_block == block:
            break
        block = new_block

    return block[index[(0, pm1.point)]] == block[index[(1, pm2.point)]]


# ---------------------------------------------------------------------------
# enumeration

_STATE_NAMES = tuple("s%d" % i for i in range(8))


def _relation_candidates(n: int, cls: str) -> List[FrozenSet[Pair]]:
    states = _STATE_NAMES[:n]
    all_pairs = [(s, t) for s in states for t in states]
    out = []
    for bits in range(1 << len(all_pairs)):
        pairs = frozenset(p for i, p in enumerate(all_pairs) if bits >> i & 1)
        if relation_in_class(pairs, states, cls):
            out.append(pairs)
    return out


def enumerate_models(
    max_states: int,
    agents: Sequence[str],
    atoms: Sequence[str],
    cls: str = "k",
) -> Iterator[KripkeModel]:
    """Yield every model of the class with 1..max_states states.

    Exhaustive up to state renaming (no isomorphism dedup). All class
    properties are per-agent, so relation candidates are filtered once per
    agent count and combined.
    """
    if max_states < 1:
        raise ModelError("max_states must be at least 1")
    agents = tuple(agents)
    atoms = tuple(atoms)
    for n in range(1, max_states + 1):
        states = _STATE_NAMES[:n]
        rel_choices = _relation_candidates(n, cls)
        subsets = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(states, r)]
        for rel_combo in itertools.product(rel_choices, repeat=len(agents)):
            rel = dict(zip(agents, rel_combo))
            for val_combo in itertools.product(subsets, repeat=len(atoms)):
                val = dict(zip(atoms, val_combo))
                yield KripkeModel(states, agents, atoms, rel, val)


# ---------------------------------------------------------------------------
# DOT export


def to_dot(m, point: Optional[str] = None) -> str:
    """Deterministic DOT text; accepts a KripkeModel or a PointedModel."""
    if isinstance(m, PointedModel):
        point = m.point
        m = m.model
    lines = ["digraph model {", "  rankdir=LR;"]
    order = {s: i for i, s in enumerate(m.states)}
    for s in m.states:
        true_atoms = ",".join(sorted(m.atoms_at(s)))
        label = s if not true_atoms else "%s\\n%s" % (s, true_atoms)
        shape = "doublecircle" if s == point else "circle"
        lines.append('  "%s" [label="%s", shape=%s];' % (s, label, shape))
    edges: Dict[Pair, List[str]] = {}
    for a in sorted(m.rel):
        for pair in m.rel[a]:
            edges.setdefault(pair, []).append(a)
    for (s, t) in sorted(edges, key=lambda p: (order[p[0]], order[p[1]])):
        lines.append('  "%s" -> "%s" [label="%s"];' % (s, t, ",".join(sorted(edges[(s, t)]))))
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON files

_KRIPKE_KEYS = {"agents", "atoms", "states", "val", "rel", "point"}


def _check_strings(values, what: str) -> List[str]:
    if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
        raise ModelError("%s must be a list of strings" % what)
    return values


def from_json_dict(doc: dict):
    """Build a model from the documented JSON shape.

    Returns a PointedModel when "point" is present, else a KripkeModel.
    Unknown keys are rejected.
    """
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    unknown = set(doc) - _KRIPKE_KEYS
    if unknown:
        raise ModelError("unknown keys in model document: %s" % ", ".join(sorted(unknown)))
    for key in ("agents", "atoms", "states", "val", "rel"):
        if key not in doc:
            raise ModelError("model document is missing %r" % key)
    agents = _check_strings(doc["agents"], "agents")
    atoms = _check_strings(doc["atoms"], "atoms")
    states = _check_strings(doc["states"], "states")
    for a in agents:
        if not valid_agent_name(a):
            raise ModelError("bad agent name %r" % a)
    for p in atoms:
        if not valid_atom_name(p):
            raise ModelError("bad atom name %r" % p)
    if not isinstance(doc["val"], dict):
        raise ModelError("val must be an object")
    if not isinstance(doc["rel"], dict):
        raise ModelError("rel must be an object")
    val = {p: _check_strings(v, "val[%s]" % p) for p, v in doc["val"].items()}
    rel = {}
    for a, pairs in doc["rel"].items():
        if not isinstance(pairs, list):
            raise ModelError("rel[%s] must be a list of pairs" % a)
        cleaned = []
        for pair in pairs:
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, str) for x in pair)
            ):
                raise ModelError("rel[%s] entries must be [from, to] pairs" % a)
            cleaned.append((pair[0], pair[1]))
        rel[a] = cleaned
    model = KripkeModel(tuple(states), tuple(agents), tuple(atoms), rel, val)
    if "point" in doc:
        if not isinstance(doc["point"], str):
            raise ModelError("point must be a string")
        return PointedModel(model, doc["point"])
    return model


def to_json_dict(m, point: Optional[str] = None) -> dict:
    if isinstance(m, PointedModel):
        point = m.point
        m = m.model
    doc = {
        "agents": list(m.agents),
        "atoms": list(m.atoms),
        "states": list(m.states),
        "val": {p: sorted(m.val[p], key=m.states.index) for p in m.atoms},
        "rel": {
            a: [[s, t] for (s, t) in sorted(m.rel[a], key=lambda p: (m.states.index(p[0]), m.states.index(p[1])))]
            for a in m.agents
        },
    }
    if point is not None:
        doc["point"] = point
    return doc


def load_model(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError("not valid JSON: %s" % exc) from exc
    return from_json_dict(doc)


def dump_model(m, point: Optional[str] = None) -> str:
    return json.dumps(to_json_dict(m, point), indent=2) + "\n"
