"""Bounded-model validity search over bitmask-encoded model batches.

Models with up to a handful of states are packed into int64 bitmasks and
enumerated in large numpy batches: a formula is evaluated on every model of
the batch at once, one bit per state. Announcements are applied by masking
successor rows (direct flavors) or by building the product slot space
(skeptical and generic action flavors). Every verdict that matters is
re-checked against the one-model-at-a-time semantics, so the fast path can
never silently drift from the reference path.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .language import (
    AgBluff, AgLie, AgTruth, And, Announcement, Believes, Bot, Dyn, Formula,
    Iff, Implies, Not, Or, Prop, PubLie, PubTruth, Top,
)
from .models import KripkeModel, ModelError, PointedModel
from . import actions as actions_mod
from . import semantics

_BATCH = 1 << 16


# ---------------------------------------------------------------------------
# packed relation candidates


def _packed_rows(mask: int, n: int) -> List[int]:
    full = (1 << n) - 1
    return [(mask >> (s * n)) & full for s in range(n)]


def _mask_in_class(mask: int, n: int, cls: str) -> bool:
    rows = _packed_rows(mask, n)
    if cls == "k":
        return True
    if cls in ("k45", "kd45"):
        for s in range(n):
            for t in range(n):
                if rows[s] >> t & 1:
                    if rows[t] & ~rows[s]:
                        return False
                    if rows[s] & ~rows[t]:
                        return False
        if cls == "kd45":
            return all(rows[s] for s in range(n))
        return True
    if cls == "s5":
        for s in range(n):
            if not rows[s] >> s & 1:
                return False
            for t in range(n):
                if (rows[s] >> t & 1) != (rows[t] >> s & 1):
                    return False
                if rows[s] >> t & 1 and rows[t] & ~rows[s]:
                    return False
        return True
    raise ModelError("unknown model class %r" % cls)


def packed_candidates(n: int, cls: str) -> List[int]:
    """All n-state relations of the class, packed as n*n-bit ints, ascending."""
    if n > 4:
        raise ModelError("the bounded search supports at most 4 states")
    return [mask for mask in range(1 << (n * n)) if _mask_in_class(mask, n, cls)]


# ---------------------------------------------------------------------------
# vectorized models


@dataclass
class VecModel:
    """A batch of models sharing one slot layout.

    nbits slots per model; alive marks the slots that exist; rows[a][s] is
    the successor mask of slot s; every mask is guaranteed to stay inside
    alive.
    """

    nbits: int
    agents: Tuple[str, ...]
    alive: np.ndarray
    rows: Dict[str, List[np.ndarray]]
    val: Dict[str, np.ndarray]


def vec_denote(vm: VecModel, f: Formula) -> np.ndarray:
    """Per-model bitmask of the slots where f holds (within alive)."""
    if isinstance(f, Prop):
        if f.name not in vm.val:
            raise ModelError("unknown atom %r" % f.name)
        return vm.val[f.name]
    if isinstance(f, Top):
        return vm.alive
    if isinstance(f, Bot):
        return np.zeros_like(vm.alive)
    if isinstance(f, Not):
        return vm.alive & ~vec_denote(vm, f.body)
    if isinstance(f, And):
        return vec_denote(vm, f.left) & vec_denote(vm, f.right)
    if isinstance(f, Or):
        return vec_denote(vm, f.left) | vec_denote(vm, f.right)
    if isinstance(f, Implies):
        return (vm.alive & ~vec_denote(vm, f.left)) | vec_denote(vm, f.right)
    if isinstance(f, Iff):
        left = vec_denote(vm, f.left)
        right = vec_denote(vm, f.right)
        return vm.alive & ~(left ^ right)
    if isinstance(f, Believes):
        if f.agent not in vm.rows:
            raise ModelError("unknown agent %r" % f.agent)
        return _vec_believes(vm, f.agent, vec_denote(vm, f.body))
    if isinstance(f, Dyn):
        return _vec_dyn(vm, f.announcement, f.body)
    raise ModelError(
        "operator %r is not supported by the vector engine" % type(f).__name__
    )


def _vec_believes(vm: VecModel, agent: str, body: np.ndarray) -> np.ndarray:
    out = np.zeros_like(vm.alive)
    rows = vm.rows[agent]
    for s in range(vm.nbits):
        ok = (rows[s] & ~body) == 0
        out |= ok.astype(np.int64) << np.int64(s)
    return out & vm.alive


def _with_rows(vm: VecModel, rows: Dict[str, List[np.ndarray]]) -> VecModel:
    return VecModel(vm.nbits, vm.agents, vm.alive, rows, vm.val)


def _cut_rows(rows: List[np.ndarray], keep: np.ndarray) -> List[np.ndarray]:
    return [row & keep for row in rows]


def _vec_dyn(vm: VecModel, ann: Announcement, body: Formula) -> np.ndarray:
    if isinstance(ann, (PubTruth, PubLie)):
        content = vec_denote(vm, ann.content)
        updated = _with_rows(
            vm, {a: _cut_rows(vm.rows[a], content) for a in vm.agents}
        )
        guard = content if isinstance(ann, PubTruth) else vm.alive & ~content
        inner = vec_denote(updated, body)
        return (vm.alive & ~guard) | (guard & inner)
    if isinstance(ann, (AgTruth, AgLie, AgBluff)):
        speaker = ann.speaker
        if speaker not in vm.rows:
            raise ModelError("unknown agent %r" % speaker)
        content = vec_denote(vm, ann.content)
        believes_content = _vec_believes(vm, speaker, content)
        rows = {
            a: (vm.rows[a] if a == speaker else _cut_rows(vm.rows[a], believes_content))
            for a in vm.agents
        }
        if isinstance(ann, AgTruth):
            guard = believes_content
        elif isinstance(ann, AgLie):
            guard = _vec_believes(vm, speaker, vm.alive & ~content)
        else:
            guard = vm.alive & ~(
                believes_content | _vec_believes(vm, speaker, vm.alive & ~content)
            )
        inner = vec_denote(_with_rows(vm, rows), body)
        return (vm.alive & ~guard) | (guard & inner)
    action = getattr(ann, "action", None)
    if action is not None:
        return _vec_product_dyn(vm, action.model, action.point, body)
    am, name = actions_mod.builtin_for(ann, vm.agents)
    return _vec_product_dyn(vm, am, name, body)


def _vec_product_dyn(
    vm: VecModel, am: actions_mod.ActionModel, point: str, body: Formula
) -> np.ndarray:
    count = len(am.actions)
    if count * vm.nbits > 62:
        raise ModelError(
            "announcement nesting exceeds the vector engine's 62-bit slot space"
        )
    missing = set(vm.agents) - set(am.agents)
    if missing:
        raise ModelError(
            "action model lacks agents: %s" % ", ".join(sorted(missing))
        )
    index = {beta: i for i, beta in enumerate(am.actions)}
    pre = {beta: vec_denote(vm, am.pre[beta]) for beta in am.actions}
    nbits = vm.nbits
    alive = np.zeros_like(vm.alive)
    for beta in am.actions:
        alive |= pre[beta] << np.int64(index[beta] * nbits)
    rows: Dict[str, List[np.ndarray]] = {}
    for a in vm.agents:
        targets: Dict[str, List[str]] = {beta: [] for beta in am.actions}
        for (beta, gamma) in am.rel[a]:
            targets[beta].append(gamma)
        arows = []
        for beta in am.actions:
            for s in range(nbits):
                row = np.zeros_like(vm.alive)
                for gamma in targets[beta]:
                    row |= (vm.rows[a][s] & pre[gamma]) << np.int64(index[gamma] * nbits)
                arows.append(row)
        rows[a] = arows
    val = {
        p: sum(
            (vm.val[p] << np.int64(index[beta] * nbits)) for beta in am.actions
        )
        & alive
        for p in vm.val
    }
    product = VecModel(count * nbits, vm.agents, alive, rows, val)
    inner = vec_denote(product, body)
    guard = pre[point]
    seg = (inner >> np.int64(index[point] * nbits)) & ((np.int64(1) << np.int64(nbits)) - np.int64(1))
    return (vm.alive & ~guard) | (guard & seg)


# ---------------------------------------------------------------------------
# enumeration spaces


class CandidateSpace:
    """The deterministic enumeration of all n-state models of a class.

    Linear index order: agents' relation choices vary slowest (first agent
    slowest), valuation masks fastest. model_at(i) rebuilds the i-th model
    as a plain KripkeModel.
    """

    def __init__(self, n: int, agents: Sequence[str], atoms: Sequence[str], cls: str = "k"):
        if n < 1:
            raise ModelError("need at least one state")
        self.n = n
        self.agents = tuple(agents)
        self.atoms = tuple(atoms)
        self.cls = cls
        self.rel_cands = np.array(packed_candidates(n, cls), dtype=np.int64)
        self.dims = (len(self.rel_cands),) * len(self.agents) + ((1 << n),) * len(self.atoms)
        total = 1
        for d in self.dims:
            total *= d
        self.total = total
        self.states = tuple("s%d" % i for i in range(n))

    def batch(self, start: int, size: int) -> Tuple[np.ndarray, VecModel]:
        stop = min(start + size, self.total)
        idx = np.arange(start, stop, dtype=np.int64)
        coords = np.unravel_index(idx, self.dims)
        n = self.n
        full = np.int64((1 << n) - 1)
        alive = np.full(idx.shape, (1 << n) - 1, dtype=np.int64)
        rows = {}
        for i, a in enumerate(self.agents):
            packed = self.rel_cands[coords[i]]
            rows[a] = [(packed >> np.int64(s * n)) & full for s in range(n)]
        val = {
            p: coords[len(self.agents) + j].astype(np.int64)
            for j, p in enumerate(self.atoms)
        }
        return idx, VecModel(n, self.agents, alive, rows, val)

    def batches(self, size: int = _BATCH):
        start = 0
        while start < self.total:
            yield self.batch(start, size)
            start += size

    def model_at(self, index: int) -> KripkeModel:
        coords = np.unravel_index(int(index), self.dims)
        n = self.n
        rel = {}
        for i, a in enumerate(self.agents):
            packed = int(self.rel_cands[int(coords[i])])
            rel[a] = frozenset(
                (self.states[s], self.states[t])
                for s in range(n)
                for t in range(n)
                if packed >> (s * n + t) & 1
            )
        val = {}
        for j, p in enumerate(self.atoms):
            mask = int(coords[len(self.agents) + j])
            val[p] = frozenset(self.states[s] for s in range(n) if mask >> s & 1)
        return KripkeModel(self.states, self.agents, self.atoms, rel, val)


# ---------------------------------------------------------------------------
# validity search


def _first_failure(idx: np.ndarray, vm: VecModel, mask: np.ndarray) -> Optional[Tuple[int, int]]:
    fail = vm.alive & ~mask
    hits = np.nonzero(fail)[0]
    if hits.size == 0:
        return None
    pos = int(hits[0])
    bits = int(fail[pos])
    state = (bits & -bits).bit_length() - 1
    return int(idx[pos]), state


def _cross_check(space: CandidateSpace, index: int, state: int, f: Formula, expected: bool):
    m = space.model_at(index)
    got = semantics.satisfies(m, space.states[state], f)
    if got != expected:
        raise ModelError(
            "vector engine and direct semantics disagree on model %d state %s"
            % (index, space.states[state])
        )
    return m


def check_validity(
    f: Formula,
    cls: str = "k",
    max_states: int = 3,
    agents: Sequence[str] = ("a", "b"),
    atoms: Sequence[str] = ("p",),
    batch_size: int = _BATCH,
) -> Optional[PointedModel]:
    """None when f holds at every point of every model in the class up to
    the size bound; otherwise the first countermodel (fewest states, then
    enumeration order, then lowest state index).

    Each countermodel, and a few spot-checked valid points per size, is
    re-evaluated with the direct semantics before being trusted.
    """
    for n in range(1, max_states + 1):
        space = CandidateSpace(n, agents, atoms, cls)
        for idx, vm in space.batches(batch_size):
            mask = vec_denote(vm, f)
            failure = _first_failure(idx, vm, mask)
            if failure is not None:
                index, state = failure
                m = _cross_check(space, index, state, f, expected=False)
                return PointedModel(m, space.states[state])
        for probe in {0, space.total // 2, space.total - 1}:
            _cross_check(space, probe, 0, f, expected=True)
    return None


def find_countermodel(
    f: Formula,
    cls: str = "k",
    max_states: int = 3,
    agents: Sequence[str] = ("a", "b"),
    atoms: Sequence[str] = ("p",),
) -> Optional[PointedModel]:
    """Alias of check_validity with the emphasis flipped: the countermodel."""
    return check_validity(f, cls, max_states, agents, atoms)
