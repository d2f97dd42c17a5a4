"""Formula language for epistemic logic with announcement operators.

AST node types, a recursive-descent parser for the ASCII surface syntax,
a printer with minimal parentheses, and small structural helpers shared
by the rest of the package.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Union


class ParseError(ValueError):
    """Malformed formula text; message carries a position hint."""


#: keywords that can never be used as atom names
RESERVED = frozenset({
    "true", "false",
    "truth", "lie", "bluff",
    "truth_sk", "lie_sk", "bluff_sk", "rej_sk",
    "truth_skr", "lie_skr", "bluff_skr",
    "truth_pl", "lie_pl", "bluff_pl",
})

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def valid_atom_name(name: str) -> bool:
    return bool(_NAME_RE.fullmatch(name)) and name not in RESERVED


def valid_agent_name(name: str) -> bool:
    return bool(_NAME_RE.fullmatch(name))


# ---------------------------------------------------------------------------
# AST


class Formula:
    """Base class for formula nodes. Instances are immutable values."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Believes(Formula):
    agent: str
    body: Formula


@dataclass(frozen=True)
class CondBelieves(Formula):
    """Belief conditional on a formula: body holds at the most plausible
    condition-states of the agent's knowledge cell."""

    agent: str
    cond: Formula
    body: Formula


@dataclass(frozen=True)
class Knows(Formula):
    agent: str
    body: Formula


class Announcement:
    """Base class for announcement operators usable inside Dyn."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_announcement(self)


@dataclass(frozen=True)
class Dyn(Formula):
    """[announcement] body."""

    announcement: Announcement
    body: Formula


# public announcements: content only
@dataclass(frozen=True)
class PubTruth(Announcement):
    content: Formula


@dataclass(frozen=True)
class PubLie(Announcement):
    content: Formula


@dataclass(frozen=True)
class SkPubTruth(Announcement):
    content: Formula


@dataclass(frozen=True)
class SkPubLie(Announcement):
    content: Formula


@dataclass(frozen=True)
class SkPubReject(Announcement):
    content: Formula


@dataclass(frozen=True)
class PlPubTruth(Announcement):
    content: Formula


@dataclass(frozen=True)
class PlPubLie(Announcement):
    content: Formula


# agent announcements: speaker plus content
@dataclass(frozen=True)
class AgTruth(Announcement):
    speaker: str
    content: Formula


@dataclass(frozen=True)
class AgLie(Announcement):
    speaker: str
    content: Formula


@dataclass(frozen=True)
class AgBluff(Announcement):
    speaker: str
    content: Formula


@dataclass(frozen=True)
class SkAgTruth(Announcement):
    speaker: str
    content: Formula


@dataclass(frozen=True)
class SkAgLie(Announcement):
    speaker: str
    content: Formula


@dataclass(frozen=True)
class SkAgBluff(Announcement):
    speaker: str
    content: Formula


@dataclass(frozen=True)
class SkAgTruthRejected(Announcement):
    speaker: str
    content: Formula


@dataclass(frozen=True)
class SkAgLieRejected(Announcement):
    speaker: str
    content: Formula


@dataclass(frozen=True)
class SkAgBluffRejected(Announcement):
    speaker: str
    content: Formula


@dataclass(frozen=True)
class PlAgTruth(Announcement):
    speaker: str
    content: Formula


@dataclass(frozen=True)
class PlAgLie(Announcement):
    speaker: str
    content: Formula


@dataclass(frozen=True)
class PlAgBluff(Announcement):
    speaker: str
    content: Formula


# surface keyword tables; GenericAction (defined in actions.py) has no
# surface syntax and appears in neither
_PUBLIC_KEYWORD = {
    PubTruth: "truth", PubLie: "lie",
    SkPubTruth: "truth_sk", SkPubLie: "lie_sk", SkPubReject: "rej_sk",
    PlPubTruth: "truth_pl", PlPubLie: "lie_pl",
}
_AGENT_KEYWORD = {
    AgTruth: "truth", AgLie: "lie", AgBluff: "bluff",
    SkAgTruth: "truth_sk", SkAgLie: "lie_sk", SkAgBluff: "bluff_sk",
    SkAgTruthRejected: "truth_skr", SkAgLieRejected: "lie_skr",
    SkAgBluffRejected: "bluff_skr",
    PlAgTruth: "truth_pl", PlAgLie: "lie_pl", PlAgBluff: "bluff_pl",
}
_FLAVOR_CLASSES = {
    "truth": (PubTruth, AgTruth),
    "lie": (PubLie, AgLie),
    "bluff": (None, AgBluff),
    "truth_sk": (SkPubTruth, SkAgTruth),
    "lie_sk": (SkPubLie, SkAgLie),
    "bluff_sk": (None, SkAgBluff),
    "rej_sk": (SkPubReject, None),
    "truth_skr": (None, SkAgTruthRejected),
    "lie_skr": (None, SkAgLieRejected),
    "bluff_skr": (None, SkAgBluffRejected),
    "truth_pl": (PlPubTruth, PlAgTruth),
    "lie_pl": (PlPubLie, PlAgLie),
    "bluff_pl": (None, PlAgBluff),
}


def ann_speaker(ann: Announcement) -> Optional[str]:
    return getattr(ann, "speaker", None)


def ann_contents(ann: Announcement) -> tuple:
    """Formulas embedded in an announcement (preconditions for generic ones)."""
    content = getattr(ann, "content", None)
    if content is not None:
        return (content,)
    action = getattr(ann, "action", None)  # GenericAction
    if action is not None:
        return tuple(action.model.pre[x] for x in action.model.actions)
    raise TypeError("unknown announcement: %r" % (ann,))


def ann_keyword(ann: Announcement) -> str:
    cls = type(ann)
    if cls in _PUBLIC_KEYWORD:
        return _PUBLIC_KEYWORD[cls]
    if cls in _AGENT_KEYWORD:
        return _AGENT_KEYWORD[cls]
    raise TypeError("announcement has no surface keyword: %r" % (ann,))


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow2><->)|(?P<arrow>->)|(?P<sym>[~&|()\[\]{}])|"
    r"(?P<name>[A-Za-z_][A-Za-z0-9_]*))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError("unexpected character %r at position %d" % (rest[0], pos))
        if m.group("arrow2"):
            tokens.append(("<->", "<->", m.start()))
        elif m.group("arrow"):
            tokens.append(("->", "->", m.start()))
        elif m.group("sym"):
            tokens.append((m.group("sym"), m.group("sym"), m.start()))
        else:
            tokens.append(("name", m.group("name"), m.start()))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, ahead: int = 0):
        j = min(self.i + ahead, len(self.tokens) - 1)
        return self.tokens[j]

    def next(self):
        tok = self.tokens[self.i]
        if tok[0] != "end":
            self.i += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(
                "expected %r but found %r at position %d" % (kind, tok[1] or "end of input", tok[2])
            )
        return tok

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError("%s at position %d" % (message, tok[2]))

    # precedence ladder -----------------------------------------------------

    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        parts = [self.imp()]
        while self.peek()[0] == "<->":
            self.next()
            parts.append(self.imp())
        out = parts[-1]
        for left in reversed(parts[:-1]):
            out = Iff(left, out)
        return out

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek()[0] == "->":
            self.next()
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.peek()[0] == "|":
            self.next()
            parts.append(self.conj())
        out = parts[-1]
        for left in reversed(parts[:-1]):
            out = Or(left, out)
        return out

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.peek()[0] == "&":
            self.next()
            parts.append(self.unary())
        out = parts[-1]
        for left in reversed(parts[:-1]):
            out = And(left, out)
        return out

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "~":
            self.next()
            return Not(self.unary())
        if kind == "[":
            self.next()
            ann = self.announcement()
            self.expect("]")
            return Dyn(ann, self.unary())
        if kind == "(":
            self.next()
            inner = self.formula()
            self.expect(")")
            return inner
        if kind == "name":
            if value in ("B", "K") and self.peek(1)[0] == "{":
                return self.modality(value)
            self.next()
            if value == "true":
                return Top()
            if value == "false":
                return Bot()
            if value in RESERVED:
                raise ParseError("reserved word %r cannot be an atom at position %d" % (value, pos))
            return Prop(value)
        self.fail("expected a formula")

    def modality(self, which: str) -> Formula:
        self.next()  # B or K
        self.expect("{")
        agent = self.expect("name")[1]
        if which == "K":
            self.expect("}")
            return Knows(agent, self.unary())
        if self.peek()[0] == "|":
            self.next()
            cond = self.formula()
            self.expect("}")
            return CondBelieves(agent, cond, self.unary())
        self.expect("}")
        return Believes(agent, self.unary())

    def announcement(self) -> Announcement:
        kind, value, pos = self.next()
        if kind != "name" or value not in _FLAVOR_CLASSES:
            raise ParseError("expected an announcement flavor at position %d" % pos)
        pub_cls, ag_cls = _FLAVOR_CLASSES[value]
        speaker = None
        if self.peek()[0] == "{":
            self.next()
            speaker = self.expect("name")[1]
            self.expect("}")
        content = self.formula()
        if speaker is None:
            if pub_cls is None:
                raise ParseError(
                    "flavor %r needs a speaker, like %s{a}, at position %d" % (value, value, pos)
                )
            return pub_cls(content)
        if ag_cls is None:
            raise ParseError("flavor %r is public only at position %d" % (value, pos))
        return ag_cls(speaker, content)


def parse_formula(
    text: str,
    agents: Optional[Iterable[str]] = None,
    atoms: Optional[Iterable[str]] = None,
) -> Formula:
    """Parse text into a Formula; optionally validate against a signature."""
    parser = _Parser(text)
    out = parser.formula()
    if parser.peek()[0] != "end":
        parser.fail("trailing input")
    _validate_signature(out, agents, atoms)
    return out


def parse_announcement(
    text: str,
    agents: Optional[Iterable[str]] = None,
    atoms: Optional[Iterable[str]] = None,
) -> Announcement:
    """Parse a bare announcement like "lie{a} p" (no surrounding brackets)."""
    parser = _Parser(text)
    out = parser.announcement()
    if parser.peek()[0] != "end":
        parser.fail("trailing input")
    if agents is not None or atoms is not None:
        _validate_signature(Dyn(out, Top()), agents, atoms)
    return out


def _validate_signature(f: Formula, agents, atoms) -> None:
    if agents is not None:
        known = set(agents)
        missing = agents_in(f) - known
        if missing:
            raise ParseError("unknown agent(s): %s" % ", ".join(sorted(missing)))
    if atoms is not None:
        known = set(atoms)
        missing = atoms_in(f) - known
        if missing:
            raise ParseError("unknown atom(s): %s" % ", ".join(sorted(missing)))


# ---------------------------------------------------------------------------
# printer

_P_IFF, _P_IMP, _P_OR, _P_AND, _P_UNARY, _P_ATOM = 1, 2, 3, 4, 5, 6


def format_formula(f: Formula) -> str:
    """Render with minimal parentheses; parse_formula round-trips the output."""
    return _fmt(f, 0)


def _fmt(f: Formula, min_prec: int) -> str:
    text, prec = _fmt_prec(f)
    if prec < min_prec:
        return "(" + text + ")"
    return text


def _fmt_prec(f: Formula):
    if isinstance(f, Prop):
        return f.name, _P_ATOM
    if isinstance(f, Top):
        return "true", _P_ATOM
    if isinstance(f, Bot):
        return "false", _P_ATOM
    if isinstance(f, Not):
        return "~" + _fmt(f.body, _P_UNARY), _P_UNARY
    if isinstance(f, Believes):
        return "B{%s} %s" % (f.agent, _fmt(f.body, _P_UNARY)), _P_UNARY
    if isinstance(f, CondBelieves):
        return (
            "B{%s|%s} %s" % (f.agent, _fmt(f.cond, 0), _fmt(f.body, _P_UNARY)),
            _P_UNARY,
        )
    if isinstance(f, Knows):
        return "K{%s} %s" % (f.agent, _fmt(f.body, _P_UNARY)), _P_UNARY
    if isinstance(f, Dyn):
        return (
            "[%s] %s" % (format_announcement(f.announcement), _fmt(f.body, _P_UNARY)),
            _P_UNARY,
        )
    if isinstance(f, And):
        return "%s & %s" % (_fmt(f.left, _P_AND + 1), _fmt(f.right, _P_AND)), _P_AND
    if isinstance(f, Or):
        return "%s | %s" % (_fmt(f.left, _P_OR + 1), _fmt(f.right, _P_OR)), _P_OR
    if isinstance(f, Implies):
        return "%s -> %s" % (_fmt(f.left, _P_IMP + 1), _fmt(f.right, _P_IMP)), _P_IMP
    if isinstance(f, Iff):
        return "%s <-> %s" % (_fmt(f.left, _P_IFF + 1), _fmt(f.right, _P_IFF)), _P_IFF
    raise TypeError("not a formula: %r" % (f,))


def format_announcement(ann: Announcement) -> str:
    cls = type(ann)
    if cls in _PUBLIC_KEYWORD:
        return "%s %s" % (_PUBLIC_KEYWORD[cls], _fmt(ann.content, 0))
    if cls in _AGENT_KEYWORD:
        return "%s{%s} %s" % (_AGENT_KEYWORD[cls], ann.speaker, _fmt(ann.content, 0))
    # GenericAction and friends; debugging aid only, not re-parseable
    action = getattr(ann, "action", None)
    if action is not None:
        return "action %s" % action.point
    raise TypeError("cannot format announcement: %r" % (ann,))


# ---------------------------------------------------------------------------
# structural helpers


def modal_depth(f: Formula) -> int:
    """Max nesting of Believes/Knows/CondBelieves/Dyn.

    A Dyn node counts one level over the deepest of its announcement
    contents and its body.
    """
    if isinstance(f, (Prop, Top, Bot)):
        return 0
    if isinstance(f, Not):
        return modal_depth(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, (Believes, Knows)):
        return 1 + modal_depth(f.body)
    if isinstance(f, CondBelieves):
        return 1 + max(modal_depth(f.cond), modal_depth(f.body))
    if isinstance(f, Dyn):
        inner = modal_depth(f.body)
        for g in ann_contents(f.announcement):
            inner = max(inner, modal_depth(g))
        return 1 + inner
    raise TypeError("not a formula: %r" % (f,))


def _walk(f: Formula):
    yield f
    if isinstance(f, Not):
        yield from _walk(f.body)
    elif isinstance(f, (And, Or, Implies, Iff)):
        yield from _walk(f.left)
        yield from _walk(f.right)
    elif isinstance(f, (Believes, Knows)):
        yield from _walk(f.body)
    elif isinstance(f, CondBelieves):
        yield from _walk(f.cond)
        yield from _walk(f.body)
    elif isinstance(f, Dyn):
        for g in ann_contents(f.announcement):
            yield from _walk(g)
        yield from _walk(f.body)


def atoms_in(f: Formula) -> set:
    return {g.name for g in _walk(f) if isinstance(g, Prop)}


def agents_in(f: Formula) -> set:
    agents = set()
    for g in _walk(f):
        if isinstance(g, (Believes, Knows, CondBelieves)):
            agents.add(g.agent)
        elif isinstance(g, Dyn):
            speaker = ann_speaker(g.announcement)
            if speaker is not None:
                agents.add(speaker)
    return agents


def has_dyn(f: Formula) -> bool:
    return any(isinstance(g, Dyn) for g in _walk(f))


def to_core(f: Formula) -> Formula:
    """Rewrite Or/Implies/Iff/Top into the ~/& core (Bot kept primitive).

    Evaluation-preserving on every model; used by tests as a second route.
    """
    if isinstance(f, (Prop, Bot)):
        return f
    if isinstance(f, Top):
        return Not(Bot())
    if isinstance(f, Not):
        return Not(to_core(f.body))
    if isinstance(f, And):
        return And(to_core(f.left), to_core(f.right))
    if isinstance(f, Or):
        return Not(And(Not(to_core(f.left)), Not(to_core(f.right))))
    if isinstance(f, Implies):
        return Not(And(to_core(f.left), Not(to_core(f.right))))
    if isinstance(f, Iff):
        return to_core(And(Implies(f.left, f.right), Implies(f.right, f.left)))
    if isinstance(f, Believes):
        return Believes(f.agent, to_core(f.body))
    if isinstance(f, Knows):
        return Knows(f.agent, to_core(f.body))
    if isinstance(f, CondBelieves):
        return CondBelieves(f.agent, to_core(f.cond), to_core(f.body))
    if isinstance(f, Dyn):
        # announcement contents stay as written; they are preconditions and
        # target sets, rewriting them is a separate concern
        return Dyn(f.announcement, to_core(f.body))
    raise TypeError("not a formula: %r" % (f,))
