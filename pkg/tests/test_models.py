"""Tests for the Kripke model layer: validation, classes, bisimulation, IO."""
import itertools
import json

import pytest
from hypothesis import given, strategies as st

from mendax.language import Believes, Not, Prop, parse_formula
from mendax.models import (
    KripkeModel,
    ModelError,
    PointedModel,
    bisimilar,
    class_of,
    dump_model,
    enumerate_models,
    load_model,
    reachable,
    relation_in_class,
    to_dot,
)
from mendax.semantics import evaluate


def small(rel_a, rel_b=None, *, val=("t",), states=("s", "t")):
    rel = {"a": frozenset(rel_a)}
    agents = ("a",)
    if rel_b is not None:
        rel["b"] = frozenset(rel_b)
        agents = ("a", "b")
    return KripkeModel(states, agents, ("p",), rel, {"p": frozenset(val)})


# ---------------------------------------------------------------------------
# construction and validation


def test_model_validation_errors():
    with pytest.raises(ModelError):
        KripkeModel((), ("a",), ("p",), {}, {})
    with pytest.raises(ModelError):
        KripkeModel(("s", "s"), ("a",), ("p",), {}, {})
    with pytest.raises(ModelError):
        KripkeModel(("s",), ("a",), ("p",), {"b": frozenset()}, {})
    with pytest.raises(ModelError):
        KripkeModel(("s",), ("a",), ("p",), {"a": frozenset({("s", "x")})}, {})
    with pytest.raises(ModelError):
        KripkeModel(("s",), ("a",), ("p",), {}, {"q": frozenset()})
    with pytest.raises(ModelError):
        KripkeModel(("s",), ("a",), ("p",), {}, {"p": frozenset({"x"})})
    with pytest.raises(ModelError):
        PointedModel(small([]), "nope")


def test_missing_rows_filled_in():
    m = KripkeModel(("s",), ("a", "b"), ("p", "q"), {}, {})
    assert m.rel["a"] == frozenset()
    assert m.rel["b"] == frozenset()
    assert m.val["q"] == frozenset()
    assert m.successors("a", "s") == frozenset()
    assert m.atoms_at("s") == frozenset()


def test_successors_unknown_agent():
    with pytest.raises(ModelError):
        small([]).successors("c", "s")


# ---------------------------------------------------------------------------
# frame classes, checked against independent definitions


def brute_transitive(pairs):
    return all(
        (s, u) in pairs
        for (s, t) in pairs
        for (t2, u) in pairs
        if t == t2
    )


def brute_euclidean(pairs):
    return all(
        (t, u) in pairs
        for (s, t) in pairs
        for (s2, u) in pairs
        if s == s2
    )


def brute_serial(pairs, states):
    return all(any(x == s for (x, _) in pairs) for s in states)


def brute_reflexive(pairs, states):
    return all((s, s) in pairs for s in states)


def brute_symmetric(pairs):
    return all((t, s) in pairs for (s, t) in pairs)


def all_relations(states):
    pool = [(s, t) for s in states for t in states]
    for bits in range(1 << len(pool)):
        yield frozenset(p for i, p in enumerate(pool) if bits >> i & 1)


def test_relation_in_class_matches_brute_force():
    states = ("s0", "s1")
    for pairs in all_relations(states):
        assert relation_in_class(pairs, states, "k")
        assert relation_in_class(pairs, states, "k45") == (
            brute_transitive(pairs) and brute_euclidean(pairs)
        )
        assert relation_in_class(pairs, states, "kd45") == (
            brute_transitive(pairs)
            and brute_euclidean(pairs)
            and brute_serial(pairs, states)
        )
        assert relation_in_class(pairs, states, "s5") == (
            brute_reflexive(pairs, states)
            and brute_symmetric(pairs)
            and brute_transitive(pairs)
        )


def test_relation_in_class_three_state_sample():
    # spot checks at three states, where the 2^9 sweep is still cheap
    states = ("s0", "s1", "s2")
    count = {"k45": 0, "kd45": 0, "s5": 0}
    for pairs in all_relations(states):
        for cls in count:
            got = relation_in_class(pairs, states, cls)
            if cls == "k45":
                want = brute_transitive(pairs) and brute_euclidean(pairs)
            elif cls == "kd45":
                want = (
                    brute_transitive(pairs)
                    and brute_euclidean(pairs)
                    and brute_serial(pairs, states)
                )
            else:
                want = (
                    brute_reflexive(pairs, states)
                    and brute_symmetric(pairs)
                    and brute_transitive(pairs)
                )
            assert got == want
            count[cls] += got
    # every class is non-trivial at this size
    assert all(0 < count[cls] < 512 for cls in count)


def test_relation_in_class_unknown():
    with pytest.raises(ModelError):
        relation_in_class(frozenset(), ("s",), "t")


def test_class_of():
    m = small([("s", "t"), ("t", "t")])
    assert class_of(m) == {"k", "k45", "kd45"}
    m = small([("s", "s"), ("t", "t")])
    assert class_of(m) == {"k", "k45", "kd45", "s5"}
    m = small([("s", "t")])
    assert class_of(m) == {"k"}
    m = small([])
    assert class_of(m) == {"k", "k45"}
    # classes are the intersection across agents
    m = small([("s", "s"), ("t", "t")], [("s", "t"), ("t", "t")])
    assert class_of(m) == {"k", "k45", "kd45"}
    m = small([("s", "s"), ("t", "t")], [("s", "t")])
    assert class_of(m) == {"k"}


def test_class_of_equivalence_not_required_to_be_reflexive_for_kd45():
    # a total euclidean+transitive relation that is not reflexive
    m = small([("s", "t"), ("t", "t")])
    assert "kd45" in class_of(m)
    assert "s5" not in class_of(m)


# ---------------------------------------------------------------------------
# reachability


def test_reachable():
    m = KripkeModel(
        ("s", "t", "u", "v"),
        ("a", "b"),
        ("p",),
        {"a": frozenset({("s", "t")}), "b": frozenset({("t", "u")})},
        {"p": frozenset()},
    )
    assert reachable(m, "s") == frozenset({"s", "t", "u"})
    assert reachable(m, "v") == frozenset({"v"})
    assert reachable(m, "u") == frozenset({"u"})


# ---------------------------------------------------------------------------
# bisimulation


def test_bisimilar_duplicate_state():
    one = PointedModel(small([("s", "t"), ("t", "t")]), "s")
    # same shape with the t-state split in two
    m2 = KripkeModel(
        ("x", "y1", "y2"),
        ("a",),
        ("p",),
        {"a": frozenset({("x", "y1"), ("x", "y2"), ("y1", "y2"), ("y2", "y1")})},
        {"p": frozenset({"y1", "y2"})},
    )
    assert bisimilar(one, PointedModel(m2, "x"))


def test_bisimilar_negative_valuation():
    one = PointedModel(small([("s", "t")]), "s")
    other = PointedModel(small([("s", "t")], val=()), "s")
    assert not bisimilar(one, other)


def test_bisimilar_negative_structure():
    one = PointedModel(small([("s", "t")]), "s")
    other = PointedModel(small([("s", "t"), ("t", "s")]), "s")
    assert not bisimilar(one, other)


def test_bisimilar_ignores_unreachable_junk():
    base = PointedModel(small([("s", "t")]), "s")
    junk = KripkeModel(
        ("s", "t", "z"),
        ("a",),
        ("p",),
        {"a": frozenset({("s", "t"), ("z", "z")})},
        {"p": frozenset({"t", "z"})},
    )
    assert bisimilar(base, PointedModel(junk, "s"))


def test_bisimilar_signature_mismatch():
    one = PointedModel(small([]), "s")
    m2 = KripkeModel(("s",), ("a",), ("q",), {}, {})
    with pytest.raises(ModelError):
        bisimilar(one, PointedModel(m2, "s"))


def _renamed(m: KripkeModel, suffix: str) -> KripkeModel:
    ren = {s: s + suffix for s in m.states}
    return KripkeModel(
        tuple(ren[s] for s in m.states),
        m.agents,
        m.atoms,
        {a: frozenset((ren[s], ren[t]) for (s, t) in m.rel[a]) for a in m.agents},
        {p: frozenset(ren[s] for s in m.val[p]) for p in m.atoms},
    )


def test_bisimilar_invariant_under_renaming():
    for m in itertools.islice(enumerate_models(2, ["a", "b"], ["p"]), 0, 4000, 97):
        for s in m.states:
            assert bisimilar(PointedModel(m, s), PointedModel(_renamed(m, "_r"), s + "_r"))


# modal formulas cannot tell bisimilar points apart; exercised over random
# pairs of small models with a fixed formula family
_FAMILY = [
    Prop("p"),
    Believes("a", Prop("p")),
    Believes("b", Not(Prop("p"))),
    Believes("a", Believes("b", Prop("p"))),
    parse_formula("B{a} (p | B{b} ~p)"),
]


@st.composite
def pointed_models(draw):
    n = draw(st.integers(min_value=1, max_value=3))
    states = tuple("s%d" % i for i in range(n))
    rel = {}
    for ag in ("a", "b"):
        pairs = draw(
            st.frozensets(
                st.tuples(st.sampled_from(states), st.sampled_from(states)),
                max_size=n * n,
            )
        )
        rel[ag] = pairs
    val = {"p": draw(st.frozensets(st.sampled_from(states), max_size=n))}
    point = draw(st.sampled_from(states))
    return PointedModel(KripkeModel(states, ("a", "b"), ("p",), rel, val), point)


@given(pointed_models(), pointed_models())
def test_bisimilar_points_agree_on_formulas(pm1, pm2):
    if bisimilar(pm1, pm2):
        for f in _FAMILY:
            assert evaluate(pm1, f) == evaluate(pm2, f)


@given(pointed_models())
def test_bisimilar_reflexive(pm):
    assert bisimilar(pm, pm)


# ---------------------------------------------------------------------------
# enumeration


def test_enumerate_models_counts():
    # n=1: 2 relations per agent, 2 valuations; n=2: 16 relations, 4 valuations
    got = list(enumerate_models(2, ["a"], ["p"]))
    assert len(got) == 2 * 2 + 16 * 4
    assert len(set(map(repr, got))) == len(got)
    got = list(enumerate_models(1, ["a", "b"], ["p", "q"]))
    assert len(got) == 2 * 2 * 2 * 2


def test_enumerate_models_respects_class():
    for m in enumerate_models(2, ["a"], ["p"], cls="kd45"):
        assert "kd45" in class_of(m)
    # s5 relations on two states: identity, identity+one loop pair, full square
    rels = {m.rel["a"] for m in enumerate_models(2, ["a"], [], cls="s5")}
    full = frozenset({("s0", "s0"), ("s1", "s1"), ("s0", "s1"), ("s1", "s0")})
    ident = frozenset({("s0", "s0"), ("s1", "s1")})
    assert {r for r in rels if len(r) > 1} == {ident, full}


def test_enumerate_models_bad_bound():
    with pytest.raises(ModelError):
        list(enumerate_models(0, ["a"], ["p"]))


# ---------------------------------------------------------------------------
# JSON round trip


def test_json_round_trip():
    m = small([("s", "t"), ("t", "t")], [("s", "s")])
    text = dump_model(m)
    assert load_model(text) == m
    pm = PointedModel(m, "t")
    back = load_model(dump_model(pm))
    assert isinstance(back, PointedModel)
    assert back == pm


def test_json_rejects_bad_documents():
    good = json.loads(dump_model(small([("s", "t")])))
    for breakage in (
        lambda d: d.pop("states"),
        lambda d: d.update(states=["s", "s", "t"]),
        lambda d: d.update(extra=1),
        lambda d: d.update(rel={"a": [["s"]]}),
        lambda d: d.update(rel={"a": "st"}),
        lambda d: d.update(val={"p": "t"}),
        lambda d: d.update(agents=["a b"]),
        lambda d: d.update(atoms=["true"]),
        lambda d: d.update(point=7),
        lambda d: d.update(point="zz"),
    ):
        doc = json.loads(json.dumps(good))
        breakage(doc)
        with pytest.raises(ModelError):
            load_model(json.dumps(doc))
    with pytest.raises(ModelError):
        load_model("{not json")
    with pytest.raises(ModelError):
        load_model("[1, 2]")


# ---------------------------------------------------------------------------
# DOT export


def test_to_dot():
    m = small([("s", "t")], [("s", "t"), ("t", "s")])
    dot = to_dot(PointedModel(m, "s"))
    assert dot.startswith("digraph model {")
    assert '"s" [label="s", shape=doublecircle];' in dot
    assert '"t" [label="t\\np", shape=circle];' in dot
    assert '"s" -> "t" [label="a,b"];' in dot
    assert '"t" -> "s" [label="b"];' in dot
    # deterministic
    assert dot == to_dot(m, point="s")
