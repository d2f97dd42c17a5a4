"""Tests for ranked plausibility models, soft updates, and derived belief."""
import json

import pytest

from mendax.language import (
    Believes,
    Bot,
    CondBelieves,
    Knows,
    Not,
    PlAgBluff,
    PlAgLie,
    PlAgTruth,
    PlPubLie,
    PlPubTruth,
    Prop,
    PubTruth,
    SkPubLie,
    Top,
    parse_formula,
)
from mendax.models import ModelError, class_of, relation_in_class
from mendax.plausibility import (
    PlausibilityActionModel,
    PlausibilityModel,
    PointedPlausibilityActionModel,
    PointedPlausibilityModel,
    belief_relation,
    builtin_pl_for,
    denotation_pl,
    dump_plausibility_model,
    enumerate_plausibility_models,
    eval_pl,
    hard_restrict,
    hard_restrict_pointed,
    load_plausibility_model,
    pl_agent_action_model,
    pl_announce,
    pl_product_update,
    pl_pub_action_model,
    to_kripke,
)

P = Prop("p")
UNIV2 = frozenset({("s0", "s0"), ("s0", "s1"), ("s1", "s0"), ("s1", "s1")})
IDENT2 = frozenset({("s0", "s0"), ("s1", "s1")})


def leaning(rank0=1, rank1=0):
    """One agent, one cell; s0 is the ~p state, s1 the p state."""
    return PlausibilityModel(
        ("s0", "s1"), ("a",), ("p",),
        {"a": UNIV2},
        {"a": {"s0": rank0, "s1": rank1}},
        {"p": frozenset({"s1"})},
    )


def two_agent(ranks_a, ranks_b, epi_a=UNIV2, epi_b=UNIV2):
    return PlausibilityModel(
        ("s0", "s1"), ("a", "b"), ("p",),
        {"a": epi_a, "b": epi_b},
        {"a": dict(zip(("s0", "s1"), ranks_a)), "b": dict(zip(("s0", "s1"), ranks_b))},
        {"p": frozenset({"s1"})},
    )


# ---------------------------------------------------------------------------
# structure and validation


def test_plausibility_validation():
    with pytest.raises(ModelError):
        PlausibilityModel((), ("a",), (), {}, {}, {})
    with pytest.raises(ModelError):  # epi not reflexive
        PlausibilityModel(
            ("s0", "s1"), ("a",), (), {"a": frozenset({("s0", "s0")})},
            {"a": {"s0": 0, "s1": 0}}, {},
        )
    with pytest.raises(ModelError):  # not symmetric
        PlausibilityModel(
            ("s0", "s1"), ("a",), (),
            {"a": frozenset({("s0", "s0"), ("s1", "s1"), ("s0", "s1")})},
            {"a": {"s0": 0, "s1": 0}}, {},
        )
    with pytest.raises(ModelError):  # missing rank
        PlausibilityModel(("s0",), ("a",), (), {"a": frozenset({("s0", "s0")})}, {}, {})
    with pytest.raises(ModelError):  # negative rank
        PlausibilityModel(
            ("s0",), ("a",), (), {"a": frozenset({("s0", "s0")})},
            {"a": {"s0": -1}}, {},
        )
    with pytest.raises(ModelError):  # rank must be a plain int
        PlausibilityModel(
            ("s0",), ("a",), (), {"a": frozenset({("s0", "s0")})},
            {"a": {"s0": True}}, {},
        )
    with pytest.raises(ModelError):  # ranks for unknown agent
        PlausibilityModel(
            ("s0",), ("a",), (), {"a": frozenset({("s0", "s0")})},
            {"a": {"s0": 0}, "b": {"s0": 0}}, {},
        )
    with pytest.raises(ModelError):  # val names unknown state
        PlausibilityModel(
            ("s0",), ("a",), ("p",), {"a": frozenset({("s0", "s0")})},
            {"a": {"s0": 0}}, {"p": frozenset({"zz"})},
        )
    with pytest.raises(ModelError):
        PointedPlausibilityModel(leaning(), "zz")


def test_plausibility_action_validation():
    with pytest.raises(ModelError):
        PlausibilityActionModel((), ("a",), {}, {}, {})
    with pytest.raises(ModelError):  # missing pre
        PlausibilityActionModel(
            ("x",), ("a",), {"a": frozenset({("x", "x")})}, {"a": {"x": 0}}, {}
        )
    with pytest.raises(ModelError):  # missing ranks
        PlausibilityActionModel(
            ("x",), ("a",), {"a": frozenset({("x", "x")})}, {}, {"x": Top()}
        )
    with pytest.raises(ModelError):
        PointedPlausibilityActionModel(pl_pub_action_model(P, ("a",)), "zz")


def test_cell():
    m = two_agent((0, 0), (0, 0), epi_a=IDENT2)
    assert m.cell("a", "s0") == frozenset({"s0"})
    assert m.cell("b", "s0") == frozenset({"s0", "s1"})


# ---------------------------------------------------------------------------
# derived belief


def test_belief_relation_prefers_minimal_ranks():
    m = leaning()  # s1 more plausible
    assert belief_relation(m, "a") == frozenset({("s0", "s1"), ("s1", "s1")})
    with pytest.raises(ModelError):
        belief_relation(m, "zz")


def test_uniform_ranks_collapse_belief_to_the_cell():
    m = leaning(rank0=2, rank1=2)
    assert belief_relation(m, "a") == UNIV2
    assert to_kripke(m).rel["a"] == UNIV2


def test_to_kripke_mirrors_valuation():
    k = to_kripke(leaning())
    assert k.states == ("s0", "s1")
    assert k.val["p"] == frozenset({"s1"})
    assert "kd45" in class_of(k)


def test_belief_relation_is_kd45_and_knowledge_implies_belief():
    checked = 0
    for m in enumerate_plausibility_models(2, ["a", "b"], ["p"], max_rank=1):
        for ag in m.agents:
            rel = belief_relation(m, ag)
            assert relation_in_class(rel, m.states, "kd45")
        for f in (P, Not(P), Believes("b", P)):
            know = denotation_pl(m, Knows("a", f))
            bel = denotation_pl(m, Believes("a", f))
            assert know <= bel
        checked += 1
    # 1 state: (1 partition x 2 rank maps)^2 agents x 2 valuations;
    # 2 states: (2 x 4)^2 x 4
    assert checked == 4 * 2 + 64 * 4


def test_conditional_belief_on_top_is_plain_belief():
    for m in enumerate_plausibility_models(2, ["a"], ["p"], max_rank=2):
        for f in (P, Not(P)):
            assert denotation_pl(m, CondBelieves("a", Top(), f)) == denotation_pl(
                m, Believes("a", f)
            )


def test_conditional_belief_overrides_plain_belief():
    m = leaning()  # a believes p outright
    pm = PointedPlausibilityModel(m, "s0")
    assert eval_pl(pm, parse_formula("B{a} p"))
    assert eval_pl(pm, parse_formula("B{a|~p} ~p"))
    assert not eval_pl(pm, parse_formula("B{a|~p} p"))
    # conditioning on something the agent rules out holds vacuously
    assert eval_pl(pm, CondBelieves("a", Bot(), P))


def test_knowledge_is_cellwise_truth():
    m = two_agent((0, 0), (0, 0), epi_a=IDENT2)
    pm = PointedPlausibilityModel(m, "s1")
    assert eval_pl(pm, Knows("a", P))
    assert not eval_pl(pm, Knows("b", P))
    assert not eval_pl(pm, Believes("b", P))


# ---------------------------------------------------------------------------
# soft announcements: the flip example


def test_plausible_truth_flips_leaning():
    # a leans the wrong way (finds ~p more plausible), p actually holds
    m = leaning(rank0=0, rank1=1)
    pm = PointedPlausibilityModel(m, "s1")
    assert eval_pl(pm, Believes("a", Not(P)))
    after = pl_announce(pm, PlPubTruth(P))
    assert after is not None
    assert after.point == "(s1,truth_pl)"
    assert eval_pl(after, Believes("a", P))
    # soft: the ~p state survives as a less plausible alternative
    assert set(after.model.states) == {"(s0,lie_pl)", "(s1,truth_pl)"}
    assert not eval_pl(after, Knows("a", P))
    ranks = after.model.rank["a"]
    assert ranks["(s1,truth_pl)"] == 0 and ranks["(s0,lie_pl)"] == 1


def test_plausible_lie_deceives_but_preserves_knowledge():
    m = leaning(rank0=0, rank1=1)
    pm = PointedPlausibilityModel(m, "s0")
    after = pl_announce(pm, PlPubLie(P))
    assert after is not None
    assert after.point == "(s0,lie_pl)"
    # deceived about p, but the true state is still epistemically open
    assert eval_pl(after, Believes("a", P))
    assert not eval_pl(after, Knows("a", P))
    assert not eval_pl(after, Believes("a", Bot()))


def test_plausible_lie_cannot_fool_knowledge():
    m = PlausibilityModel(
        ("s0",), ("a",), ("p",), {"a": frozenset({("s0", "s0")})},
        {"a": {"s0": 0}}, {},
    )
    pm = PointedPlausibilityModel(m, "s0")
    after = pl_announce(pm, PlPubLie(P))
    assert after is not None
    # unlike the hard lie, the soft one leaves the knower consistent
    assert eval_pl(after, Knows("a", Not(P)))
    assert eval_pl(after, Believes("a", Not(P)))
    assert "kd45" in class_of(to_kripke(after.model))


def test_pl_announce_vacuous():
    m = two_agent((0, 0), (0, 0), epi_a=IDENT2)
    pm = PointedPlausibilityModel(m, "s1")  # a believes p here
    assert pl_announce(pm, PlAgLie("a", P)) is None
    assert pl_announce(pm, PlAgBluff("a", P)) is None
    assert pl_announce(pm, PlAgTruth("a", P)) is not None


def test_plausible_agent_lie_end_to_end():
    m = two_agent((0, 0), (0, 0), epi_a=IDENT2)
    pm = PointedPlausibilityModel(m, "s0")
    after = pl_announce(pm, PlAgLie("a", P))
    assert after is not None
    assert after.point == "(s0,lie_pl)"
    assert eval_pl(after, Believes("b", P))
    assert eval_pl(after, Knows("a", Not(P)))
    # b ranks the truthful reading first, then bluff, then lie
    am = pl_agent_action_model("a", P, ("a", "b"))
    assert am.rank["b"] == {"truth_pl": 0, "bluff_pl": 1, "lie_pl": 2}
    assert am.rank["a"] == {"truth_pl": 0, "bluff_pl": 0, "lie_pl": 0}


def test_builtin_pl_for():
    for ann, name in (
        (PlPubTruth(P), "truth_pl"),
        (PlPubLie(P), "lie_pl"),
        (PlAgTruth("a", P), "truth_pl"),
        (PlAgLie("a", P), "lie_pl"),
        (PlAgBluff("a", P), "bluff_pl"),
    ):
        am, got = builtin_pl_for(ann, ("a", "b"))
        assert got == name and name in am.actions
    with pytest.raises(ModelError):
        builtin_pl_for(SkPubLie(P), ("a",))
    with pytest.raises(ModelError):
        pl_agent_action_model("c", P, ("a", "b"))


# ---------------------------------------------------------------------------
# the product rule


def test_product_rank_is_anti_lexicographic():
    m = leaning(rank0=0, rank1=1)
    am = PlausibilityActionModel(
        ("x", "y"), ("a",),
        {"a": frozenset((u, v) for u in ("x", "y") for v in ("x", "y"))},
        {"a": {"x": 1, "y": 0}},
        {"x": Top(), "y": Top()},
    )
    got = pl_product_update(
        PointedPlausibilityModel(m, "s0"), PointedPlausibilityActionModel(am, "x")
    )
    assert got is not None
    ranks = got.model.rank["a"]
    # action rank decides first, state rank breaks ties
    assert ranks == {
        "(s0,y)": 0, "(s1,y)": 1, "(s0,x)": 2, "(s1,x)": 3,
    }


def test_trivial_action_preserves_beliefs():
    am = PlausibilityActionModel(
        ("x",), ("a",), {"a": frozenset({("x", "x")})}, {"a": {"x": 0}}, {"x": Top()}
    )
    for r0, r1 in ((0, 0), (0, 1), (2, 1)):
        m = leaning(rank0=r0, rank1=r1)
        got = pl_product_update(
            PointedPlausibilityModel(m, "s0"), PointedPlausibilityActionModel(am, "x")
        )
        before = {s for (x, s) in belief_relation(m, "a") if x == "s0"}
        after = {
            s for (x, s) in belief_relation(got.model, "a") if x == "(s0,x)"
        }
        assert after == {"(%s,x)" % s for s in before}


def test_product_renumbers_ranks_per_class():
    # gaps in the pair ordering do not leak into the output ranks
    m = leaning(rank0=0, rank1=1)
    after = pl_announce(PointedPlausibilityModel(m, "s0"), PlPubLie(P))
    ranks = after.model.rank["a"]
    assert sorted(ranks.values()) == [0, 1]


def test_pl_product_needs_all_agents():
    m = two_agent((0, 0), (0, 0))
    am = pl_pub_action_model(P, ("a",))
    with pytest.raises(ModelError):
        pl_product_update(
            PointedPlausibilityModel(m, "s0"), PointedPlausibilityActionModel(am, "lie_pl")
        )


# ---------------------------------------------------------------------------
# hard restriction and dynamic formulas


def test_hard_restrict():
    m = two_agent((0, 1), (0, 0))
    out = hard_restrict(m, P)
    assert out.states == ("s1",)
    assert out.epi["a"] == frozenset({("s1", "s1")})
    assert out.rank["a"] == {"s1": 1}
    with pytest.raises(ModelError):
        hard_restrict(m, Bot())
    with pytest.raises(ModelError):
        hard_restrict_pointed(PointedPlausibilityModel(m, "s0"), P)


def test_dyn_on_plausibility_models():
    m = leaning(rank0=0, rank1=1)
    # hard truthful announcement eliminates, soft ones re-rank
    assert denotation_pl(m, parse_formula("[truth p] K{a} p")) == frozenset(
        {"s0", "s1"}
    )
    assert denotation_pl(m, parse_formula("[truth_pl p] B{a} p")) == frozenset(
        {"s0", "s1"}
    )
    assert denotation_pl(m, parse_formula("[truth_pl p] K{a} p")) == frozenset(
        {"s0"}
    )
    assert denotation_pl(m, parse_formula("[lie_pl p] B{a} p")) == frozenset(
        {"s0", "s1"}
    )
    with pytest.raises(ModelError):
        denotation_pl(m, parse_formula("[lie p] B{a} p"))
    with pytest.raises(ModelError):
        denotation_pl(m, parse_formula("[lie_sk p] B{a} p"))


def test_pl_denotation_errors():
    m = leaning()
    with pytest.raises(ModelError):
        denotation_pl(m, Prop("q"))
    with pytest.raises(ModelError):
        denotation_pl(m, Knows("zz", P))
    with pytest.raises(ModelError):
        denotation_pl(m, CondBelieves("zz", Top(), P))


# ---------------------------------------------------------------------------
# enumeration and files


def test_enumerate_plausibility_models_count():
    got = list(enumerate_plausibility_models(2, ["a"], ["p"], max_rank=1))
    # 1 state: 1 partition x 2 rank maps x 2 valuations; 2 states:
    # 2 partitions x 4 rank maps x 4 valuations
    assert len(got) == 1 * 2 * 2 + 2 * 4 * 4
    assert len(set(map(repr, got))) == len(got)


def test_pl_json_round_trip():
    m = two_agent((0, 1), (2, 0), epi_a=IDENT2)
    text = dump_plausibility_model(m)
    assert load_plausibility_model(text) == m
    pm = PointedPlausibilityModel(m, "s1")
    back = load_plausibility_model(dump_plausibility_model(pm))
    assert back == pm
    doc = json.loads(text)
    assert set(doc) == {"agents", "atoms", "states", "val", "epi", "rank"}


def test_pl_json_rejects_bad_documents():
    good = json.loads(dump_plausibility_model(leaning()))
    for breakage in (
        lambda d: d.pop("rank"),
        lambda d: d.update(extra=1),
        lambda d: d.update(rank={"a": [0, 0]}),
        lambda d: d.update(rank={"a": {"s0": 0, "s1": "x"}}),
        lambda d: d.update(epi={"a": [["s0"]]}),
        lambda d: d.update(epi={"a": [["s0", "s0"]]}),
        lambda d: d.update(epi=[]),
        lambda d: d.update(val=[]),
        lambda d: d.update(point="zz"),
        lambda d: d.update(states="s0"),
    ):
        doc = json.loads(json.dumps(good))
        breakage(doc)
        with pytest.raises(ModelError):
            load_plausibility_model(json.dumps(doc))
    with pytest.raises(ModelError):
        load_plausibility_model("{")
