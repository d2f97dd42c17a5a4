"""mendax: belief models, announcements that may be lies, and their updates."""

from .language import (
    AgBluff, AgLie, AgTruth, And, Announcement, Believes, Bot, CondBelieves,
    Dyn, Formula, Iff, Implies, Knows, Not, Or, ParseError, PlAgBluff, PlAgLie,
    PlAgTruth, PlPubLie, PlPubTruth, Prop, PubLie, PubTruth, SkAgBluff,
    SkAgBluffRejected, SkAgLie, SkAgLieRejected, SkAgTruth, SkAgTruthRejected,
    SkPubLie, SkPubReject, SkPubTruth, Top, agents_in, ann_contents,
    ann_keyword, ann_speaker, atoms_in, format_announcement, format_formula,
    has_dyn, modal_depth, parse_announcement, parse_formula,
)
from .models import (
    KripkeModel, ModelError, PointedModel, bisimilar, class_of, dump_model,
    enumerate_models, load_model, reachable, relation_in_class, to_dot,
)
from .semantics import (
    BELIEVES_LIE, BELIEVES_MISTAKE, BLUFFING, LYING, NEITHER, TRUTHFUL,
    InconsistentSpeaker, agent_arrow_update, announce,
    announcement_precondition, arrow_update, classify, denotation, detect,
    evaluate, restrict, restrict_pointed, satisfies,
)
from .actions import (
    ActionModel, PointedActionModel, agent_action_model, builtin_for,
    dump_action_model, load_action_model, product_model, product_state,
    product_update, pub_action_model, sk_agent_action_model, sk_agent_execute,
    sk_announce, sk_pub_action_model, transitive_closure,
)
from .plausibility import (
    PlausibilityActionModel, PlausibilityModel, PointedPlausibilityActionModel,
    PointedPlausibilityModel, belief_relation, builtin_pl_for, denotation_pl,
    dump_plausibility_model, enumerate_plausibility_models, eval_pl,
    hard_restrict, hard_restrict_pointed, load_plausibility_model,
    pl_agent_action_model, pl_announce, pl_product_update, pl_pub_action_model,
    to_kripke,
)
from .sweep import CandidateSpace, check_validity, find_countermodel
from .rewriting import (
    NormalFormError, RewriteTrace, adf, kd45_equivalent, strictify, translate,
)
from .riddle import (
    RiddleConfig, Scenario, ScenarioResult, ScenarioStep, StepReport,
    expand_utterance, load_scenario, riddle_model, riddle_plausibility_model,
    run_scenario, scenario_from_dict, state_coords,
)

__version__ = "0.1.0"
