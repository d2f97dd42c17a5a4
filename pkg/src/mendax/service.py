"""Request/response models and handlers shared by the HTTP app and the CLI.

Every operation lives here as a plain handler function over pydantic
models. FastAPI routes and the command line both delegate to these, so the
two front ends cannot drift apart. Model documents are the same JSON shapes
the file loaders accept; a document with "epi" and "rank" keys is treated
as a plausibility model, one with "rel" as a plain relational model.
"""
from __future__ import annotations

from typing import Any, Dict, List, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import actions as actions_mod
from . import models as models_mod
from . import plausibility as pl_mod
from . import rewriting, riddle, semantics, sweep
from .language import (
    Announcement, PlAgBluff, PlAgLie, PlAgTruth, PlPubLie, PlPubTruth,
    PubLie, PubTruth, AgBluff, AgLie, AgTruth, format_formula,
    parse_announcement, parse_formula,
)
from .models import ModelError, PointedModel

VACUOUS_MESSAGE = "vacuous: precondition failed"


def _is_plausibility_doc(doc: dict) -> bool:
    return isinstance(doc, dict) and "epi" in doc


def _pointed_kripke(doc: dict) -> PointedModel:
    loaded = models_mod.from_json_dict(doc)
    if not isinstance(loaded, PointedModel):
        raise ModelError("the model document needs a \"point\"")
    return loaded


def _pointed_plausibility(doc: dict) -> pl_mod.PointedPlausibilityModel:
    loaded = pl_mod.from_pl_json_dict(doc)
    if not isinstance(loaded, pl_mod.PointedPlausibilityModel):
        raise ModelError("the model document needs a \"point\"")
    return loaded


def _model_doc(pm: Any) -> dict:
    if isinstance(pm, PointedModel):
        return models_mod.to_json_dict(pm.model, pm.point)
    if isinstance(pm, pl_mod.PointedPlausibilityModel):
        return pl_mod.to_pl_json_dict(pm.model, pm.point)
    raise ModelError("cannot serialize %r" % type(pm).__name__)


# ---------------------------------------------------------------------------
# check


class CheckRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    model: Dict[str, Any]
    formula: str


class CheckResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    value: bool


def handle_check(req: CheckRequest) -> CheckResponse:
    if _is_plausibility_doc(req.model):
        pm = _pointed_plausibility(req.model)
        f = parse_formula(req.formula, pm.model.agents, pm.model.atoms)
        return CheckResponse(value=pl_mod.eval_pl(pm, f))
    pm = _pointed_kripke(req.model)
    f = parse_formula(req.formula, pm.model.agents, pm.model.atoms)
    return CheckResponse(value=semantics.evaluate(pm, f))


# ---------------------------------------------------------------------------
# update


class UpdateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    model: Dict[str, Any]
    announcement: str


class UpdateResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    vacuous: bool
    model: Optional[Dict[str, Any]] = None


_DIRECT = (PubTruth, PubLie, AgTruth, AgLie, AgBluff)
_PLAUSIBLE = (PlPubTruth, PlPubLie, PlAgTruth, PlAgLie, PlAgBluff)


def _update_kripke(pm: PointedModel, ann: Announcement) -> Optional[PointedModel]:
    if isinstance(ann, _DIRECT):
        return semantics.announce(pm, ann)
    if isinstance(ann, _PLAUSIBLE):
        raise ModelError(
            "plausible flavors need a plausibility model (epi/rank) document"
        )
    return actions_mod.sk_announce(pm, ann)


def _update_plausibility(
    pm: pl_mod.PointedPlausibilityModel, ann: Announcement
) -> Optional[pl_mod.PointedPlausibilityModel]:
    if isinstance(ann, PubTruth):
        if not pl_mod.eval_pl(pm, ann.content):
            return None
        return pl_mod.hard_restrict_pointed(pm, ann.content)
    if isinstance(ann, _PLAUSIBLE):
        return pl_mod.pl_announce(pm, ann)
    raise ModelError(
        "plausibility models take plausible flavors (or a hard truthful "
        "public announcement); got %r" % type(ann).__name__
    )


def handle_update(req: UpdateRequest) -> UpdateResponse:
    if _is_plausibility_doc(req.model):
        pm = _pointed_plausibility(req.model)
        ann = parse_announcement(req.announcement, pm.model.agents, pm.model.atoms)
        updated: Any = _update_plausibility(pm, ann)
    else:
        pm = _pointed_kripke(req.model)
        ann = parse_announcement(req.announcement, pm.model.agents, pm.model.atoms)
        updated = _update_kripke(pm, ann)
    if updated is None:
        return UpdateResponse(vacuous=True, model=None)
    return UpdateResponse(vacuous=False, model=_model_doc(updated))


# ---------------------------------------------------------------------------
# translate


class TranslateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    formula: str
    trace: bool = False


class TraceStepOut(BaseModel):
    model_config = ConfigDict(extra="forbid")
    axiom: str
    before: str
    after: str


class TranslateResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    formula: str
    steps: Optional[List[TraceStepOut]] = None


def handle_translate(req: TranslateRequest) -> TranslateResponse:
    f = parse_formula(req.formula)
    out, trace = rewriting.translate(f)
    steps = None
    if req.trace:
        steps = [
            TraceStepOut(
                axiom=name,
                before=format_formula(before),
                after=format_formula(after),
            )
            for (name, before, after) in trace.steps
        ]
    return TranslateResponse(formula=format_formula(out), steps=steps)


# ---------------------------------------------------------------------------
# valid


class ValidRequest(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)
    formula: str
    cls: str = Field(default="k", alias="class")
    max_states: int = 3
    agents: List[str] = ["a", "b"]
    atoms: List[str] = ["p"]


class ValidResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    valid: bool
    countermodel: Optional[Dict[str, Any]] = None


def handle_valid(req: ValidRequest) -> ValidResponse:
    f = parse_formula(req.formula, req.agents, req.atoms)
    found = sweep.check_validity(
        f, cls=req.cls, max_states=req.max_states,
        agents=tuple(req.agents), atoms=tuple(req.atoms),
    )
    if found is None:
        return ValidResponse(valid=True, countermodel=None)
    return ValidResponse(valid=False, countermodel=_model_doc(found))


# ---------------------------------------------------------------------------
# bisim


class BisimRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    left: Dict[str, Any]
    right: Dict[str, Any]


class BisimResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    bisimilar: bool


def handle_bisim(req: BisimRequest) -> BisimResponse:
    left = _pointed_kripke(req.left)
    right = _pointed_kripke(req.right)
    return BisimResponse(bisimilar=models_mod.bisimilar(left, right))


# ---------------------------------------------------------------------------
# dot


class DotRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    model: Dict[str, Any]


class DotResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    dot: str


def handle_dot(req: DotRequest) -> DotResponse:
    if _is_plausibility_doc(req.model):
        loaded = pl_mod.from_pl_json_dict(req.model)
        if isinstance(loaded, pl_mod.PointedPlausibilityModel):
            return DotResponse(
                dot=models_mod.to_dot(pl_mod.to_kripke(loaded.model), loaded.point)
            )
        return DotResponse(dot=models_mod.to_dot(pl_mod.to_kripke(loaded)))
    loaded = models_mod.from_json_dict(req.model)
    if isinstance(loaded, PointedModel):
        return DotResponse(dot=models_mod.to_dot(loaded.model, loaded.point))
    return DotResponse(dot=models_mod.to_dot(loaded))


# ---------------------------------------------------------------------------
# product


class ProductRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    model: Dict[str, Any]
    action: Dict[str, Any]


class ProductResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    vacuous: bool
    model: Optional[Dict[str, Any]] = None


def handle_product(req: ProductRequest) -> ProductResponse:
    am = actions_mod.from_action_json_dict(req.action)
    loaded = models_mod.from_json_dict(req.model)
    if isinstance(loaded, PointedModel) and isinstance(
        am, actions_mod.PointedActionModel
    ):
        updated = actions_mod.product_update(loaded, am)
        if updated is None:
            return ProductResponse(vacuous=True, model=None)
        return ProductResponse(vacuous=False, model=_model_doc(updated))
    plain_model = loaded.model if isinstance(loaded, PointedModel) else loaded
    plain_action = am.model if isinstance(am, actions_mod.PointedActionModel) else am
    product = actions_mod.product_model(plain_model, plain_action)
    return ProductResponse(
        vacuous=False, model=models_mod.to_json_dict(product)
    )


# ---------------------------------------------------------------------------
# riddle


class RiddleRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    scenario: Dict[str, Any]
    mode: str = "direct"


class RiddleStepOut(BaseModel):
    model_config = ConfigDict(extra="forbid")
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
    survivors: List[str] = []
    model: Optional[Dict[str, Any]] = None


class RiddleResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    mode: str
    bound: int
    actual: List[int]
    working_bound: int
    initial: Dict[str, Any]
    steps: List[RiddleStepOut]


def handle_riddle(req: RiddleRequest) -> RiddleResponse:
    sc = riddle.scenario_from_dict(req.scenario)
    result = riddle.run_scenario(sc, req.mode)
    steps = []
    for rep in result.steps:
        steps.append(
            RiddleStepOut(
                index=rep.index,
                speaker=rep.speaker,
                flavor=rep.flavor,
                utterance=rep.utterance,
                formula=rep.formula,
                classification=rep.classification,
                executable=rep.executable,
                note=rep.note,
                action=rep.action,
                detect_observer=rep.detect_observer,
                detect_verdict=rep.detect_verdict,
                boundary=rep.boundary,
                survivors=list(rep.survivors),
                model=None if rep.window_model is None else _model_doc(rep.window_model),
            )
        )
    return RiddleResponse(
        mode=result.mode,
        bound=result.config.bound,
        actual=list(result.config.actual),
        working_bound=result.working_bound,
        initial=_model_doc(result.initial),
        steps=steps,
    )


# ---------------------------------------------------------------------------
# the HTTP app


def create_app() -> FastAPI:
    app = FastAPI(title="mendax", version="0.1.0")

    @app.exception_handler(ValueError)
    async def _bad_input(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok"}

    @app.post("/check", response_model=CheckResponse)
    async def check(req: CheckRequest) -> CheckResponse:
        return handle_check(req)

    @app.post("/update", response_model=UpdateResponse)
    async def update(req: UpdateRequest) -> UpdateResponse:
        return handle_update(req)

    @app.post("/translate", response_model=TranslateResponse)
    async def translate(req: TranslateRequest) -> TranslateResponse:
        return handle_translate(req)

    @app.post("/valid", response_model=ValidResponse)
    async def valid(req: ValidRequest) -> ValidResponse:
        return handle_valid(req)

    @app.post("/bisim", response_model=BisimResponse)
    async def bisim(req: BisimRequest) -> BisimResponse:
        return handle_bisim(req)

    @app.post("/dot", response_model=DotResponse)
    async def dot(req: DotRequest) -> DotResponse:
        return handle_dot(req)

    @app.post("/product", response_model=ProductResponse)
    async def product(req: ProductRequest) -> ProductResponse:
        return handle_product(req)

    @app.post("/riddle", response_model=RiddleResponse)
    async def riddle_route(req: RiddleRequest) -> RiddleResponse:
        return handle_riddle(req)

    return app


app = create_app()
