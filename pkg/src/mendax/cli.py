"""Command line front end.

Thin client: every subcommand builds a service request, calls the shared
handler, and formats the response. Exit codes: 0 success, 1 formula false /
not valid / vacuous, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List

from . import service

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT = 2

_AGENT_POOL = "abcd"
_ATOM_POOL = "pqrs"


def _load_doc(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _names(count: int, pool: str, what: str) -> List[str]:
    if not 1 <= count <= len(pool):
        raise ValueError("%s count must be between 1 and %d" % (what, len(pool)))
    return list(pool[:count])


def _print_json(doc: dict) -> None:
    print(json.dumps(doc, indent=2))


def _cmd_check(args) -> int:
    resp = service.handle_check(
        service.CheckRequest(model=_load_doc(args.model), formula=args.formula)
    )
    print("true" if resp.value else "false")
    return EXIT_OK if resp.value else EXIT_FALSE


def _cmd_update(args) -> int:
    resp = service.handle_update(
        service.UpdateRequest(
            model=_load_doc(args.model), announcement=args.announcement
        )
    )
    if resp.vacuous:
        print(service.VACUOUS_MESSAGE)
        return EXIT_FALSE
    _print_json(resp.model)
    return EXIT_OK


def _cmd_translate(args) -> int:
    resp = service.handle_translate(
        service.TranslateRequest(formula=args.formula, trace=args.trace)
    )
    if resp.steps is not None:
        for i, step in enumerate(resp.steps, start=1):
            print("%d. %s: %s  =>  %s" % (i, step.axiom, step.before, step.after))
    print(resp.formula)
    return EXIT_OK


def _cmd_valid(args) -> int:
    resp = service.handle_valid(
        service.ValidRequest(
            formula=args.formula,
            cls=args.cls,
            max_states=args.states,
            agents=_names(args.agents, _AGENT_POOL, "agent"),
            atoms=_names(args.atoms, _ATOM_POOL, "atom"),
        )
    )
    if resp.valid:
        print("valid at bound")
        return EXIT_OK
    _print_json(resp.countermodel)
    return EXIT_FALSE


def _cmd_bisim(args) -> int:
    resp = service.handle_bisim(
        service.BisimRequest(left=_load_doc(args.left), right=_load_doc(args.right))
    )
    print("true" if resp.bisimilar else "false")
    return EXIT_OK if resp.bisimilar else EXIT_FALSE


def _cmd_dot(args) -> int:
    resp = service.handle_dot(service.DotRequest(model=_load_doc(args.model)))
    print(resp.dot, end="")
    return EXIT_OK


def _cmd_product(args) -> int:
    resp = service.handle_product(
        service.ProductRequest(
            model=_load_doc(args.model), action=_load_doc(args.action)
        )
    )
    if resp.vacuous:
        print(service.VACUOUS_MESSAGE)
        return EXIT_FALSE
    _print_json(resp.model)
    return EXIT_OK


def _cmd_riddle(args) -> int:
    doc = _load_doc(args.script)
    if args.bound is not None:
        doc["bound"] = args.bound
    if args.actual is not None:
        parts = args.actual.split(",")
        if len(parts) != 2:
            raise ValueError("--actual takes two numbers, like 2,3")
        doc["actual"] = [int(parts[0]), int(parts[1])]
    resp = service.handle_riddle(
        service.RiddleRequest(scenario=doc, mode=args.mode)
    )
    print("mode: %s" % resp.mode)
    print(
        "bound: %d  actual: (%d,%d)  working bound: %d"
        % (resp.bound, resp.actual[0], resp.actual[1], resp.working_bound)
    )
    print("initial window model:")
    _print_json(resp.initial)
    stopped = False
    for step in resp.steps:
        print(
            "step %d: %s{%s} %s"
            % (step.index + 1, step.flavor, step.speaker, step.utterance)
        )
        print("  classification: %s" % step.classification)
        print("  executable: %s" % ("yes" if step.executable else "no"))
        if not step.executable:
            print("  note: %s" % step.note)
            stopped = True
            break
        if step.action is not None:
            print("  action: %s" % step.action)
        print("  detect %s: %s" % (step.detect_observer, step.detect_verdict))
        print("  boundary within reach: %s" % ("yes" if step.boundary else "no"))
        print("  survivors: %s" % " ".join(step.survivors))
        print("  model:")
        _print_json(step.model)
    return EXIT_FALSE if stopped else EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run(service.app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mendax",
        description="Belief models, announcements that may be lies, and their updates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate a formula at a model's point")
    p.add_argument("model", help="model JSON file")
    p.add_argument("formula")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("update", help="apply an announcement at the point")
    p.add_argument("model", help="model JSON file")
    p.add_argument("announcement", help='e.g. "truth p" or "lie{a} p"')
    p.set_defaults(fn=_cmd_update)

    p = sub.add_parser("translate", help="rewrite announcements away")
    p.add_argument("formula")
    p.add_argument("--trace", action="store_true", help="print each rewrite step")
    p.set_defaults(fn=_cmd_translate)

    p = sub.add_parser("valid", help="bounded validity search")
    p.add_argument("formula")
    p.add_argument(
        "--class", dest="cls", default="k", choices=["k", "k45", "kd45", "s5"]
    )
    p.add_argument("--states", type=int, default=3, help="max states to try")
    p.add_argument("--agents", type=int, default=2, help="how many agents")
    p.add_argument("--atoms", type=int, default=1, help="how many atoms")
    p.set_defaults(fn=_cmd_valid)

    p = sub.add_parser("bisim", help="compare two pointed models")
    p.add_argument("left", help="model JSON file")
    p.add_argument("right", help="model JSON file")
    p.set_defaults(fn=_cmd_bisim)

    p = sub.add_parser("dot", help="render a model as DOT")
    p.add_argument("model", help="model JSON file")
    p.set_defaults(fn=_cmd_dot)

    p = sub.add_parser("product", help="action-model product update")
    p.add_argument("model", help="model JSON file")
    p.add_argument("action", help="action model JSON file")
    p.set_defaults(fn=_cmd_product)

    p = sub.add_parser("riddle", help="run a consecutive-numbers scenario")
    p.add_argument("--script", required=True, help="scenario JSON file")
    p.add_argument("--bound", type=int, default=None, help="override the script bound")
    p.add_argument("--actual", default=None, help="override the actual pair, like 2,3")
    p.add_argument(
        "--mode",
        default="direct",
        choices=["public", "direct", "skeptical", "plausible"],
    )
    p.set_defaults(fn=_cmd_riddle)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
