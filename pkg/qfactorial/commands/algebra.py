from __future__ import annotations

import argparse
from typing import Any, Dict, Sequence

from qfactorial.commands.common import CommandContext, parse_point
from qfactorial.forms import classify_point, format_form, parse_form


def parse_check(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    form = parse_form(args.form, args.vars, ctx.field)
    return {
        "form": format_form(form),
        "num_vars": form.num_vars,
        "degree": form.degree,
        "terms": len(form.terms),
        "field": form.field.describe(),
    }


def classify(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    form = parse_form(args.form, args.vars, ctx.field)
    point = parse_point(args.point, ctx.field)
    result = classify_point(form, point.coords)
    return {"point": list(point.coords), "class": result.kind, "hessian_rank": result.hessian_rank}


def register(subparsers: Any, parents: Sequence[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("parse-check", parents=parents, help="parse a form and print it canonically")
    parser.add_argument("--form", required=True)
    parser.add_argument("--vars", type=int, required=True, help="number of variables")
    parser.set_defaults(handler=parse_check)

    parser = subparsers.add_parser("classify", parents=parents, help="Hessian classification of a point")
    parser.add_argument("--form", required=True)
    parser.add_argument("--vars", type=int, required=True)
    parser.add_argument("--point", required=True, help="comma-separated coordinates")
    parser.set_defaults(handler=classify)
