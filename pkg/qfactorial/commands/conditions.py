from __future__ import annotations

import argparse
from typing import Any, Dict, Sequence

from qfactorial.commands.common import CommandContext, add_mode_arguments, mode_from_args, parse_forms
from qfactorial.core.errors import InputError
from qfactorial.forms import parse_form
from qfactorial.formats.payloads import (
    criterion_payload,
    defect_payload,
    non_vanishing_payload,
    probe_payload,
    verdict_payload,
    witness_payload,
)
from qfactorial.services.conditions import (
    base_locus_criterion,
    base_locus_dim_probe,
    defect,
    non_vanishing_check,
    q_factoriality_verdict,
)


def _num_vars(points: Sequence[Any]) -> int:
    if not points:
        raise InputError("the point file holds no points")
    return len(points[0])


def defect_command(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    points = ctx.read_points(args.points)
    report = defect(points, args.degree, _num_vars(points), ctx.field, ctx.settings.workers)
    return defect_payload(report)


def separate(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    points = ctx.read_points(args.points)
    return witness_payload(ctx.pipeline().witness_direct(points, args.index, args.degree))


def verdict(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    mode = mode_from_args(args)
    points = ctx.read_points(args.points, mode.ambient_dim)
    return verdict_payload(q_factoriality_verdict(mode, points, ctx.field, ctx.settings.workers))


def base_locus_probe(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    generators = parse_forms(args.form, args.vars)
    ambient = parse_form(args.ambient, args.vars) if args.ambient else None
    probe = base_locus_dim_probe(
        generators, args.vars, ambient, ctx.settings.probe_primes, ctx.scan_budget(), ctx.settings.workers
    )
    return probe_payload(probe)


def non_vanishing(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    points = ctx.read_rational_points(args.points)
    check = non_vanishing_check(
        points, args.k, _num_vars(points), ctx.settings.probe_primes, ctx.scan_budget(), ctx.settings.workers
    )
    return non_vanishing_payload(check)


def criterion(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    mode = mode_from_args(args)
    points = ctx.read_rational_points(args.points, mode.ambient_dim)
    ambient = parse_form(args.ambient, mode.num_vars) if args.ambient else None
    result = base_locus_criterion(
        mode, points, args.k, ambient, ctx.settings.probe_primes, ctx.scan_budget(), ctx.settings.workers
    )
    return criterion_payload(result)


def register(subparsers: Any, parents: Sequence[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("defect", parents=parents, help="rank and defect of a point set in one degree")
    parser.add_argument("--points", required=True)
    parser.add_argument("--degree", type=int, required=True)
    parser.set_defaults(handler=defect_command)

    parser = subparsers.add_parser("separate", parents=parents, help="form separating one point from the rest")
    parser.add_argument("--points", required=True)
    parser.add_argument("--index", type=int, required=True)
    parser.add_argument("--degree", type=int, required=True)
    parser.set_defaults(handler=separate)

    parser = subparsers.add_parser("verdict", parents=parents, help="Q-factoriality verdict for a node set")
    add_mode_arguments(parser)
    parser.add_argument("--points", required=True)
    parser.set_defaults(handler=verdict)

    parser = subparsers.add_parser("base-locus-probe", parents=parents, help="heuristic base-locus dimension")
    parser.add_argument("--form", action="append", required=True, help="generator; repeat for more")
    parser.add_argument("--vars", type=int, required=True)
    parser.add_argument("--ambient", help="equation of the variety the base locus is restricted to")
    parser.set_defaults(handler=base_locus_probe)

    parser = subparsers.add_parser("non-vanishing", parents=parents, help="base-locus prediction against the defect")
    parser.add_argument("--points", required=True)
    parser.add_argument("--k", type=int, required=True)
    parser.set_defaults(handler=non_vanishing)

    parser = subparsers.add_parser("base-locus-criterion", parents=parents, help="base-locus Q-factoriality criterion")
    add_mode_arguments(parser)
    parser.add_argument("--points", required=True)
    parser.add_argument("--k", type=int, required=True)
    parser.add_argument("--ambient", help="branch surface or hypersurface equation")
    parser.set_defaults(handler=criterion)
