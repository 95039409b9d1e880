from __future__ import annotations

import argparse
from typing import Any, Dict, Sequence

from qfactorial.commands.common import CommandContext, add_mode_arguments, mode_from_args
from qfactorial.core.errors import InputError
from qfactorial.formats.payloads import bese_payload, curve_payload, nabla_payload, partition_payload
from qfactorial.formats.schemas import point_list
from qfactorial.projgeom import project, random_projection
from qfactorial.services.incidence import PRESETS, bese_conditions, check_property_nabla, max_points_on_curve, partition


def curve_max(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    points = ctx.read_rational_points(args.points, 2)
    return curve_payload(max_points_on_curve(points, args.k, ctx.search_budget()))


def nabla_check(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    if args.preset:
        preset = PRESETS[args.preset]
        multiplier, k_max = preset.multiplier, preset.k_max
    elif args.multiplier is not None:
        multiplier, k_max = args.multiplier, args.k_max
    else:
        raise InputError("nabla-check needs --multiplier or --preset")
    if k_max is None:
        raise InputError("nabla-check needs --k-max")
    points = ctx.read_rational_points(args.points, 2)
    payload = nabla_payload(check_property_nabla(points, multiplier, k_max, ctx.search_budget()))
    if args.preset:
        payload["preset"] = args.preset
    return payload


def bese_check(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    points = ctx.read_rational_points(args.points, 2)
    return bese_payload(bese_conditions(points, args.degree, ctx.search_budget()))


def partition_command(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    mode = mode_from_args(args)
    pointset = ctx.read_pointset(args.points)
    if pointset.ambient_dim == 2:
        images = ctx.read_rational_points(args.points, 2)
        center = None
    else:
        points = ctx.read_rational_points(args.points, mode.ambient_dim)
        projection = random_projection(mode.ambient_dim, points, ctx.seed, ctx.pipeline().retry_policy(), ctx.field)
        images = project(projection, points).images
        center = [point_list(c) for c in projection.center]
    payload = partition_payload(partition(images, mode, ctx.search_budget()))
    payload["projection_center"] = center
    return payload


def register(subparsers: Any, parents: Sequence[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("curve-max", parents=parents, help="most points on one plane curve of degree k")
    parser.add_argument("--points", required=True)
    parser.add_argument("--k", type=int, required=True)
    parser.set_defaults(handler=curve_max)

    parser = subparsers.add_parser("nabla-check", parents=parents, help="at most i*M points on any degree-i curve")
    parser.add_argument("--points", required=True)
    parser.add_argument("--multiplier", type=int)
    parser.add_argument("--k-max", type=int)
    parser.add_argument("--preset", choices=sorted(PRESETS))
    parser.set_defaults(handler=nabla_check)

    parser = subparsers.add_parser("bese-check", parents=parents, help="plane-curve separation ledger in degree d")
    parser.add_argument("--points", required=True)
    parser.add_argument("--degree", type=int, required=True)
    parser.set_defaults(handler=bese_check)

    parser = subparsers.add_parser("partition", parents=parents, help="partition projected nodes with its ledger")
    add_mode_arguments(parser)
    parser.add_argument("--points", required=True, help="nodes, or their plane images when the file is in P^2")
    parser.set_defaults(handler=partition_command)
