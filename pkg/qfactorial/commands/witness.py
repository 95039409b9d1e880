from __future__ import annotations

import argparse
from typing import Any, Dict, Sequence

from qfactorial.commands.common import CommandContext, add_mode_arguments, mode_from_args
from qfactorial.formats.payloads import full_report_payload, witness_payload
from qfactorial.formats.schemas import WitnessCertificatePayload


def witness(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    mode = mode_from_args(args)
    points = ctx.read_points(args.points, mode.ambient_dim)
    pipeline = ctx.pipeline()
    if args.mode == "cone":
        certificate = pipeline.witness_cone(points, args.index, mode, ctx.seed)
    else:
        certificate = pipeline.witness_direct(points, args.index, mode.critical_degree)
    return witness_payload(certificate)


def verify_certificate(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    stored = WitnessCertificatePayload.model_validate_json(ctx.read_text(args.certificate))
    stored.verify()
    return {"verified": True, "construction": stored.construction, "index": stored.index, "degree": stored.degree}


def full_report(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    mode = mode_from_args(args)
    points = ctx.read_points(args.points, mode.ambient_dim)
    return full_report_payload(ctx.pipeline().full_report(points, mode, ctx.seed))


def register(subparsers: Any, parents: Sequence[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("witness", parents=parents, help="separating form for one node")
    add_mode_arguments(parser)
    parser.add_argument("--points", required=True)
    parser.add_argument("--index", type=int, required=True)
    parser.add_argument("--mode", choices=["direct", "cone"], default="direct")
    parser.set_defaults(handler=witness)

    parser = subparsers.add_parser("verify-certificate", parents=parents, help="recheck a stored witness certificate")
    parser.add_argument("--certificate", required=True)
    parser.set_defaults(handler=verify_certificate)

    parser = subparsers.add_parser("full-report", parents=parents, help="verdict, partition and per-node statuses")
    add_mode_arguments(parser)
    parser.add_argument("--points", required=True)
    parser.set_defaults(handler=full_report)
