from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any, Dict, Sequence

from qfactorial.commands.common import CommandContext
from qfactorial.core.errors import InputError, PointFileError
from qfactorial.forms import format_form, parse_form
from qfactorial.formats.payloads import nodes_payload
from qfactorial.formats.pointfiles import format_structured
from qfactorial.formats.schemas import PointSetFile, PrimeField, rational_text
from qfactorial.services.families import (
    EXAMPLE_I,
    EXAMPLE_II,
    FOURFOLD,
    FamilyInstance,
    find_nodes,
    max_nodes,
    random_family,
    split_example_I,
    split_example_II,
    theorem_bound,
    varchenko_bound,
)
from qfactorial.services.modes import Mode

FAMILIES = ["split-I", "split-II", "random-I", "random-II", "random-fourfold"]
_RANDOM_KINDS = {"random-I": EXAMPLE_I, "random-II": EXAMPLE_II, "random-fourfold": FOURFOLD}


def _instance(ctx: CommandContext, family: str, param: Any) -> FamilyInstance:
    if family in ("split-I", "split-II", "random-I", "random-II") and param is None:
        raise InputError(f"--family {family} needs --param")
    if family == "split-I":
        return split_example_I(param)
    if family == "split-II":
        return split_example_II(param)
    return random_family(_RANDOM_KINDS[family], param, ctx.seed)


def _instance_payload(instance: FamilyInstance) -> Dict[str, Any]:
    return {
        "kind": instance.kind,
        "param": instance.param,
        "ambient_dim": instance.ambient_dim,
        "components": {name: format_form(form) for name, form in instance.components},
        "equation": format_form(instance.equation),
        "expected_nodes": instance.expected_nodes,
    }


def find_nodes_command(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    prime = ctx.require_prime()
    if args.equation:
        if args.vars is None:
            raise InputError("--equation needs --vars")
        equation = parse_form(args.equation, args.vars)
        instance = FamilyInstance("equation", None, (), equation)
    elif args.family:
        instance = _instance(ctx, args.family, args.param)
    else:
        raise InputError("find-nodes needs --family or --equation")

    nodes = find_nodes(instance, prime, ctx.scan_budget(), ctx.settings.workers)
    payload = nodes_payload(nodes)
    payload["kind"] = instance.kind
    payload["expected_nodes"] = instance.expected_nodes
    if args.write:
        pointset = PointSetFile(
            ambient_dim=instance.ambient_dim,
            field=PrimeField(prime=prime),
            points=[list(point.coords) for point in nodes.nodes],
        )
        try:
            Path(args.write).write_text(format_structured(pointset), encoding="utf-8")
        except OSError as exc:
            raise PointFileError(f"cannot write {args.write}: {exc.strerror}") from None
        payload["written"] = args.write
    return payload


def gen_family(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    return _instance_payload(_instance(ctx, args.family, args.param))


def varchenko(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    return {"i": args.i, "j": args.j, "value": varchenko_bound(args.i, args.j)}


def bound(ctx: CommandContext, args: argparse.Namespace) -> Dict[str, Any]:
    kind = args.kind.replace("-", "_")
    if kind == "cy_double_solid":
        mode = Mode.double_solid(4)
    elif kind == "cy_quintic":
        mode = Mode.hypersurface(5)
    else:
        param = args.r if kind == "double_solid" else args.n
        if param is None:
            raise InputError(f"--kind {args.kind} needs --{'r' if kind == 'double_solid' else 'n'}")
        mode = Mode(kind, param)
    return {
        "mode": mode.label,
        "bound": rational_text(theorem_bound(kind, mode.param)),
        "critical_degree": mode.critical_degree,
        "elementary_bound": mode.elementary_bound,
        "max_nodes": max_nodes(mode),
    }


def register(subparsers: Any, parents: Sequence[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("find-nodes", parents=parents, help="F_p-rational singular points of a family member")
    parser.add_argument("--family", choices=FAMILIES)
    parser.add_argument("--param", type=int, help="r for example I, n for example II")
    parser.add_argument("--equation", help="explicit hypersurface equation instead of a family")
    parser.add_argument("--vars", type=int)
    parser.add_argument("--write", help="store the nodes as a structured point file")
    parser.set_defaults(handler=find_nodes_command)

    parser = subparsers.add_parser("gen-family", parents=parents, help="print a member of an example family")
    parser.add_argument("--family", choices=FAMILIES, required=True)
    parser.add_argument("--param", type=int)
    parser.set_defaults(handler=gen_family)

    parser = subparsers.add_parser("varchenko", parents=parents, help="lattice-point bound A_i(j)")
    parser.add_argument("--i", type=int, required=True)
    parser.add_argument("--j", type=int, required=True)
    parser.set_defaults(handler=varchenko)

    parser = subparsers.add_parser("bound", parents=parents, help="node-count bounds for one mode")
    parser.add_argument(
        "--kind", required=True, choices=["double-solid", "hypersurface", "cy-double-solid", "cy-quintic"]
    )
    parser.add_argument("--r", type=int)
    parser.add_argument("--n", type=int)
    parser.set_defaults(handler=bound)
