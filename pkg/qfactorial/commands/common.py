"""Per-invocation context shared by every subcommand."""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import secrets
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from qfactorial.core.errors import FieldMismatchError, InputError, PointFileError
from qfactorial.core.resilience import SearchBudget
from qfactorial.core.settings import Settings, get_settings
from qfactorial.exactalg import RATIONALS, Field
from qfactorial.forms import Form, parse_form
from qfactorial.formats.pointfiles import parse_points_text, points_of
from qfactorial.formats.schemas import PointSetFile, Report
from qfactorial.projgeom import ProjPoint
from qfactorial.services.container import get_pipeline_for, get_scan_budget, get_search_budget
from qfactorial.services.modes import Mode
from qfactorial.services.pipeline import WitnessPipeline

Handler = Callable[["CommandContext", argparse.Namespace], Dict[str, Any]]

_NOT_HASHED = {"handler", "seed", "verbose", "workers", "command", "budget"}


@dataclasses.dataclass
class CommandContext:
    """Settings with flag overrides, the seed and the inputs read so far."""

    settings: Settings
    prime: Optional[int] = None
    requested_seed: Optional[int] = None
    seed_used: bool = False
    files: Dict[str, str] = dataclasses.field(default_factory=dict)
    _seed: Optional[int] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CommandContext":
        settings = get_settings()
        overrides: Dict[str, Any] = {}
        if getattr(args, "budget", None) is not None:
            overrides["search_budget"] = args.budget
            overrides["scan_budget"] = args.budget
        if getattr(args, "workers", None) is not None:
            overrides["workers"] = args.workers
        if overrides:
            settings = dataclasses.replace(settings, **overrides)
        return cls(settings=settings, prime=getattr(args, "prime", None), requested_seed=getattr(args, "seed", None))

    # ------------------------------------------------------------------
    @property
    def seed(self) -> int:
        """The requested seed, or a fresh one; either way it lands in the report."""
        if self._seed is None:
            self._seed = self.requested_seed if self.requested_seed is not None else secrets.randbelow(2**32)
        self.seed_used = True
        return self._seed

    @property
    def field(self) -> Field:
        return Field.prime(self.prime) if self.prime is not None else RATIONALS

    def require_prime(self) -> int:
        if self.prime is None:
            raise InputError("this command needs --prime")
        return self.prime

    def pipeline(self) -> WitnessPipeline:
        if self.prime is None:
            return get_pipeline_for(self.settings)
        return WitnessPipeline(self.settings, self.field)

    def search_budget(self) -> SearchBudget:
        return get_search_budget(self.settings)

    def scan_budget(self) -> SearchBudget:
        return get_scan_budget(self.settings)

    # ------------------------------------------------------------------
    def read_text(self, path: str) -> str:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise PointFileError(f"cannot read {path}: {exc.strerror}") from None
        self.files[path] = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return text

    def read_pointset(self, path: str) -> PointSetFile:
        return parse_points_text(self.read_text(path))

    def read_points(self, path: str, ambient_dim: Optional[int] = None) -> Tuple[ProjPoint, ...]:
        """Points of ``path``; a prime-field file sets the command's field."""
        pointset = self.read_pointset(path)
        if ambient_dim is not None and pointset.ambient_dim != ambient_dim:
            raise PointFileError(f"{path} holds points of P^{pointset.ambient_dim}, expected P^{ambient_dim}")
        declared = pointset.field_descriptor()
        if not declared.is_rational:
            if self.prime is None:
                self.prime = declared.modulus
            elif self.prime != declared.modulus:
                raise FieldMismatchError(f"{path} holds points over F_{declared.modulus}, but --prime is {self.prime}")
            return points_of(pointset)
        if self.prime is not None:
            return tuple(ProjPoint.of(row, self.field) for row in pointset.points)
        return points_of(pointset)

    def read_rational_points(self, path: str, ambient_dim: Optional[int] = None) -> Tuple[ProjPoint, ...]:
        """Like :meth:`read_points`, for commands whose searches run over Q only."""
        points = self.read_points(path, ambient_dim)
        if self.prime is not None:
            raise FieldMismatchError(f"{path}: this command works over Q only, not F_{self.prime}")
        return points

    def digest(self, args: argparse.Namespace) -> str:
        arguments = {key: value for key, value in sorted(vars(args).items()) if key not in _NOT_HASHED}
        blob = json.dumps({"arguments": arguments, "files": self.files}, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def report(self, args: argparse.Namespace, result: Dict[str, Any]) -> Report:
        return Report(
            command=args.command,
            inputs_digest=self.digest(args),
            result=result,
            version=self.settings.version,
            seed=self._seed if self.seed_used else None,
        )


# ----------------------------------------------------------------------
# Argument helpers
# ----------------------------------------------------------------------
def add_mode_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kind", required=True, choices=["double-solid", "hypersurface"])
    parser.add_argument("--r", type=int, help="half the branch degree (double solid)")
    parser.add_argument("--n", type=int, help="hypersurface degree")


def mode_from_args(args: argparse.Namespace) -> Mode:
    if args.kind == "double-solid":
        if args.r is None:
            raise InputError("--kind double-solid needs --r")
        return Mode.double_solid(args.r)
    if args.n is None:
        raise InputError("--kind hypersurface needs --n")
    return Mode.hypersurface(args.n)


def parse_point(text: str, field: Field = RATIONALS) -> ProjPoint:
    """Comma-separated integer coordinates, e.g. ``0,1,2,1``."""
    try:
        values = [int(token) for token in text.split(",")]
    except ValueError:
        raise InputError(f"cannot read point {text!r}: coordinates must be integers") from None
    return ProjPoint.of(values, field)


def parse_forms(texts: Sequence[str], num_vars: int, field: Field = RATIONALS) -> List[Form]:
    return [parse_form(text, num_vars, field) for text in texts]


__all__ = [
    "Handler",
    "CommandContext",
    "add_mode_arguments",
    "mode_from_args",
    "parse_point",
    "parse_forms",
]
