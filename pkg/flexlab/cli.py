from __future__ import annotations

import argparse
from pathlib import Path
from typing import TYPE_CHECKING

import msgspec
from msgspec import Struct

from ._version import __version__
from .numerics import TolerancePolicy

if TYPE_CHECKING:
    from collections.abc import Sequence

__all__ = ("COMMANDS", "Invocation", "Options", "parse_cli_args", "parser")

COMMANDS = ("analyze", "extend", "tangent-extend", "surface", "make-curve", "list-builtins")


class Options:
    __slots__ = "as_json", "csv_path", "debug", "exact", "policy", "python_errors"

    def __init__(
        self,
        *,
        as_json: bool,
        csv_path: Path | None,
        exact: bool,
        python_errors: bool,
        debug: bool,
        policy: TolerancePolicy,
    ) -> None:
        self.as_json = as_json
        self.csv_path = csv_path
        self.exact = exact
        self.python_errors = python_errors
        self.debug = debug
        self.policy = policy

    @classmethod
    def default(cls) -> Options:
        return cls(
            as_json=False,
            csv_path=None,
            exact=False,
            python_errors=False,
            debug=False,
            policy=TolerancePolicy.default(),
        )

    def for_batch_item(self, stem: str) -> Options:
        csv_path = None
        if self.csv_path is not None:
            csv_path = self.csv_path.with_stem(f"{self.csv_path.stem}-{stem}")
        return Options(
            as_json=self.as_json,
            csv_path=csv_path,
            exact=self.exact,
            python_errors=self.python_errors,
            debug=self.debug,
            policy=self.policy,
        )


class Invocation(Struct, frozen=True, kw_only=True):
    command: str
    source: str | None = None
    batch: Path | None = None
    order: int | None = None
    flex: int | None = None
    flex_field: Path | None = None
    steps: int = 5
    h: float = 1e-3
    output: Path | None = None

    def for_batch_item(self, stem: str) -> Invocation:
        if self.output is None:
            return self
        output = self.output.with_stem(f"{self.output.stem}-{stem}")
        return msgspec.structs.replace(self, output=output)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


common = argparse.ArgumentParser(add_help=False)
common.add_argument("--json", dest="as_json", action="store_true", help="print the JSON report")
common.add_argument("--csv", dest="csv_path", type=Path, help="write plottable data to this CSV file")
common.add_argument("--tol", default=None, metavar="REL:ABS", help="rank tolerances")
common.add_argument("--exact", action="store_true", help="cross-check ranks in rational arithmetic")
common.add_argument("--batch", type=Path, metavar="DIR", help="run on every file in DIR")
common.add_argument("--debug", action="store_true")
common.add_argument("-pyers", "--python-errors", action="store_true")

parser = argparse.ArgumentParser("flexlab", description="Flexes of frameworks and surfaces.")
parser.add_argument("--version", action="version", version=f"flexlab {__version__}")
subparsers = parser.add_subparsers(dest="command", required=True)


def _command(name: str, help: str) -> argparse.ArgumentParser:
    sub = subparsers.add_parser(name, parents=[common], help=help)
    sub.add_argument("source", nargs="?", help="input file or builtin:<name>")
    return sub


_command("analyze", "first-order flexes and equilibrium stresses")

extend = _command("extend", "extend a first-order flex order by order")
extend.add_argument("--order", type=_positive_int, default=2)
flex_choice = extend.add_mutually_exclusive_group()
flex_choice.add_argument("--flex", type=_non_negative_int, metavar="K")
flex_choice.add_argument("--flex-field", type=Path, metavar="PATH")

_command("tangent-extend", "second-order extension from a curve tangent to the nonrigid set")

surface = _command("surface", "hierarchy residuals of a jet on a sampled surface")
surface.add_argument("--order", type=_positive_int, default=None)

make_curve = _command("make-curve", "continue a flex into a sampled motion")
make_curve.add_argument("--flex", type=_non_negative_int, default=0, metavar="K")
make_curve.add_argument("--steps", type=_positive_int, default=5)
make_curve.add_argument("--h", type=_positive_float, default=1e-3)
make_curve.add_argument("--output", type=Path, metavar="PATH")

subparsers.add_parser("list-builtins", parents=[common], help="list the built-in corpus")


def parse_cli_args(argv: Sequence[str] | None = None) -> tuple[Invocation, Options]:
    args = parser.parse_args(argv)
    if args.command != "list-builtins" and args.source is None and args.batch is None:
        parser.error(f"{args.command} needs an input file, builtin:<name> or --batch DIR")

    policy = TolerancePolicy.default() if args.tol is None else TolerancePolicy.parse(args.tol)
    invocation = Invocation(
        command=args.command,
        source=getattr(args, "source", None),
        batch=args.batch,
        order=getattr(args, "order", None),
        flex=getattr(args, "flex", None),
        flex_field=getattr(args, "flex_field", None),
        steps=getattr(args, "steps", 5),
        h=getattr(args, "h", 1e-3),
        output=getattr(args, "output", None),
    )
    return invocation, Options(
        as_json=args.as_json,
        csv_path=args.csv_path,
        exact=args.exact,
        python_errors=args.python_errors,
        debug=args.debug,
        policy=policy,
    )
