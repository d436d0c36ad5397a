from __future__ import annotations

import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import corpus
from .cli import Invocation, Options, parse_cli_args
from .commands import cmd_analyze, cmd_extend, cmd_make_curve, cmd_surface, cmd_tangent_extend
from .errors import FlexlabError
from .io import AnalysisReport, encode_report, render_text

__all__ = ("main", "run")


def run(invocation: Invocation, source: str, opts: Options) -> AnalysisReport:
    match invocation.command:
        case "analyze":
            return cmd_analyze(source, opts)
        case "extend":
            return cmd_extend(
                source,
                invocation.order or 2,
                flex=invocation.flex,
                flex_field=invocation.flex_field,
                opts=opts,
            )
        case "tangent-extend":
            return cmd_tangent_extend(source, opts)
        case "surface":
            return cmd_surface(source, invocation.order, opts)
        case "make-curve":
            return cmd_make_curve(
                source,
                invocation.flex or 0,
                invocation.steps,
                invocation.h,
                output=invocation.output,
                opts=opts,
            )
        case _:
            raise ValueError(f"unknown command {invocation.command!r}")


def _show(report: AnalysisReport, opts: Options) -> None:
    if opts.as_json:
        sys.stdout.write(encode_report(report).decode())
    else:
        print(render_text(report))


def _run_one(invocation: Invocation, source: str, opts: Options) -> int:
    try:
        report = run(invocation, source, opts)
    except FlexlabError as error:
        if opts.python_errors:
            raise
        error.print_report()
        return error.exit_code
    _show(report, opts)
    return 0


def _run_batch(invocation: Invocation, directory: Path, opts: Options) -> int:
    files = sorted(path for path in directory.iterdir() if path.is_file())

    def work(path: Path) -> tuple[AnalysisReport | FlexlabError, Options]:
        item_opts = opts.for_batch_item(path.stem)
        try:
            return run(invocation.for_batch_item(path.stem), str(path), item_opts), item_opts
        except FlexlabError as error:
            return error, item_opts

    with ThreadPoolExecutor() as pool:
        results = list(pool.map(work, files))

    code = 0
    for path, (result, item_opts) in zip(files, results, strict=True):
        if isinstance(result, FlexlabError):
            if opts.python_errors:
                raise result
            print(f"{path}:", file=sys.stderr)
            result.print_report()
            code = max(code, result.exit_code)
        else:
            _show(result, item_opts)
    return code


def main() -> None:
    try:
        invocation, opts = parse_cli_args()
    except FlexlabError as error:
        error.print_report()
        sys.exit(error.exit_code)

    logging.basicConfig(
        level=logging.DEBUG if opts.debug else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if invocation.command == "list-builtins":
        for name in corpus.builtin_names():
            entry = corpus.BUILTINS[name]
            print(f"{corpus.BUILTIN_PREFIX}{name:<26} {entry.kind:<10} {entry.description}")
        return

    if invocation.batch is not None:
        sys.exit(_run_batch(invocation, invocation.batch, opts))
    assert invocation.source is not None
    sys.exit(_run_one(invocation, invocation.source, opts))


if __name__ == "__main__":
    main()
