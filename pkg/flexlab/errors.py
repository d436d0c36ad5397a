from __future__ import annotations

import sys
from typing import TYPE_CHECKING, ClassVar

if TYPE_CHECKING:
    from collections.abc import Iterable

__all__ = (
    "FlexlabContinuationError",
    "FlexlabCurveError",
    "FlexlabError",
    "FlexlabFlexError",
    "FlexlabNumericsError",
    "FlexlabParseError",
    "FlexlabPolicyError",
    "FlexlabPreconditionError",
    "FlexlabSizeError",
    "FlexlabSurfaceError",
    "FlexlabValidationError",
    "SourceSpan",
)


class SourceSpan:
    __slots__ = ("filename", "offset", "source")

    def __init__(
        self, offset: int, *, source: str | None = None, filename: str | None = None
    ) -> None:
        self.offset = offset
        self.source = source
        self.filename = filename

    def update_if_empty(
        self, source: str | None = None, filename: str | None = None
    ) -> None:
        if self.source is None and source is not None:
            self.source = source
        if self.filename is None and filename is not None:
            self.filename = filename


class FlexlabError(Exception):
    exit_code: ClassVar[int] = 1

    def __init__(self, msg: str, *, span: SourceSpan | None = None) -> None:
        super().__init__(msg)

        self.msg = msg
        self.spans: list[SourceSpan] = []

        if span:
            self.spans.append(span)

    @property
    def name(self) -> str:
        return self.__class__.__name__.removeprefix("Flexlab")

    def details(self) -> list[str]:
        return []

    def _make_subreport(self, span: SourceSpan) -> str:
        file_prefix = f"File {span.filename!r}, " if span.filename else ""
        if span.source is None:
            return f"\033[31m{file_prefix}byte {span.offset}"

        offset = min(max(span.offset, 0), len(span.source))
        line = span.source[:offset].count("\n") + 1
        line_start = span.source.rfind("\n", 0, offset) + 1
        col = offset - line_start + 1

        src = span.source.splitlines()[line - 1] if span.source.strip() else ""
        ws = len(src) - len(src.lstrip())
        res = f"\033[31m{file_prefix}Line {line}, col {col}\n\033[36m{line:>5} | \033[0m{src.lstrip()}\n"
        res += (
            "\033[36m  "
            + " " * max(5, len(str(line)))
            + "-" * max(col - ws - 1, 0)
            + "^"
            + "-" * max(len(src) - col, 0)
        )
        return res

    def make_report(self) -> str:
        lines = [self._make_subreport(span) for span in self.spans]
        lines.extend(f"\033[33m  {detail}\033[0m" for detail in self.details())
        lines.append(f"\033[31m{self.name}: {self.msg}\033[0m")
        return "\n".join(lines)

    def print_report(self) -> None:
        print(self.make_report(), file=sys.stderr)

    def _add_span(
        self, span: SourceSpan, *, source: str | None = None, filename: str | None = None
    ) -> None:
        span.update_if_empty(source=source, filename=filename)
        self.spans.insert(0, span)


class FlexlabParseError(FlexlabError):
    exit_code = 2


class FlexlabValidationError(FlexlabError):
    exit_code = 2

    def __init__(self, msg: str, violations: Iterable[str] = ()) -> None:
        super().__init__(msg)

        self.violations = list(violations)

    def details(self) -> list[str]:
        return self.violations


class FlexlabSizeError(FlexlabValidationError):
    pass


class FlexlabNumericsError(FlexlabError):
    exit_code = 2


class FlexlabPolicyError(FlexlabError):
    exit_code = 2


class FlexlabFlexError(FlexlabError):
    exit_code = 3

    def __init__(
        self, msg: str, *, residual: float | None = None, order: int | None = None
    ) -> None:
        super().__init__(msg)

        self.residual = residual
        self.order = order

    def details(self) -> list[str]:
        if self.residual is None:
            return []
        order = "" if self.order is None else f" (order {self.order})"
        return [f"offending residual{order}: {self.residual:.6e}"]


class FlexlabPreconditionError(FlexlabFlexError):
    pass


class FlexlabCurveError(FlexlabError):
    exit_code = 4

    def __init__(self, msg: str, conditions: Iterable[str] = ()) -> None:
        super().__init__(msg)

        self.conditions = list(conditions)

    def details(self) -> list[str]:
        return [f"failed condition: {condition}" for condition in self.conditions]


class FlexlabSurfaceError(FlexlabError):
    exit_code = 5

    def __init__(self, msg: str, nodes: Iterable[tuple[int, int]] = ()) -> None:
        super().__init__(msg)

        self.nodes = list(nodes)

    def details(self) -> list[str]:
        if not self.nodes:
            return []
        shown = ", ".join(str(node) for node in self.nodes[:5])
        more = f" and {len(self.nodes) - 5} more" if len(self.nodes) > 5 else ""
        return [f"offending nodes: {shown}{more}"]


class FlexlabContinuationError(FlexlabError):
    exit_code = 6

    def __init__(self, msg: str, *, r: float | None = None) -> None:
        super().__init__(msg)

        self.r = r

    def details(self) -> list[str]:
        return [] if self.r is None else [f"stalled at r = {self.r:.6g}"]
