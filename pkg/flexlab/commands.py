from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
from msgspec import Struct

from . import corpus
from .cli import Options
from .errors import (
    FlexlabContinuationError,
    FlexlabFlexError,
    FlexlabParseError,
)
from .hierarchy import extend_greedily
from .io import (
    AnalysisReport,
    CurveFile,
    CurveReport,
    DocumentFormat,
    ExtensionPayload,
    FlexFieldFile,
    FrameworkFile,
    GridFile,
    MakeCurvePayload,
    SurfacePayload,
    decode_document,
    digest,
    dump_document,
    encode_document,
    flex_space_out,
    load_document,
    stresses_out,
    write_csv,
)
from .model import ConfigCurve, Configuration, FlexField, SurfaceGrid
from .numerics import exact_rank
from .rigidity import (
    FlexSpaceReport,
    assemble_rigidity_operator,
    equilibrium_stress_space,
    first_order_flex_space,
)
from .surface import fundamental_form, hierarchy_residual_grid
from .tangency import edge_length_drift, make_flexible_motion_curve, tangent_extension

if TYPE_CHECKING:
    from .corpus import Kind

__all__ = (
    "LoadedInput",
    "cmd_analyze",
    "cmd_extend",
    "cmd_make_curve",
    "cmd_surface",
    "cmd_tangent_extend",
    "load_input",
)

log = logging.getLogger(__name__)

_WIRE_TYPES: dict[Kind, type[FrameworkFile | CurveFile | GridFile]] = {
    "framework": FrameworkFile,
    "curve": CurveFile,
    "grid": GridFile,
}


class LoadedInput(Struct, frozen=True, eq=False):
    label: str
    digest: str
    item: Any
    flex: FlexField | None = None


def _wire_for(item: Configuration | ConfigCurve | SurfaceGrid, name: str) -> Any:
    match item:
        case Configuration():
            return FrameworkFile.from_configuration(item, name=name)
        case ConfigCurve():
            return CurveFile.from_curve(item, name=name)
        case SurfaceGrid():
            return GridFile.from_grid(item, name=name)


def load_input(source: str, kind: Kind) -> LoadedInput:
    """Read a framework, curve or grid from a file or from the built-in corpus."""

    if corpus.is_builtin(source):
        found, item = corpus.builtin(source)
        if found != kind:
            raise FlexlabParseError(f"{source} is a {found}, this command needs a {kind}")
        content = encode_document(_wire_for(item, source.removeprefix(corpus.BUILTIN_PREFIX)))
        return LoadedInput(source, digest(content), item)

    path = Path(source)
    try:
        content = path.read_bytes()
    except OSError as e:
        raise FlexlabParseError(f"cannot read {source!r}: {e.strerror}") from None
    document = decode_document(
        content, _WIRE_TYPES[kind], fmt=DocumentFormat.for_path(path), filename=source
    )

    match document:
        case FrameworkFile():
            return LoadedInput(source, digest(content), document.to_configuration(), document.to_flex())
        case CurveFile():
            return LoadedInput(source, digest(content), document.to_curve())
        case GridFile():
            return LoadedInput(source, digest(content), document.to_grid())


def _nontrivial_flex(report: FlexSpaceReport, index: int) -> FlexField:
    if report.nontrivial_dim == 0:
        raise FlexlabFlexError("no nontrivial flex to follow")
    if not 0 <= index < report.nontrivial_dim:
        raise FlexlabFlexError(
            f"flex index {index} out of range; the nontrivial flex space has dimension "
            f"{report.nontrivial_dim}"
        )
    return report.nontrivial_basis[index]


def _report(
    command: str,
    loaded: LoadedInput,
    opts: Options,
    **fields: Any,
) -> AnalysisReport:
    return AnalysisReport(
        command=command,
        input=loaded.label,
        input_digest=loaded.digest,
        policy=opts.policy,
        **fields,
    )


def cmd_analyze(source: str, opts: Options | None = None) -> AnalysisReport:
    opts = opts or Options.default()
    loaded = load_input(source, "framework")
    configuration: Configuration = loaded.item

    space = first_order_flex_space(configuration, opts.policy)
    stresses = equilibrium_stress_space(configuration, opts.policy)
    warnings = list(space.warnings)

    if opts.exact:
        matrix = assemble_rigidity_operator(configuration).matrix
        rank = exact_rank(matrix)
        if rank != space.judgment.rank:
            warnings.append(
                f"exact rank {rank} differs from numerical rank {space.judgment.rank}"
            )
        else:
            log.info("exact rank %d agrees with the numerical rank", rank)

    if opts.csv_path is not None:
        write_csv(
            opts.csv_path,
            ("index", "singular_value"),
            enumerate(space.judgment.singular_values),
        )

    return _report(
        "analyze",
        loaded,
        opts,
        flex_space=flex_space_out(space),
        stresses=stresses_out(stresses),
        warnings=warnings,
        summary=f"{space.classification}, nontrivial flex dim {space.nontrivial_dim}, "
        f"stress dim {len(stresses)}",
    )


def cmd_extend(
    source: str,
    order: int = 2,
    *,
    flex: int | None = None,
    flex_field: Path | None = None,
    opts: Options | None = None,
) -> AnalysisReport:
    opts = opts or Options.default()
    loaded = load_input(source, "framework")
    configuration: Configuration = loaded.item
    space = first_order_flex_space(configuration, opts.policy)

    if flex_field is not None:
        xi1 = load_document(flex_field, FlexFieldFile).to_flex()
    elif flex is not None:
        xi1 = _nontrivial_flex(space, flex)
    elif loaded.flex is not None:
        xi1 = loaded.flex
    else:
        xi1 = _nontrivial_flex(space, 0)
    xi1.check_size(configuration.framework)

    result = extend_greedily(configuration, xi1, order, opts.policy)
    payload = ExtensionPayload.build(result)

    if opts.csv_path is not None:
        write_csv(
            opts.csv_path,
            ("order", "field_norm"),
            ((k, field.norm()) for k, field in enumerate(result.jet.fields, start=1)),
        )

    if result.complete:
        summary = f"extended to order {result.reached_order}"
    else:
        assert result.report is not None
        summary = f"OBSTRUCTED at order {result.report.order}"
    return _report(
        "extend",
        loaded,
        opts,
        flex_space=flex_space_out(space),
        stresses=stresses_out(equilibrium_stress_space(configuration, opts.policy)),
        payload=payload,
        warnings=[*space.warnings, *result.warnings],
        summary=summary,
    )


def cmd_tangent_extend(source: str, opts: Options | None = None) -> AnalysisReport:
    opts = opts or Options.default()
    loaded = load_input(source, "curve")
    curve: ConfigCurve = loaded.item

    result = tangent_extension(curve, opts.policy)
    if opts.csv_path is not None:
        write_csv(
            opts.csv_path, ("h", "residual"), ((row.h, row.residual) for row in result.convergence_table)
        )

    return _report(
        "tangent-extend",
        loaded,
        opts,
        flex_space=flex_space_out(result.validation.samples[curve.base_index].flex_space),
        payload=CurveReport.build(result.validation, result),
        warnings=list(result.validation.warnings),
        summary=f"curve valid, second-order residual {result.second_order_residual:.3e}",
    )


def cmd_surface(source: str, order: int | None = None, opts: Options | None = None) -> AnalysisReport:
    opts = opts or Options.default()
    loaded = load_input(source, "grid")
    grid: SurfaceGrid = loaded.item

    form = fundamental_form(grid, opts.policy)
    residuals = hierarchy_residual_grid(grid, order)

    if opts.csv_path is not None:
        nu, nv = grid.shape
        rows = (
            (k, i + 1, j + 1, triple.uu[i, j], triple.uv[i, j], triple.vv[i, j])
            for k, triple in enumerate(residuals, start=1)
            for i in range(nu - 2)
            for j in range(nv - 2)
        )
        write_csv(opts.csv_path, ("order", "i", "j", "uu", "uv", "vv"), rows)

    norms = ", ".join(f"{triple.norm:.3e}" for triple in residuals)
    return _report(
        "surface",
        loaded,
        opts,
        payload=SurfacePayload.build(grid.shape, float(np.min(form.determinant)), residuals),
        summary=f"residual norms by order: {norms}",
    )


def cmd_make_curve(
    source: str,
    flex: int = 0,
    steps: int = 5,
    h: float = 1e-3,
    *,
    output: Path | None = None,
    opts: Options | None = None,
) -> AnalysisReport:
    opts = opts or Options.default()
    loaded = load_input(source, "framework")
    configuration: Configuration = loaded.item
    space = first_order_flex_space(configuration, opts.policy)
    xi1 = _nontrivial_flex(space, flex)

    try:
        curve = make_flexible_motion_curve(configuration, xi1, steps, h, opts.policy)
    except FlexlabContinuationError as e:
        reason = e.msg.removeprefix("no finite motion found: ")
        raise FlexlabContinuationError(
            f"no finite motion found along flex {flex} ({reason})", r=e.r
        ) from None

    if output is None:
        stem = Path(loaded.label.removeprefix(corpus.BUILTIN_PREFIX)).stem
        output = Path(f"{stem}-flex{flex}-curve.json")
    dump_document(CurveFile.from_curve(curve), output)

    drift = edge_length_drift(curve)
    if opts.csv_path is not None:
        write_csv(opts.csv_path, ("r", "edge_length_drift"), zip(curve.r_values, drift, strict=True))

    max_drift = float(np.max(drift, initial=0.0))
    return _report(
        "make-curve",
        loaded,
        opts,
        flex_space=flex_space_out(space),
        payload=MakeCurvePayload(
            flex_index=flex,
            samples=len(curve.samples),
            step=h,
            edge_length_drift=[float(value) for value in drift],
            max_edge_length_drift=max_drift,
            output=str(output),
        ),
        warnings=list(space.warnings),
        summary=f"curve with {len(curve.samples)} samples, max edge-length drift {max_drift:.3e}",
    )
