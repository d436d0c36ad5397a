from __future__ import annotations

import csv
import functools
import hashlib
import io
import json as _json
import math
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal

import msgspec
from jsonschema import Draft202012Validator
from msgspec import Struct

from .._version import __version__
from ..numerics import TolerancePolicy
from .wire import Vector, vectors_out

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from ..hierarchy import GreedyExtension
    from ..model import FlexField, Stress
    from ..numerics import ToleranceJudgment
    from ..rigidity import FlexSpaceReport
    from ..surface import ResidualTriple
    from ..tangency import CurveValidation, TangentExtensionResult

__all__ = (
    "AnalysisReport",
    "CurveReport",
    "ExtensionPayload",
    "FlexSpaceOut",
    "JudgmentOut",
    "MakeCurvePayload",
    "ObstructionOut",
    "StressOut",
    "SurfacePayload",
    "digest",
    "encode_report",
    "flex_space_out",
    "render_text",
    "stresses_out",
    "validate_document",
    "validate_report",
    "write_csv",
)


SchemaName = Literal["report", "framework", "curve", "grid"]


def _finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None


def _fields_out(fields: Iterable[FlexField]) -> list[list[Vector]]:
    return [vectors_out(field.vectors) for field in fields]


class JudgmentOut(Struct, frozen=True):
    rank: int
    singular_values: list[float]
    threshold_used: float
    gap_ratio: float | None
    marginal: bool

    @classmethod
    def build(cls, judgment: ToleranceJudgment) -> JudgmentOut:
        return cls(
            rank=judgment.rank,
            singular_values=list(judgment.singular_values),
            threshold_used=judgment.threshold_used,
            gap_ratio=_finite_or_none(judgment.gap_ratio),
            marginal=judgment.marginal,
        )


class FlexSpaceOut(Struct, frozen=True):
    classification: str
    trivial_dim: int
    total_flex_dim: int
    nontrivial_dim: int
    nontrivial_basis: list[list[Vector]]
    judgment: JudgmentOut


class StressOut(Struct, frozen=True):
    weights: list[float]
    support: list[tuple[int, int]]


def flex_space_out(report: FlexSpaceReport) -> FlexSpaceOut:
    return FlexSpaceOut(
        classification=str(report.classification),
        trivial_dim=report.trivial_dim,
        total_flex_dim=report.total_flex_dim,
        nontrivial_dim=report.nontrivial_dim,
        nontrivial_basis=_fields_out(report.nontrivial_basis),
        judgment=JudgmentOut.build(report.judgment),
    )


def stress_out(stress: Stress) -> StressOut:
    return StressOut(weights=[float(w) for w in stress.weights], support=stress.support())


def stresses_out(stresses: Iterable[Stress]) -> list[StressOut]:
    return [stress_out(stress) for stress in stresses]


class ObstructionOut(Struct, frozen=True):
    order: int
    certificate: StressOut
    stress_energy: float
    projection_norm: float
    threshold: float


class ExtensionPayload(Struct, frozen=True, tag="extend"):
    requested_order: int
    reached_order: int
    status: str
    jet: list[list[Vector]]
    obstruction: ObstructionOut | None = None

    @classmethod
    def build(cls, result: GreedyExtension) -> ExtensionPayload:
        obstruction = None
        report = result.report
        if report is not None and report.certificate is not None:
            obstruction = ObstructionOut(
                order=report.order,
                certificate=stress_out(report.certificate),
                stress_energy=report.stress_energy or 0.0,
                projection_norm=report.solve_report.projection_norm,
                threshold=report.solve_report.threshold,
            )
        return cls(
            requested_order=result.requested_order,
            reached_order=result.reached_order,
            status="obstructed" if obstruction else "extended",
            jet=_fields_out(result.jet.fields),
            obstruction=obstruction,
        )


class SampleOut(Struct, frozen=True):
    r: float
    nonrigid: bool
    nontrivial_dim: int
    flex_residual: float


class TangentOut(Struct, frozen=True):
    xi2: list[Vector]
    fd_step: float
    stencil: str
    second_order_residual: float
    convergence_slope: float | None
    convergence_table: list[tuple[float, float]]


class CurveReport(Struct, frozen=True, tag="tangent-extend"):
    verdict: str
    reasons: list[str]
    velocity_match_error: float
    velocity_tolerance: float
    flex_tolerance: float
    samples: list[SampleOut]
    extension: TangentOut | None = None

    @classmethod
    def build(
        cls, validation: CurveValidation, result: TangentExtensionResult | None = None
    ) -> CurveReport:
        extension = None
        if result is not None:
            extension = TangentOut(
                xi2=vectors_out(result.xi2.vectors),
                fd_step=result.fd_step,
                stencil=str(result.stencil),
                second_order_residual=result.second_order_residual,
                convergence_slope=_finite_or_none(result.slope),
                convergence_table=[(row.h, row.residual) for row in result.convergence_table],
            )
        return cls(
            verdict=str(validation.verdict),
            reasons=[str(reason) for reason in validation.reasons],
            velocity_match_error=validation.velocity_match_error,
            velocity_tolerance=validation.velocity_tolerance,
            flex_tolerance=validation.flex_tolerance,
            samples=[
                SampleOut(
                    r=check.r,
                    nonrigid=check.nonrigid,
                    nontrivial_dim=check.flex_space.nontrivial_dim,
                    flex_residual=check.flex_residual,
                )
                for check in validation.samples
            ],
            extension=extension,
        )


class OrderResidualOut(Struct, frozen=True):
    order: int
    norm: float
    max_abs: float
    max_uu: float
    max_uv: float
    max_vv: float


class SurfacePayload(Struct, frozen=True, tag="surface"):
    grid_shape: tuple[int, int]
    min_determinant: float
    orders: list[OrderResidualOut]

    @classmethod
    def build(
        cls, shape: tuple[int, int], min_determinant: float, residuals: Sequence[ResidualTriple]
    ) -> SurfacePayload:
        return cls(
            grid_shape=shape,
            min_determinant=min_determinant,
            orders=[
                OrderResidualOut(
                    order=order,
                    norm=triple.norm,
                    max_abs=triple.max_abs,
                    max_uu=float(abs(triple.uu).max(initial=0.0)),
                    max_uv=float(abs(triple.uv).max(initial=0.0)),
                    max_vv=float(abs(triple.vv).max(initial=0.0)),
                )
                for order, triple in enumerate(residuals, start=1)
            ],
        )


class MakeCurvePayload(Struct, frozen=True, tag="make-curve"):
    flex_index: int | None
    samples: int
    step: float
    edge_length_drift: list[float]
    max_edge_length_drift: float
    output: str | None = None


Payload = ExtensionPayload | CurveReport | SurfacePayload | MakeCurvePayload


class AnalysisReport(Struct, frozen=True, kw_only=True):
    """Everything one command invocation decided, with the thresholds it decided them by."""

    version: str = __version__
    command: str
    input: str
    input_digest: str
    policy: TolerancePolicy
    flex_space: FlexSpaceOut | None = None
    stresses: list[StressOut] = []
    payload: Payload | None = None
    warnings: list[str] = []
    summary: str = ""


def digest(content: bytes) -> str:
    return "sha256:" + hashlib.sha256(content).hexdigest()


def encode_report(report: AnalysisReport) -> bytes:
    return msgspec.json.format(msgspec.json.encode(report), indent=2) + b"\n"


@functools.cache
def _validator(schema: SchemaName) -> Draft202012Validator:
    text = resources.files("flexlab.schemas").joinpath(f"{schema}.schema.json").read_text()
    return Draft202012Validator(_json.loads(text))


def validate_document(document: bytes | dict[str, Any], schema: SchemaName) -> None:
    """Raise ``jsonschema.ValidationError`` if ``document`` does not match the named schema."""

    if isinstance(document, bytes):
        document = _json.loads(document)
    _validator(schema).validate(document)


def validate_report(document: bytes | dict[str, Any]) -> None:
    validate_document(document, "report")


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    Path(path).write_text(buffer.getvalue(), newline="")


def _render_payload(payload: Payload) -> list[str]:
    match payload:
        case ExtensionPayload(obstruction=None):
            return [f"extended to order {payload.reached_order}"]
        case ExtensionPayload(obstruction=obstruction):
            assert obstruction is not None
            weights = ", ".join(f"{w:+.6f}" for w in obstruction.certificate.weights)
            return [
                f"OBSTRUCTED at order {obstruction.order} "
                f"(reached order {payload.reached_order} of {payload.requested_order})",
                f"  certificate stress: [{weights}]",
                f"  stress energy: {obstruction.stress_energy:.6e}",
            ]
        case CurveReport():
            lines = [
                f"curve {payload.verdict}, velocity match error "
                f"{payload.velocity_match_error:.3e} (tolerance {payload.velocity_tolerance:.3e})"
            ]
            lines.extend(f"  failed condition: {reason}" for reason in payload.reasons)
            if payload.extension is not None:
                ext = payload.extension
                lines.append(
                    f"second-order residual {ext.second_order_residual:.3e} "
                    f"({ext.stencil} stencil, h = {ext.fd_step:.3e})"
                )
                lines.append("  h            residual")
                lines.extend(f"  {h:<12.4e} {residual:.4e}" for h, residual in ext.convergence_table)
                if ext.convergence_slope is not None:
                    lines.append(f"  log-log slope {ext.convergence_slope:.3f}")
            return lines
        case SurfacePayload():
            return [
                f"order {row.order}: residual norm {row.norm:.3e}, max {row.max_abs:.3e}"
                for row in payload.orders
            ]
        case MakeCurvePayload():
            lines = [
                f"curve with {payload.samples} samples, step {payload.step:g}, "
                f"max edge-length drift {payload.max_edge_length_drift:.3e}"
            ]
            if payload.output:
                lines.append(f"  written to {payload.output}")
            return lines


def render_text(report: AnalysisReport) -> str:
    lines = [f"{report.command} {report.input}"]
    if report.flex_space is not None:
        space = report.flex_space
        lines.append(
            f"{space.classification}, nontrivial flex dim {space.nontrivial_dim}, "
            f"stress dim {len(report.stresses)}"
        )
        lines.append(
            f"  rank {space.judgment.rank} (threshold {space.judgment.threshold_used:.3e}, "
            f"trivial dim {space.trivial_dim})"
        )
    if report.payload is not None:
        lines.extend(_render_payload(report.payload))
    lines.extend(f"warning: {warning}" for warning in report.warnings)
    return "\n".join(lines)
