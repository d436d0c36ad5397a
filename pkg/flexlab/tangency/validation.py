from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from msgspec import Struct

from ..errors import FlexlabCurveError
from ..model import ConfigCurve, CurveSample
from ..numerics import TolerancePolicy
from ..rigidity import FlexSpaceReport, assemble_rigidity_operator, first_order_flex_space
from ..utils import Enum

if TYPE_CHECKING:
    from numpy.typing import NDArray

__all__ = (
    "CurveCondition",
    "CurveValidation",
    "SampleCheck",
    "Verdict",
    "three_point_derivative",
    "validate_curve",
)

log = logging.getLogger(__name__)


class CurveCondition(Enum):
    nonrigidity = "(i) nonrigidity"
    flex_family = "(ii) flex family"
    velocity_match = "(ii) velocity match Eq. (2.6)"


class Verdict(Enum):
    valid = "valid"
    invalid = "invalid"


class SampleCheck(Struct, frozen=True, eq=False):
    r: float
    nonrigid: bool
    flex_residual: float
    flex_space: FlexSpaceReport


class CurveValidation(Struct, frozen=True, eq=False):
    samples: tuple[SampleCheck, ...]
    velocity_match_error: float
    velocity_tolerance: float
    flex_tolerance: float
    verdict: Verdict
    reasons: tuple[CurveCondition, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return self.verdict is Verdict.valid

    @property
    def nonrigid_at_each_sample(self) -> list[bool]:
        return [sample.nonrigid for sample in self.samples]

    @property
    def flex_residuals_along_curve(self) -> list[float]:
        return [sample.flex_residual for sample in self.samples]


def three_point_derivative(
    minus: NDArray[np.float64],
    center: NDArray[np.float64],
    plus: NDArray[np.float64],
    h_minus: float,
    h_plus: float,
) -> NDArray[np.float64]:
    """Second-order derivative estimate at the center of a possibly non-uniform stencil."""

    total = h_minus + h_plus
    return (
        -h_plus / (h_minus * total) * minus
        + (h_plus - h_minus) / (h_minus * h_plus) * center
        + h_minus / (h_plus * total) * plus
    )


def _neighbors(curve: ConfigCurve) -> tuple[CurveSample, CurveSample]:
    if len(curve.samples) < 3:
        raise FlexlabCurveError(
            f"a curve needs at least 3 samples, got {len(curve.samples)}"
        )
    neighbors = curve.neighbors()
    if neighbors is None:
        raise FlexlabCurveError("the r = 0 sample needs neighbors on both sides")
    return neighbors


def validate_curve(curve: ConfigCurve, policy: TolerancePolicy | None = None) -> CurveValidation:
    """Check that a sampled curve of configurations carries its flexes as a tangent direction.

    Every sample must be first-order nonrigid, each attached field must be a first-order flex
    of its own configuration, and at r = 0 the curve velocity must equal twice the attached field.
    """

    policy = policy or TolerancePolicy.default()
    before, after = _neighbors(curve)
    diameter = curve.diameter
    flex_tolerance = policy.gate(diameter)

    checks: list[SampleCheck] = []
    for sample in curve.samples:
        report = first_order_flex_space(sample.configuration, policy)
        residual = assemble_rigidity_operator(sample.configuration).apply(sample.flex)
        checks.append(
            SampleCheck(
                r=sample.r,
                nonrigid=report.nonrigid,
                flex_residual=float(np.max(np.abs(residual), initial=0.0)),
                flex_space=report,
            )
        )

    base = curve.base
    h_minus, h_plus = -before.r, after.r
    velocity = three_point_derivative(
        before.configuration.positions,
        base.configuration.positions,
        after.configuration.positions,
        h_minus,
        h_plus,
    )
    velocity_error = float(np.linalg.norm(velocity - 2.0 * base.flex.vectors))
    velocity_tolerance = policy.velocity_tolerance(max(h_minus, h_plus), diameter)

    reasons: list[CurveCondition] = []
    if not all(check.nonrigid for check in checks):
        reasons.append(CurveCondition.nonrigidity)
    if any(check.flex_residual > flex_tolerance for check in checks):
        reasons.append(CurveCondition.flex_family)
    if velocity_error > velocity_tolerance:
        reasons.append(CurveCondition.velocity_match)

    warnings: list[str] = []
    ranks = sorted({check.flex_space.judgment.rank for check in checks})
    if len(ranks) > 1:
        warnings.append(f"rigidity rank changes along the curve: {ranks}")
    marginal = [check.r for check in checks if check.flex_space.judgment.marginal]
    if marginal:
        warnings.append(f"marginal rank decisions at r = {marginal}")
    for warning in warnings:
        log.warning(warning)

    verdict = Verdict.invalid if reasons else Verdict.valid
    log.info(
        "curve %s (velocity error %.3e, tolerance %.3e)",
        verdict,
        velocity_error,
        velocity_tolerance,
    )
    return CurveValidation(
        samples=tuple(checks),
        velocity_match_error=velocity_error,
        velocity_tolerance=velocity_tolerance,
        flex_tolerance=flex_tolerance,
        verdict=verdict,
        reasons=tuple(reasons),
        warnings=tuple(warnings),
    )
