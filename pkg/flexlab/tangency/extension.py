from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from msgspec import Struct

from ..errors import FlexlabCurveError
from ..hierarchy import hierarchy_residuals
from ..model import ConfigCurve, Configuration, FlexField, FlexJet
from ..numerics import TolerancePolicy
from ..utils import Enum
from .validation import CurveValidation, three_point_derivative, validate_curve

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import NDArray

__all__ = (
    "ConvergenceRow",
    "Stencil",
    "TangentExtensionResult",
    "convergence_slope",
    "tangent_extension",
)

log = logging.getLogger(__name__)


class Stencil(Enum):
    central = "central"
    richardson = "richardson"
    three_point = "three-point"


class ConvergenceRow(Struct, frozen=True):
    h: float
    residual: float


class TangentExtensionResult(Struct, frozen=True, eq=False):
    """Second-order field built from the derivative of the attached flexes at r = 0.

    ``xi2`` is half the derivative estimate; ``second_order_residual`` is the order-2
    hierarchy residual norm of (xi1, xi2) on the base configuration.
    """

    xi1: FlexField
    xi2: FlexField
    fd_step: float
    stencil: Stencil
    second_order_residual: float
    convergence_table: tuple[ConvergenceRow, ...]
    validation: CurveValidation

    @property
    def jet(self) -> FlexJet:
        return FlexJet((self.xi1, self.xi2))

    @property
    def slope(self) -> float:
        return convergence_slope(self.convergence_table)


def _central(minus: NDArray[np.float64], plus: NDArray[np.float64], w: float) -> NDArray[np.float64]:
    return (plus - minus) / (2.0 * w)


def _order_two_residual(configuration: Configuration, xi1: FlexField, xi2: FlexField) -> float:
    return hierarchy_residuals(configuration, FlexJet((xi1, xi2)))[2].norm


def convergence_slope(table: Sequence[ConvergenceRow], *, floor: float = 1e-13) -> float:
    """Least-squares slope of log(residual) against log(h), ignoring rows at the rounding floor."""

    rows = [row for row in table if row.residual > floor and row.h > 0]
    if len(rows) < 2:
        return float("nan")
    h = np.log([row.h for row in rows])
    residual = np.log([row.residual for row in rows])
    return float(np.polyfit(h, residual, 1)[0])


def tangent_extension(
    curve: ConfigCurve, policy: TolerancePolicy | None = None
) -> TangentExtensionResult:
    """Second-order extension of the base flex of a curve tangent to the nonrigid set.

    The derivative of the attached flexes at r = 0 is estimated by central differences,
    Richardson-extrapolated from the two smallest symmetric widths when the curve has at
    least five samples. Curves without a symmetric pair fall back to the three-point stencil.
    """

    policy = policy or TolerancePolicy.default()
    validation = validate_curve(curve, policy)
    if not validation.valid:
        raise FlexlabCurveError(
            "curve is not tangent to the nonrigid set",
            [str(reason) for reason in validation.reasons],
        )

    base = curve.base
    xi1 = base.flex
    pairs = curve.symmetric_pairs()

    table: list[ConvergenceRow] = []
    for w, minus, plus in pairs:
        xi2_w = FlexField.create(0.5 * _central(minus.flex.vectors, plus.flex.vectors, w))
        table.append(ConvergenceRow(w, _order_two_residual(base.configuration, xi1, xi2_w)))

    if len(pairs) >= 2 and len(curve.samples) >= 5:
        (w1, m1, p1), (w2, m2, p2) = pairs[0], pairs[1]
        d1 = _central(m1.flex.vectors, p1.flex.vectors, w1)
        d2 = _central(m2.flex.vectors, p2.flex.vectors, w2)
        derivative = (w2 * w2 * d1 - w1 * w1 * d2) / (w2 * w2 - w1 * w1)
        stencil, step = Stencil.richardson, w1
    elif pairs:
        w, minus, plus = pairs[0]
        derivative = _central(minus.flex.vectors, plus.flex.vectors, w)
        stencil, step = Stencil.central, w
    else:
        before, after = curve.neighbors()  # pyright: ignore[reportGeneralTypeIssues]
        derivative = three_point_derivative(
            before.flex.vectors, xi1.vectors, after.flex.vectors, -before.r, after.r
        )
        stencil, step = Stencil.three_point, max(-before.r, after.r)

    xi2 = FlexField.create(0.5 * derivative)
    residual = _order_two_residual(base.configuration, xi1, xi2)
    log.info("tangent extension via %s stencil, order-2 residual %.3e", stencil, residual)

    return TangentExtensionResult(
        xi1=xi1,
        xi2=xi2,
        fd_step=step,
        stencil=stencil,
        second_order_residual=residual,
        convergence_table=tuple(table),
        validation=validation,
    )
