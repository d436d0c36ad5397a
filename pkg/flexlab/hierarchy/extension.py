from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from msgspec import Struct

from ..errors import FlexlabPreconditionError
from ..model import Configuration, FlexField, FlexJet, Stress, edge_differences
from ..numerics import LinearSolveReport, TolerancePolicy, least_squares_with_certificate
from ..rigidity import assemble_rigidity_operator
from ..utils import Enum
from .residuals import hierarchy_residuals, quadratic_terms

if TYPE_CHECKING:
    import numpy as np
    from numpy.typing import NDArray

__all__ = (
    "ExtensionReport",
    "ExtensionStatus",
    "GreedyExtension",
    "check_flex_gate",
    "extend_greedily",
    "extend_one_order",
    "extension_rhs",
)

log = logging.getLogger(__name__)

GREEDY_NOTE = (
    "obstruction found after minimum-norm choices at lower orders; "
    "a different lower-order completion might still extend"
)


class ExtensionStatus(Enum):
    extended = "extended"
    obstructed = "obstructed"


class ExtensionReport(Struct, frozen=True, eq=False):
    """Result of solving for xi(order) given xi(1)..xi(order - 1).

    Exactly one of ``new_field`` and ``certificate`` is set. The certificate is a
    unit-norm self-stress and ``stress_energy`` its pairing with the quadratic terms.
    """

    status: ExtensionStatus
    order: int
    solve_report: LinearSolveReport
    new_field: FlexField | None = None
    certificate: Stress | None = None
    stress_energy: float | None = None

    @property
    def extended(self) -> bool:
        return self.status is ExtensionStatus.extended


class GreedyExtension(Struct, frozen=True, eq=False):
    jet: FlexJet
    requested_order: int
    report: ExtensionReport | None = None
    warnings: tuple[str, ...] = ()

    @property
    def reached_order(self) -> int:
        return self.jet.order

    @property
    def complete(self) -> bool:
        return self.jet.order >= self.requested_order


def check_flex_gate(
    configuration: Configuration, jet: FlexJet, policy: TolerancePolicy, *, up_to: int | None = None
) -> None:
    """Reject jets that are not flexes up to ``up_to`` within the residual gate."""

    gate = policy.gate(configuration.diameter)
    residuals = hierarchy_residuals(configuration, jet, up_to)
    for residual in residuals.per_order:
        if residual.max_abs > gate:
            raise FlexlabPreconditionError(
                f"input jet is not a flex to order {residual.order} "
                f"(max residual {residual.max_abs:.3e} > gate {gate:.3e})",
                residual=residual.max_abs,
                order=residual.order,
            )


def extension_rhs(configuration: Configuration, jet: FlexJet) -> NDArray[np.float64]:
    """b with b_e = sum_{m=1}^{k} (d xi(m)) . (d xi(k+1-m)) for a jet of order k."""

    _, dks = edge_differences(configuration, jet)
    return quadratic_terms(dks, jet.order + 1)


def extend_one_order(
    configuration: Configuration, jet: FlexJet, policy: TolerancePolicy | None = None
) -> ExtensionReport:
    """Solve R(x) xi(k+1) = -b for the next field of ``jet``, or certify that no solution exists."""

    policy = policy or TolerancePolicy.default()
    check_flex_gate(configuration, jet, policy)

    order = jet.order + 1
    b = extension_rhs(configuration, jet)
    operator = assemble_rigidity_operator(configuration)
    report = least_squares_with_certificate(operator.matrix, -b, policy)

    if report.solution is not None:
        log.debug("extended to order %d (residual %.3e)", order, report.residual_norm)
        return ExtensionReport(
            status=ExtensionStatus.extended,
            order=order,
            solve_report=report,
            new_field=FlexField.from_stacked(report.solution),
        )

    assert report.certificate is not None
    certificate = Stress.create(configuration.framework, report.certificate)
    stress_energy = float(certificate.weights @ b)
    log.info("order %d obstructed, stress energy %.6e", order, stress_energy)
    return ExtensionReport(
        status=ExtensionStatus.obstructed,
        order=order,
        solve_report=report,
        certificate=certificate,
        stress_energy=stress_energy,
    )


def extend_greedily(
    configuration: Configuration,
    xi1: FlexField,
    max_order: int,
    policy: TolerancePolicy | None = None,
) -> GreedyExtension:
    """Extend ``xi1`` order by order until ``max_order`` or the first linear obstruction."""

    policy = policy or TolerancePolicy.default()
    jet = FlexJet((xi1,))
    check_flex_gate(configuration, jet, policy)

    report: ExtensionReport | None = None
    while jet.order < max_order:
        report = extend_one_order(configuration, jet, policy)
        if report.new_field is None:
            warnings = (GREEDY_NOTE,) if report.order > 2 else ()
            return GreedyExtension(jet, max_order, report, warnings)
        jet = jet.extended(report.new_field)

    return GreedyExtension(jet, max_order, report)
