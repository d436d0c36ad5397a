from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from msgspec import Struct

from ..errors import FlexlabSizeError
from ..model import Configuration, FlexField, Stress
from ..numerics import (
    TolerancePolicy,
    ToleranceJudgment,
    cokernel_basis,
    nullspace_basis,
    numerical_rank,
    orthonormal_span,
)
from ..utils import Enum
from .motions import trivial_motion_basis
from .operator import assemble_rigidity_operator

if TYPE_CHECKING:
    from collections.abc import Iterable

    from numpy.typing import NDArray

__all__ = (
    "FlexSpaceReport",
    "RigidityClass",
    "anchored_flex",
    "classify",
    "equilibrium_stress_space",
    "first_order_flex_space",
    "split_flex",
    "stress_pairing",
)

log = logging.getLogger(__name__)


class RigidityClass(Enum):
    first_order_rigid = "first-order rigid"
    first_order_nonrigid = "first-order nonrigid"


class FlexSpaceReport(Struct, frozen=True, eq=False):
    """First-order flexes of a configuration, split into trivial and nontrivial parts.

    ``nontrivial_basis`` is orthonormal and orthogonal to every trivial motion;
    ``flex_basis`` spans the whole flex space (columns, stacked 3n-vectors).
    """

    trivial_dim: int
    total_flex_dim: int
    nontrivial_dim: int
    nontrivial_basis: tuple[FlexField, ...]
    judgment: ToleranceJudgment
    flex_basis: NDArray[np.float64]
    warnings: tuple[str, ...] = ()

    @property
    def classification(self) -> RigidityClass:
        if self.nontrivial_dim > 0:
            return RigidityClass.first_order_nonrigid
        return RigidityClass.first_order_rigid

    @property
    def nonrigid(self) -> bool:
        return self.nontrivial_dim > 0


def first_order_flex_space(
    configuration: Configuration, policy: TolerancePolicy | None = None
) -> FlexSpaceReport:
    policy = policy or TolerancePolicy.default()
    matrix = assemble_rigidity_operator(configuration).matrix
    judgment = numerical_rank(matrix, policy)
    flexes = nullspace_basis(matrix, policy)

    trivial = trivial_motion_basis(configuration, policy)
    t = trivial.matrix(configuration.vertex_count)
    total = flexes.shape[1]
    nontrivial_dim = total - trivial.dimension

    warnings: list[str] = []
    if judgment.marginal:
        warnings.append(
            f"marginal rank decision (gap ratio {judgment.gap_ratio:.3g} < {policy.marginal_gap:g})"
        )
    if nontrivial_dim < 0:
        warnings.append(
            f"flex space ({total}) is smaller than the trivial motions ({trivial.dimension})"
        )
        log.warning("flex space dimension %d below trivial dimension %d", total, trivial.dimension)
        nontrivial_dim = 0

    projected = flexes - t @ (t.T @ flexes)
    basis = orthonormal_span(projected, policy, dimension=nontrivial_dim)

    return FlexSpaceReport(
        trivial_dim=trivial.dimension,
        total_flex_dim=total,
        nontrivial_dim=nontrivial_dim,
        nontrivial_basis=tuple(FlexField.from_stacked(column) for column in basis.T),
        judgment=judgment,
        flex_basis=flexes,
        warnings=tuple(warnings),
    )


def classify(configuration: Configuration, policy: TolerancePolicy | None = None) -> RigidityClass:
    return first_order_flex_space(configuration, policy).classification


def equilibrium_stress_space(
    configuration: Configuration, policy: TolerancePolicy | None = None
) -> tuple[Stress, ...]:
    """Orthonormal basis of self-stresses: w with sum_j w_ij (x_j - x_i) = 0 at every vertex."""

    matrix = assemble_rigidity_operator(configuration).matrix
    basis = cokernel_basis(matrix, policy)
    return tuple(Stress.create(configuration.framework, column) for column in basis.T)


def split_flex(
    configuration: Configuration, field: FlexField, policy: TolerancePolicy | None = None
) -> tuple[FlexField, FlexField]:
    """Orthogonal split of ``field`` into (trivial part, remainder)."""

    field.check_size(configuration.framework)
    t = trivial_motion_basis(configuration, policy).matrix(configuration.vertex_count)
    stacked = field.stacked()
    trivial = t @ (t.T @ stacked)
    return FlexField.from_stacked(trivial), FlexField.from_stacked(stacked - trivial)


def anchored_flex(
    configuration: Configuration,
    field: FlexField,
    anchors: Iterable[int],
    policy: TolerancePolicy | None = None,
) -> FlexField:
    """Representative of ``field`` modulo trivial motions that best fixes the ``anchors``.

    Subtracts the trivial motion that matches the anchor velocities in the least-squares
    sense; with three non-collinear anchors on a rigid sub-body the anchors end up at rest.
    """

    field.check_size(configuration.framework)
    anchors = sorted(set(anchors))
    if not anchors:
        raise FlexlabSizeError("anchored_flex needs at least one anchor vertex")
    t = trivial_motion_basis(configuration, policy).matrix(configuration.vertex_count)
    rows = np.concatenate([np.arange(3 * a, 3 * a + 3) for a in anchors])
    stacked = field.stacked()
    coefficients, *_ = np.linalg.lstsq(t[rows], stacked[rows], rcond=None)
    return FlexField.from_stacked(stacked - t @ coefficients)


def stress_pairing(stress: Stress, configuration: Configuration, field: FlexField) -> float:
    """sum_e w_e (x_i - x_j) . (xi_i - xi_j); vanishes for every first-order flex."""

    field.check_size(configuration.framework)
    forces = assemble_rigidity_operator(configuration).apply_transpose(stress)
    return float(forces.stacked() @ field.stacked())
