from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from msgspec import Struct

from ..errors import FlexlabSizeError, FlexlabValidationError
from ..model import Configuration, FlexField, Stress

if TYPE_CHECKING:
    from numpy.typing import NDArray

__all__ = ("RigidityOperator", "assemble_rigidity_operator")


class RigidityOperator(Struct, frozen=True, eq=False):
    """One row per edge (i, j): x_i - x_j in block i, x_j - x_i in block j."""

    configuration: Configuration
    matrix: NDArray[np.float64]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape  # pyright: ignore[reportReturnType]

    def apply(self, field: FlexField) -> NDArray[np.float64]:
        """Per-edge values (x_i - x_j) . (xi_i - xi_j)."""

        field.check_size(self.configuration.framework)
        return self.matrix @ field.stacked()

    def apply_transpose(self, stress: Stress) -> FlexField:
        """Per-vertex sums of w_ij (x_i - x_j), the negated vertex forces of ``stress``."""

        if stress.framework.edge_count != self.matrix.shape[0]:
            raise FlexlabSizeError(
                f"stress has {stress.framework.edge_count} weights for {self.matrix.shape[0]} edges"
            )
        return FlexField.from_stacked(self.matrix.T @ stress.weights)


def assemble_rigidity_operator(configuration: Configuration) -> RigidityOperator:
    framework = configuration.framework
    deltas = configuration.edge_vectors()
    lengths = np.linalg.norm(deltas, axis=1)
    if np.any(lengths <= 0):
        bad = [str(edge) for edge, length in zip(framework.edges, lengths, strict=True) if length <= 0]
        raise FlexlabValidationError("rigidity operator needs non-degenerate edges", bad)

    matrix = np.zeros((framework.edge_count, 3 * framework.vertex_count))
    for row, ((i, j), delta) in enumerate(zip(framework.edges, deltas, strict=True)):
        matrix[row, 3 * i : 3 * i + 3] = delta
        matrix[row, 3 * j : 3 * j + 3] = -delta

    matrix.flags.writeable = False
    return RigidityOperator(configuration, matrix)
