from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from msgspec import Struct

from ..model import Configuration, FlexField
from ..numerics import TolerancePolicy, orthonormal_span

if TYPE_CHECKING:
    from numpy.typing import NDArray

__all__ = ("TrivialMotionBasis", "trivial_motion_basis", "trivial_motion_generators")


class TrivialMotionBasis(Struct, frozen=True, eq=False):
    fields: tuple[FlexField, ...]

    @property
    def dimension(self) -> int:
        return len(self.fields)

    def matrix(self, vertex_count: int) -> NDArray[np.float64]:
        """Stacked basis, one 3n-vector per column."""

        if not self.fields:
            return np.zeros((3 * vertex_count, 0))
        return np.column_stack([field.stacked() for field in self.fields])


def trivial_motion_generators(configuration: Configuration) -> NDArray[np.float64]:
    """The three translations and three linearized rotations, as columns of a 3n x 6 matrix."""

    n = configuration.vertex_count
    # rotations about the centroid span the same space and are better conditioned
    centered = configuration.positions - configuration.positions.mean(axis=0)
    generators = np.zeros((3 * n, 6))
    for axis in range(3):
        unit = np.zeros(3)
        unit[axis] = 1.0
        generators[:, axis] = np.tile(unit, n)
        generators[:, 3 + axis] = np.cross(unit, centered).reshape(-1)
    return generators


def trivial_motion_basis(
    configuration: Configuration, policy: TolerancePolicy | None = None
) -> TrivialMotionBasis:
    """Orthonormal basis of the infinitesimal isometries restricted to the vertices.

    Dimension 6 for a spatial or planar point set, 5 if it is collinear, 3 for one point.
    """

    basis = orthonormal_span(trivial_motion_generators(configuration), policy)
    return TrivialMotionBasis(tuple(FlexField.from_stacked(column) for column in basis.T))
