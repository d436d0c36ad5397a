from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from msgspec import Struct

from ..errors import FlexlabSurfaceError
from ..model import SurfaceGrid
from ..numerics import TolerancePolicy

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

__all__ = ("FormGrid", "fundamental_form", "interior_partials")

log = logging.getLogger(__name__)


def interior_partials(
    grid: SurfaceGrid, values: ArrayLike
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Central-difference partials d/du and d/dv of a (nu, nv, 3) field at interior nodes.

    Non-uniform spacing uses the three-point second-order formula.
    """

    values = np.asarray(values, dtype=float)
    if values.shape != grid.positions.shape:
        raise FlexlabSurfaceError(
            f"field has shape {values.shape}, grid expects {grid.positions.shape}"
        )
    du = np.gradient(values, grid.u, axis=0)[1:-1, 1:-1]
    dv = np.gradient(values, grid.v, axis=1)[1:-1, 1:-1]
    return du, dv


class FormGrid(Struct, frozen=True, eq=False):
    """First fundamental form E du^2 + 2F du dv + G dv^2 at interior nodes."""

    E: NDArray[np.float64]
    F: NDArray[np.float64]
    G: NDArray[np.float64]

    @property
    def determinant(self) -> NDArray[np.float64]:
        return self.E * self.G - self.F * self.F


def fundamental_form(grid: SurfaceGrid, policy: TolerancePolicy | None = None) -> FormGrid:
    policy = policy or TolerancePolicy.default()
    xu, xv = interior_partials(grid, grid.positions)
    e = np.einsum("ijk,ijk->ij", xu, xu)
    f = np.einsum("ijk,ijk->ij", xu, xv)
    g = np.einsum("ijk,ijk->ij", xv, xv)
    form = FormGrid(e, f, g)

    bad = form.determinant <= policy.rel_tol * e * g + policy.abs_tol
    if np.any(bad):
        # report in full-grid indices
        nodes = [(int(i) + 1, int(j) + 1) for i, j in np.argwhere(bad)]
        log.debug("immersion fails at %d of %d interior nodes", len(nodes), bad.size)
        raise FlexlabSurfaceError(
            f"grid is not an immersion at {len(nodes)} interior nodes (EG - F^2 <= 0)", nodes
        )
    return form
