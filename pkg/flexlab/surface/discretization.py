from __future__ import annotations

from typing import TYPE_CHECKING

from ..model import Configuration, FlexJet, Framework, SurfaceGrid

if TYPE_CHECKING:
    from ..model import Edge

__all__ = ("grid_framework", "grid_vertex")


def grid_vertex(grid: SurfaceGrid, i: int, j: int) -> int:
    return i * grid.v.size + j


def grid_framework(grid: SurfaceGrid) -> tuple[Configuration, FlexJet | None]:
    """The grid as a bar framework: nodes are vertices, u- and v-grid lines are bars.

    The attached jet, if any, becomes a FlexJet on the same vertex numbering.
    """

    nu, nv = grid.shape
    edges: list[Edge] = []
    for i in range(nu):
        for j in range(nv):
            here = grid_vertex(grid, i, j)
            if i + 1 < nu:
                edges.append((here, grid_vertex(grid, i + 1, j)))
            if j + 1 < nv:
                edges.append((here, grid_vertex(grid, i, j + 1)))

    framework = Framework.from_edges(nu * nv, edges)
    configuration = Configuration.create(framework, grid.positions.reshape(-1, 3))
    jet = FlexJet.from_fields(*(field.reshape(-1, 3) for field in grid.jets)) if grid.jets else None
    return configuration, jet
