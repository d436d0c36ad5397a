from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from msgspec import Struct

from ..errors import FlexlabSurfaceError
from ..model import SurfaceGrid
from .forms import interior_partials

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    Partials = tuple[NDArray[np.float64], NDArray[np.float64]]

__all__ = (
    "ResidualTriple",
    "first_order_residual_grid",
    "form_pairing",
    "hierarchy_residual_grid",
)


class ResidualTriple(Struct, frozen=True, eq=False):
    """The du^2, du dv and dv^2 coefficients of one order of the hierarchy, at interior nodes."""

    uu: NDArray[np.float64]
    uv: NDArray[np.float64]
    vv: NDArray[np.float64]

    def arrays(self) -> tuple[NDArray[np.float64], ...]:
        return (self.uu, self.uv, self.vv)

    @property
    def norm(self) -> float:
        return float(np.sqrt(sum(np.sum(a * a) for a in self.arrays())))

    @property
    def max_abs(self) -> float:
        return float(max(np.max(np.abs(a), initial=0.0) for a in self.arrays()))

    def node_maxima(self) -> NDArray[np.float64]:
        return np.max(np.abs(np.stack(self.arrays())), axis=0)

    def __add__(self, other: ResidualTriple) -> ResidualTriple:
        return ResidualTriple(self.uu + other.uu, self.uv + other.uv, self.vv + other.vv)


def _dot(a: NDArray[np.float64], b: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.einsum("ijk,ijk->ij", a, b)


def form_pairing(a: Partials, b: Partials) -> ResidualTriple:
    """Coefficients of da . db: (a_u . b_u, a_u . b_v + a_v . b_u, a_v . b_v)."""

    (au, av), (bu, bv) = a, b
    return ResidualTriple(_dot(au, bu), _dot(au, bv) + _dot(av, bu), _dot(av, bv))


def first_order_residual_grid(grid: SurfaceGrid, xi1: ArrayLike) -> ResidualTriple:
    """x_u . xi_u, x_u . xi_v + x_v . xi_u and x_v . xi_v at interior nodes."""

    return form_pairing(interior_partials(grid, grid.positions), interior_partials(grid, xi1))


def hierarchy_residual_grid(
    grid: SurfaceGrid, up_to: int | None = None
) -> tuple[ResidualTriple, ...]:
    """Per-order residuals dx . dxi(k) + sum_{m=1}^{k-1} dxi(m) . dxi(k-m) of the attached jet."""

    up_to = grid.order if up_to is None else up_to
    if up_to < 1:
        raise FlexlabSurfaceError(f"residual order must be at least 1, got {up_to}")
    if up_to > grid.order:
        raise FlexlabSurfaceError(
            f"grid carries a jet of order {grid.order}, order {up_to} was requested"
        )

    x = interior_partials(grid, grid.positions)
    fields = [interior_partials(grid, field) for field in grid.jets[:up_to]]

    residuals: list[ResidualTriple] = []
    for order in range(1, up_to + 1):
        total = form_pairing(x, fields[order - 1])
        for m in range(1, order):
            total = total + form_pairing(fields[m - 1], fields[order - m - 1])
        residuals.append(total)
    return tuple(residuals)
