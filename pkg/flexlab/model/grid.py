from __future__ import annotations

from typing import TYPE_CHECKING, Any

import numpy as np
from msgspec import Struct

from ..errors import FlexlabSurfaceError
from ..utils import frozen_array

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from numpy.typing import ArrayLike, NDArray

    SurfaceMap = Callable[[NDArray[np.float64], NDArray[np.float64]], ArrayLike]

__all__ = ("SurfaceGrid",)

MIN_SAMPLES = 3


def _check_axis(values: NDArray[np.float64], name: str) -> None:
    if values.ndim != 1 or values.size < MIN_SAMPLES:
        raise FlexlabSurfaceError(
            f"{name} needs at least {MIN_SAMPLES} samples, got shape {values.shape}"
        )
    if not np.all(np.isfinite(values)) or np.any(np.diff(values) <= 0):
        raise FlexlabSurfaceError(f"{name} samples must be finite and strictly increasing")


class SurfaceGrid(Struct, frozen=True, eq=False):
    """Tensor-product sample x(u_i, v_j) of a parametric surface.

    ``jets[k - 1]`` holds the sampled order-k field, same shape as ``positions``.
    """

    u: NDArray[np.float64]
    v: NDArray[np.float64]
    positions: NDArray[np.float64]
    jets: tuple[NDArray[np.float64], ...] = ()

    def __post_init__(self) -> None:
        _check_axis(self.u, "u")
        _check_axis(self.v, "v")
        shape = (self.u.size, self.v.size, 3)
        if self.positions.shape != shape:
            raise FlexlabSurfaceError(
                f"positions have shape {self.positions.shape}, expected {shape}"
            )
        if not np.all(np.isfinite(self.positions)):
            raise FlexlabSurfaceError("positions contain non-finite values")
        for order, field in enumerate(self.jets, start=1):
            if field.shape != shape:
                raise FlexlabSurfaceError(
                    f"order-{order} field has shape {field.shape}, expected {shape}"
                )
            if not np.all(np.isfinite(field)):
                raise FlexlabSurfaceError(f"order-{order} field contains non-finite values")

        for array in (self.u, self.v, self.positions, *self.jets):
            array.flags.writeable = False

    @classmethod
    def create(
        cls,
        u: ArrayLike,
        v: ArrayLike,
        positions: ArrayLike,
        jets: Sequence[ArrayLike] = (),
    ) -> SurfaceGrid:
        return cls(
            frozen_array(u),
            frozen_array(v),
            frozen_array(positions),
            tuple(frozen_array(field) for field in jets),
        )

    @classmethod
    def sample(
        cls,
        u: ArrayLike,
        v: ArrayLike,
        surface: SurfaceMap,
        jets: Sequence[SurfaceMap] = (),
    ) -> SurfaceGrid:
        """Sample closed-form maps ``f(U, V) -> (..., 3)`` on the meshgrid of u and v."""

        uu, vv = np.meshgrid(np.asarray(u, dtype=float), np.asarray(v, dtype=float), indexing="ij")

        def evaluate(func: SurfaceMap) -> NDArray[Any]:
            return np.broadcast_to(np.asarray(func(uu, vv), dtype=float), (*uu.shape, 3))

        return cls.create(u, v, evaluate(surface), [evaluate(func) for func in jets])

    @property
    def order(self) -> int:
        return len(self.jets)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.u.size, self.v.size)
