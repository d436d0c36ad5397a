from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any

import numpy as np
from msgspec import Struct

from ..errors import FlexlabSizeError
from ..model import Configuration, FlexJet, Precision, dot_rows, edge_differences

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import NDArray

__all__ = (
    "HierarchyResidual",
    "OrderResidual",
    "hierarchy_residuals",
    "order_residual",
    "quadratic_terms",
)


class OrderResidual(Struct, frozen=True, eq=False):
    order: int
    values: NDArray[Any]
    norm: float

    @property
    def max_abs(self) -> float:
        return float(max((abs(value) for value in self.values), default=0.0))


class HierarchyResidual(Struct, frozen=True, eq=False):
    per_order: tuple[OrderResidual, ...]
    max_order_checked: int

    def __getitem__(self, order: int) -> OrderResidual:
        return self.per_order[order - 1]

    def norms(self) -> list[float]:
        return [residual.norm for residual in self.per_order]


def quadratic_terms(dks: Sequence[NDArray[Any]], order: int) -> NDArray[Any]:
    """sum_{m=1}^{order-1} (d xi(m)) . (d xi(order-m)) per edge."""

    total: Any = 0
    for m in range(1, order):
        total = total + dot_rows(dks[m - 1], dks[order - m - 1])
    if isinstance(total, int):
        return np.zeros(dks[0].shape[0], dtype=dks[0].dtype)
    return total


def order_residual(d0: NDArray[Any], dks: Sequence[NDArray[Any]], order: int) -> NDArray[Any]:
    """(x_i - x_j) . (xi(k)_i - xi(k)_j) + sum_m (d xi(m)) . (d xi(k-m)) per edge."""

    return dot_rows(d0, dks[order - 1]) + quadratic_terms(dks, order)


def _norm(values: NDArray[Any]) -> float:
    if values.dtype == object:
        return math.sqrt(float(sum(value * value for value in values)))
    return float(np.linalg.norm(values))


def hierarchy_residuals(
    configuration: Configuration,
    jet: FlexJet,
    up_to: int | None = None,
    *,
    precision: Precision = Precision.double,
) -> HierarchyResidual:
    up_to = jet.order if up_to is None else up_to
    if not 1 <= up_to <= jet.order:
        raise FlexlabSizeError(f"cannot check order {up_to} of a jet of order {jet.order}")

    d0, dks = edge_differences(configuration, jet, precision=precision)
    per_order: list[OrderResidual] = []
    for order in range(1, up_to + 1):
        values = order_residual(d0, dks, order)
        per_order.append(OrderResidual(order, values, _norm(values)))
    return HierarchyResidual(tuple(per_order), up_to)
