from __future__ import annotations

from typing import TYPE_CHECKING, Any

import numpy as np

from .configuration import Configuration, FlexJet
from .scalar import Precision, as_precision, dot_rows

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import NDArray

__all__ = ("edge_differences", "edge_length_polynomial", "evaluate_deformation")


def evaluate_deformation(configuration: Configuration, jet: FlexJet, t: float) -> Configuration:
    """Positions x + sum_k 2 t^k xi(k), evaluated exactly (no truncation)."""

    jet.check_size(configuration.framework)
    if t == 0:
        return configuration

    positions = configuration.positions.copy()
    power = 1.0
    for field in jet.fields:
        power *= t
        positions += 2.0 * power * field.vectors
    return configuration.with_positions(positions)


def edge_differences(
    configuration: Configuration,
    jet: FlexJet,
    *,
    precision: Precision = Precision.double,
) -> tuple[NDArray[Any], tuple[NDArray[Any], ...]]:
    """Per-edge differences x_i - x_j and xi(k)_i - xi(k)_j for k = 1..n."""

    jet.check_size(configuration.framework)
    edges = np.array(configuration.framework.edges, dtype=int).reshape(-1, 2)

    def differences(values: NDArray[np.float64]) -> NDArray[Any]:
        converted = as_precision(values, precision)
        return converted[edges[:, 0]] - converted[edges[:, 1]]

    return differences(configuration.positions), tuple(
        differences(field.vectors) for field in jet.fields
    )


def _polynomial(d0: NDArray[Any], dks: Sequence[NDArray[Any]]) -> NDArray[Any]:
    # |d0 + sum_k 2 t^k d_k|^2 - |d0|^2, coefficient of t^m sums D_a . D_b over a + b = m
    terms = [d0, *(2 * dk for dk in dks)]
    n = len(dks)
    coefficients: list[Any] = [0] * (2 * n + 1)
    for a in range(n + 1):
        for b in range(n + 1):
            if a + b == 0:
                continue
            coefficients[a + b] = coefficients[a + b] + dot_rows(terms[a], terms[b])
    dtype = object if d0.dtype == object else float
    return np.array(coefficients, dtype=dtype)


def edge_length_polynomial(
    configuration: Configuration,
    jet: FlexJet,
    edge: Sequence[int],
    *,
    precision: Precision = Precision.double,
) -> NDArray[Any]:
    """Coefficients (ascending powers of t, length 2n + 1) of the squared-length change of ``edge``."""

    index = configuration.framework.edge_index(edge)
    d0, dks = edge_differences(configuration, jet, precision=precision)
    return _polynomial(d0[index], [dk[index] for dk in dks])
