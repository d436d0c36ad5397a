from __future__ import annotations

from typing import TYPE_CHECKING, Any

import numpy as np
import sympy

from ..utils import Enum

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

__all__ = ("Precision", "as_exact_array", "as_precision", "dot_rows")


class Precision(Enum):
    double = "double"
    exact = "exact"


def _to_rational(value: Any) -> sympy.Rational:
    if isinstance(value, sympy.Rational):
        return value
    if isinstance(value, (int, np.integer)):
        return sympy.Integer(int(value))
    # decimal-string rationalization: 0.1 -> 1/10, not the binary expansion
    return sympy.Rational(repr(float(value)))


_vectorized_rational = np.frompyfunc(_to_rational, 1, 1)


def as_exact_array(values: ArrayLike) -> NDArray[np.object_]:
    array = np.asarray(values, dtype=object)
    if array.size == 0:
        return np.empty(array.shape, dtype=object)
    return np.asarray(_vectorized_rational(array), dtype=object)


def as_precision(values: ArrayLike, precision: Precision) -> NDArray[Any]:
    if precision is Precision.exact:
        return as_exact_array(values)
    return np.asarray(values, dtype=float)


def dot_rows(a: NDArray[Any], b: NDArray[Any]) -> NDArray[Any]:
    """Row-wise dot product that also works on object arrays of rationals."""

    if a.dtype == object or b.dtype == object:
        return (a * b).sum(axis=-1)
    return np.einsum("...i,...i->...", a, b)
