from __future__ import annotations

from typing import TYPE_CHECKING

import sympy

from ..errors import FlexlabSizeError
from ..model.scalar import as_exact_array

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

__all__ = ("exact_matrix", "exact_nullity", "exact_rank")


def exact_matrix(matrix: ArrayLike) -> sympy.Matrix:
    """Rational copy of ``matrix``; floats are read through their shortest decimal form."""

    entries = as_exact_array(matrix)
    if entries.ndim != 2:
        raise FlexlabSizeError(f"expected a matrix, got shape {entries.shape}")
    rows, cols = entries.shape
    return sympy.Matrix(rows, cols, entries.reshape(-1).tolist())


def exact_rank(matrix: ArrayLike) -> int:
    m = exact_matrix(matrix)
    if m.rows == 0 or m.cols == 0:
        return 0
    return int(m.rank())


def exact_nullity(matrix: ArrayLike) -> int:
    m = exact_matrix(matrix)
    return m.cols - exact_rank(matrix)
