from __future__ import annotations

from enum import Enum as _Enum
from typing import TYPE_CHECKING, Any

import numpy as np

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

__all__ = ("Enum", "fix_signs", "frozen_array")


class Enum(_Enum):
    def __repr__(self) -> str:
        return f"{self.__class__.__name__}.{self.name}"

    def __str__(self) -> str:
        return str(self.value)


def frozen_array(values: ArrayLike, *, dtype: Any = float) -> NDArray[Any]:
    array = np.array(values, dtype=dtype, copy=True)
    array.flags.writeable = False
    return array


def fix_signs(columns: NDArray[np.float64]) -> NDArray[np.float64]:
    """Flip each column so its largest-magnitude entry is positive."""

    if columns.size == 0:
        return columns
    pivots = np.argmax(np.abs(columns), axis=0)
    signs = np.sign(columns[pivots, np.arange(columns.shape[1])])
    signs[signs == 0] = 1.0
    return columns * signs
