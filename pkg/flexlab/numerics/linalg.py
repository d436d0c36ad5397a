from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg
from msgspec import Struct

from ..errors import FlexlabNumericsError, FlexlabSizeError
from ..utils import Enum, fix_signs
from .policy import TolerancePolicy

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

__all__ = (
    "Consistency",
    "LinearSolveReport",
    "ToleranceJudgment",
    "cokernel_basis",
    "least_squares_with_certificate",
    "nullspace_basis",
    "numerical_rank",
    "orthonormal_span",
    "principal_angles",
)

log = logging.getLogger(__name__)


class ToleranceJudgment(Struct, frozen=True):
    rank: int
    singular_values: tuple[float, ...]
    threshold_used: float
    gap_ratio: float
    marginal: bool = False


class Consistency(Enum):
    solvable = "solvable"
    obstructed = "obstructed"


class LinearSolveReport(Struct, frozen=True, eq=False):
    """Outcome of ``m x = b`` in the least-squares sense.

    ``certificate`` is the unit left-null vector w maximizing |<w, b>|; it is present
    exactly when the system is obstructed, and ``solution`` exactly when it is not.
    """

    solution: NDArray[np.float64] | None
    residual_norm: float
    consistency: Consistency
    certificate: NDArray[np.float64] | None
    projection_norm: float
    threshold: float
    judgment: ToleranceJudgment

    @property
    def solvable(self) -> bool:
        return self.consistency is Consistency.solvable


def _as_matrix(matrix: ArrayLike) -> NDArray[np.float64]:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2:
        raise FlexlabSizeError(f"expected a matrix, got an array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise FlexlabNumericsError("matrix has non-finite entries")
    return m


def _svd(
    m: NDArray[np.float64],
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    rows, cols = m.shape
    if m.size == 0:
        return np.eye(rows), np.zeros(0), np.eye(cols)
    return np.linalg.svd(m, full_matrices=True)


def _judge(
    singular_values: NDArray[np.float64], shape: tuple[int, int], policy: TolerancePolicy
) -> ToleranceJudgment:
    largest = float(singular_values[0]) if singular_values.size else 0.0
    threshold = policy.rank_threshold(largest, shape)
    rank = int(np.count_nonzero(singular_values >= threshold))

    if 0 < rank < singular_values.size and singular_values[rank] > 0:
        gap_ratio = float(singular_values[rank - 1] / singular_values[rank])
    else:
        gap_ratio = math.inf
    marginal = gap_ratio < policy.marginal_gap
    if marginal:
        log.warning(
            "marginal rank decision: rank %d with gap ratio %.3g below %.3g",
            rank,
            gap_ratio,
            policy.marginal_gap,
        )

    return ToleranceJudgment(
        rank=rank,
        singular_values=tuple(float(s) for s in singular_values),
        threshold_used=threshold,
        gap_ratio=gap_ratio,
        marginal=marginal,
    )


def numerical_rank(matrix: ArrayLike, policy: TolerancePolicy | None = None) -> ToleranceJudgment:
    m = _as_matrix(matrix)
    _, s, _ = _svd(m)
    return _judge(s, m.shape, policy or TolerancePolicy.default())


def nullspace_basis(
    matrix: ArrayLike, policy: TolerancePolicy | None = None
) -> NDArray[np.float64]:
    """Orthonormal right-null basis, one vector per column."""

    m = _as_matrix(matrix)
    _, s, vh = _svd(m)
    judgment = _judge(s, m.shape, policy or TolerancePolicy.default())
    return fix_signs(vh[judgment.rank :].T.copy())


def cokernel_basis(
    matrix: ArrayLike, policy: TolerancePolicy | None = None
) -> NDArray[np.float64]:
    """Orthonormal left-null basis, one vector per column."""

    m = _as_matrix(matrix)
    u, s, _ = _svd(m)
    judgment = _judge(s, m.shape, policy or TolerancePolicy.default())
    return fix_signs(u[:, judgment.rank :].copy())


def orthonormal_span(
    columns: ArrayLike, policy: TolerancePolicy | None = None, *, dimension: int | None = None
) -> NDArray[np.float64]:
    """Orthonormal basis of the column span; ``dimension`` overrides the rank decision."""

    m = _as_matrix(columns)
    u, s, _ = _svd(m)
    if dimension is None:
        dimension = _judge(s, m.shape, policy or TolerancePolicy.default()).rank
    dimension = max(0, min(dimension, s.size))
    return fix_signs(u[:, :dimension].copy())


def least_squares_with_certificate(
    matrix: ArrayLike, rhs: ArrayLike, policy: TolerancePolicy | None = None
) -> LinearSolveReport:
    policy = policy or TolerancePolicy.default()
    m = _as_matrix(matrix)
    b = np.asarray(rhs, dtype=float).reshape(-1)
    if b.shape[0] != m.shape[0]:
        raise FlexlabSizeError(f"right-hand side has {b.shape[0]} entries, matrix has {m.shape[0]} rows")
    if not np.all(np.isfinite(b)):
        raise FlexlabNumericsError("right-hand side has non-finite entries")

    u, s, vh = _svd(m)
    judgment = _judge(s, m.shape, policy)
    rank = judgment.rank

    coefficients = u[:, :rank].T @ b / s[:rank]
    solution = vh[:rank].T @ coefficients
    residual_norm = float(np.linalg.norm(m @ solution - b))

    cokernel = u[:, rank:]
    projection = cokernel @ (cokernel.T @ b)
    projection_norm = float(np.linalg.norm(projection))
    threshold = policy.solve_threshold(float(np.linalg.norm(b)))

    if residual_norm <= threshold:
        return LinearSolveReport(
            solution=solution,
            residual_norm=residual_norm,
            consistency=Consistency.solvable,
            certificate=None,
            projection_norm=projection_norm,
            threshold=threshold,
            judgment=judgment,
        )

    # sign fixed so that <certificate, b> > 0
    certificate = projection / projection_norm
    log.info(
        "obstructed solve: cokernel projection %.3e exceeds %.3e", projection_norm, threshold
    )
    return LinearSolveReport(
        solution=None,
        residual_norm=residual_norm,
        consistency=Consistency.obstructed,
        certificate=certificate,
        projection_norm=projection_norm,
        threshold=threshold,
        judgment=judgment,
    )


def principal_angles(a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    """Principal angles between the column spans of ``a`` and ``b``, largest first."""

    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros(0)
    return scipy.linalg.subspace_angles(a, b)
