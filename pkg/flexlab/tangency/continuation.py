from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from ..errors import FlexlabContinuationError, FlexlabPreconditionError
from ..model import ConfigCurve, Configuration, CurveSample, FlexField
from ..numerics import TolerancePolicy, nullspace_basis
from ..rigidity import assemble_rigidity_operator

if TYPE_CHECKING:
    from numpy.typing import NDArray

__all__ = ("edge_length_drift", "make_flexible_motion_curve")

log = logging.getLogger(__name__)

MAX_ITERATIONS = 30
STAGNATION_LIMIT = 3


class _Corrector:
    """Gauss-Newton projection onto the fixed-length set, pinned along the base flex space."""

    def __init__(self, base: Configuration, xi1: FlexField, policy: TolerancePolicy) -> None:
        self.base = base
        self.x0 = base.positions.reshape(-1).copy()
        self.squared_lengths = base.edge_lengths() ** 2
        self.frame = nullspace_basis(assemble_rigidity_operator(base).matrix, policy)
        self.target_slope = 2.0 * (self.frame.T @ xi1.stacked())
        self.tolerance = 1e-12 * max(float(np.max(self.squared_lengths, initial=0.0)), 1.0)

    def _residual(self, x: NDArray[np.float64], r: float) -> NDArray[np.float64]:
        deltas = x.reshape(-1, 3)
        edges = np.array(self.base.framework.edges, dtype=int).reshape(-1, 2)
        d = deltas[edges[:, 0]] - deltas[edges[:, 1]]
        lengths = np.einsum("ij,ij->i", d, d) - self.squared_lengths
        pinned = self.frame.T @ (x - self.x0) - r * self.target_slope
        return np.concatenate([lengths, pinned])

    def _jacobian(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        matrix = assemble_rigidity_operator(self.base.with_positions(x.reshape(-1, 3))).matrix
        return np.vstack([2.0 * matrix, self.frame.T])

    def correct(self, x: NDArray[np.float64], r: float) -> NDArray[np.float64]:
        previous = np.inf
        stalled = 0
        for iteration in range(MAX_ITERATIONS):
            residual = self._residual(x, r)
            size = float(np.max(np.abs(residual), initial=0.0))
            log.debug("r = %.6g, iteration %d, residual %.3e", r, iteration, size)
            if size <= self.tolerance:
                return x
            stalled = stalled + 1 if size > 0.5 * previous else 0
            if stalled >= STAGNATION_LIMIT:
                break
            previous = size
            step, *_ = np.linalg.lstsq(self._jacobian(x), -residual, rcond=None)
            x = x + step
        raise FlexlabContinuationError(
            f"no finite motion found: length correction stalls at residual {previous:.3e}", r=r
        )


def _transport(
    configuration: Configuration, flex: FlexField, policy: TolerancePolicy
) -> tuple[FlexField, float]:
    """Flex of ``configuration`` closest to ``flex`` and its overlap with ``flex``.

    The overlap |<P f, f>| / (|P f| |f|) of an orthogonal projection is |P f| / |f|.
    """

    basis = nullspace_basis(assemble_rigidity_operator(configuration).matrix, policy)
    stacked = flex.stacked()
    projected = basis @ (basis.T @ stacked)
    norm = float(np.linalg.norm(stacked))
    kept = 1.0 if norm == 0 else float(np.linalg.norm(projected)) / norm
    return FlexField.from_stacked(projected), kept


def make_flexible_motion_curve(
    configuration: Configuration,
    xi1: FlexField,
    steps: int = 5,
    h: float = 1e-3,
    policy: TolerancePolicy | None = None,
) -> ConfigCurve:
    """Follow a length-preserving motion with initial velocity ``2 * xi1`` for ``steps`` steps each way.

    Samples sit at r = k h for k = -steps..steps. Each step predicts along the current flex
    and corrects back onto the fixed-length set, keeping the base flex-space coordinates at
    2 r xi1. The attached flex at each sample is the flex of that sample with the largest
    overlap with the previous sample's flex.
    """

    policy = policy or TolerancePolicy.default()
    if steps < 1:
        raise FlexlabContinuationError(f"need at least one step, got {steps}")
    if not h > 0:
        raise FlexlabContinuationError(f"step size must be positive, got {h}")

    xi1.check_size(configuration.framework)
    gate = policy.gate(configuration.diameter)
    flex_residual = float(
        np.max(np.abs(assemble_rigidity_operator(configuration).apply(xi1)), initial=0.0)
    )
    if flex_residual > gate:
        raise FlexlabPreconditionError(
            f"initial field is not a first-order flex (residual {flex_residual:.3e} > gate {gate:.3e})",
            residual=flex_residual,
            order=1,
        )

    corrector = _Corrector(configuration, xi1, policy)
    samples: dict[int, CurveSample] = {0: CurveSample(0.0, configuration, xi1)}

    for direction in (1, -1):
        previous = samples[0]
        for k in range(1, steps + 1):
            r = direction * k * h
            predicted = previous.configuration.positions.reshape(-1) + 2.0 * (
                r - previous.r
            ) * previous.flex.stacked()
            x = corrector.correct(predicted, r)
            current = configuration.with_positions(x.reshape(-1, 3))

            flex, overlap = _transport(current, previous.flex, policy)
            log.debug("r = %.6g, flex overlap with the previous sample %.6f", r, overlap)
            if overlap < policy.overlap_min:
                raise FlexlabContinuationError(
                    f"no finite motion found: flex branch lost (overlap {overlap:.3f})",
                    r=r,
                )

            previous = CurveSample(r, current, flex)
            samples[direction * k] = previous

    curve = ConfigCurve(tuple(samples[k] for k in sorted(samples)), step=h)
    log.info(
        "continued %d samples, max edge-length drift %.3e",
        len(curve.samples),
        float(np.max(edge_length_drift(curve), initial=0.0)),
    )
    return curve


def edge_length_drift(curve: ConfigCurve) -> NDArray[np.float64]:
    """Per-sample maximum relative change of the edge lengths against the r = 0 sample."""

    reference = curve.base.configuration.edge_lengths()
    if reference.size == 0:
        return np.zeros(len(curve.samples))
    return np.array(
        [
            float(np.max(np.abs(sample.configuration.edge_lengths() - reference) / reference))
            for sample in curve.samples
        ]
    )
