from __future__ import annotations

from typing import TYPE_CHECKING, Any

import numpy as np
from msgspec import Struct

from ..errors import FlexlabSizeError, FlexlabValidationError
from ..utils import frozen_array
from .framework import Framework, require_valid

if TYPE_CHECKING:
    from collections.abc import Iterable

    from numpy.typing import ArrayLike, NDArray

__all__ = ("Configuration", "FlexField", "FlexJet", "Stress")


def _check_vectors(array: NDArray[Any], count: int, what: str) -> None:
    if array.ndim != 2 or array.shape[1] != 3:
        raise FlexlabSizeError(f"{what} must be a list of 3-vectors, got shape {array.shape}")
    if array.shape[0] != count:
        raise FlexlabSizeError(
            f"{what} has {array.shape[0]} vectors but the framework has {count} vertices"
        )
    if not np.all(np.isfinite(array)):
        raise FlexlabValidationError(f"{what} contains non-finite coordinates")


class Configuration(Struct, frozen=True, eq=False):
    """An embedding of a framework's vertices in 3-space."""

    framework: Framework
    positions: NDArray[np.float64]

    def __post_init__(self) -> None:
        require_valid(self.framework)
        _check_vectors(self.positions, self.framework.vertex_count, "positions")
        self.positions.flags.writeable = False

        lengths = self.edge_lengths()
        degenerate = [
            f"edge {edge} has zero length"
            for edge, length in zip(self.framework.edges, lengths, strict=True)
            if not length > 0
        ]
        if degenerate:
            raise FlexlabValidationError("configuration has coincident bar endpoints", degenerate)

    @classmethod
    def create(cls, framework: Framework, positions: ArrayLike) -> Configuration:
        return cls(framework, frozen_array(positions))

    @property
    def vertex_count(self) -> int:
        return self.framework.vertex_count

    @property
    def diameter(self) -> float:
        if self.vertex_count < 2:
            return 0.0
        deltas = self.positions[:, None, :] - self.positions[None, :, :]
        return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", deltas, deltas))))

    def edge_vectors(self) -> NDArray[np.float64]:
        """Rows x_i - x_j for every edge (i, j), in canonical edge order."""

        if not self.framework.edges:
            return np.zeros((0, 3))
        index = np.array(self.framework.edges, dtype=int)
        return self.positions[index[:, 0]] - self.positions[index[:, 1]]

    def edge_lengths(self) -> NDArray[np.float64]:
        return np.linalg.norm(self.edge_vectors(), axis=1)

    def with_positions(self, positions: ArrayLike) -> Configuration:
        return Configuration.create(self.framework, positions)

    def transformed(
        self, rotation: ArrayLike, translation: ArrayLike = (0.0, 0.0, 0.0)
    ) -> Configuration:
        rotation = np.asarray(rotation, dtype=float)
        return self.with_positions(self.positions @ rotation.T + np.asarray(translation))

    def same_as(self, other: Configuration) -> bool:
        return self.framework == other.framework and np.array_equal(
            self.positions, other.positions
        )


class FlexField(Struct, frozen=True, eq=False):
    """One vector per vertex; a single order of a flex jet."""

    vectors: NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.vectors.ndim != 2 or self.vectors.shape[1] != 3:
            raise FlexlabSizeError(
                f"flex field must be a list of 3-vectors, got shape {self.vectors.shape}"
            )
        if not np.all(np.isfinite(self.vectors)):
            raise FlexlabValidationError("flex field contains non-finite vectors")
        self.vectors.flags.writeable = False

    @classmethod
    def create(cls, vectors: ArrayLike) -> FlexField:
        return cls(frozen_array(vectors))

    @classmethod
    def zeros(cls, vertex_count: int) -> FlexField:
        return cls.create(np.zeros((vertex_count, 3)))

    @classmethod
    def from_stacked(cls, stacked: ArrayLike) -> FlexField:
        return cls.create(np.asarray(stacked, dtype=float).reshape(-1, 3))

    @property
    def vertex_count(self) -> int:
        return self.vectors.shape[0]

    def stacked(self) -> NDArray[np.float64]:
        return self.vectors.reshape(-1).copy()

    def norm(self) -> float:
        return float(np.linalg.norm(self.vectors))

    def rotated(self, rotation: ArrayLike) -> FlexField:
        return FlexField.create(self.vectors @ np.asarray(rotation, dtype=float).T)

    def check_size(self, framework: Framework) -> None:
        if self.vertex_count != framework.vertex_count:
            raise FlexlabSizeError(
                f"flex field has {self.vertex_count} vectors but the framework has "
                f"{framework.vertex_count} vertices"
            )

    def same_as(self, other: FlexField) -> bool:
        return np.array_equal(self.vectors, other.vectors)

    def __add__(self, other: FlexField) -> FlexField:
        return FlexField.create(self.vectors + other.vectors)

    def __sub__(self, other: FlexField) -> FlexField:
        return FlexField.create(self.vectors - other.vectors)

    def __mul__(self, factor: float) -> FlexField:
        return FlexField.create(self.vectors * float(factor))

    __rmul__ = __mul__

    def __neg__(self) -> FlexField:
        return FlexField.create(-self.vectors)


class FlexJet(Struct, frozen=True, eq=False):
    """Fields xi(1)..xi(n) of the deformation x + 2 t xi(1) + ... + 2 t^n xi(n)."""

    fields: tuple[FlexField, ...]

    def __post_init__(self) -> None:
        if not self.fields:
            raise FlexlabSizeError("a flex jet needs at least one field")
        counts = {field.vertex_count for field in self.fields}
        if len(counts) != 1:
            raise FlexlabSizeError(f"jet fields disagree on vertex count: {sorted(counts)}")

    @classmethod
    def from_fields(cls, *fields: FlexField | ArrayLike) -> FlexJet:
        return cls(
            tuple(
                field if isinstance(field, FlexField) else FlexField.create(field)
                for field in fields
            )
        )

    @classmethod
    def zero(cls, vertex_count: int, order: int) -> FlexJet:
        return cls(tuple(FlexField.zeros(vertex_count) for _ in range(order)))

    @property
    def order(self) -> int:
        return len(self.fields)

    @property
    def vertex_count(self) -> int:
        return self.fields[0].vertex_count

    def __getitem__(self, k: int) -> FlexField:
        """1-based access: ``jet[1]`` is the first-order field."""

        if not 1 <= k <= self.order:
            raise IndexError(f"jet has orders 1..{self.order}, asked for {k}")
        return self.fields[k - 1]

    def extended(self, field: FlexField) -> FlexJet:
        return FlexJet((*self.fields, field))

    def rotated(self, rotation: ArrayLike) -> FlexJet:
        return FlexJet(tuple(field.rotated(rotation) for field in self.fields))

    def check_size(self, framework: Framework) -> None:
        self.fields[0].check_size(framework)


class Stress(Struct, frozen=True, eq=False):
    """Edge weights (force per unit length), indexed like ``framework.edges``."""

    framework: Framework
    weights: NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.weights.shape != (self.framework.edge_count,):
            raise FlexlabSizeError(
                f"stress has {self.weights.shape} weights for {self.framework.edge_count} edges"
            )
        self.weights.flags.writeable = False

    @classmethod
    def create(cls, framework: Framework, weights: ArrayLike) -> Stress:
        return cls(framework, frozen_array(weights))

    def support(self, tol: float = 1e-10) -> list[tuple[int, int]]:
        scale = float(np.max(np.abs(self.weights), initial=0.0))
        return [
            edge
            for edge, weight in zip(self.framework.edges, self.weights, strict=True)
            if abs(weight) > tol * scale
        ]

    def items(self) -> Iterable[tuple[tuple[int, int], float]]:
        return zip(self.framework.edges, (float(w) for w in self.weights), strict=True)

    def vertex_forces(self, configuration: Configuration) -> NDArray[np.float64]:
        """Per-vertex sums of w_ij (x_j - x_i); zero for an equilibrium stress."""

        forces = np.zeros((configuration.vertex_count, 3))
        for (i, j), weight in self.items():
            delta = configuration.positions[j] - configuration.positions[i]
            forces[i] += weight * delta
            forces[j] -= weight * delta
        return forces
