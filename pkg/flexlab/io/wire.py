from __future__ import annotations

from typing import TYPE_CHECKING, TypeAlias

from msgspec import Struct
from packaging.version import InvalidVersion, Version

from ..errors import FlexlabParseError
from ..model import ConfigCurve, Configuration, CurveSample, FlexField, Framework, SurfaceGrid

if TYPE_CHECKING:
    import numpy as np
    from numpy.typing import NDArray

__all__ = (
    "SCHEMA_VERSION",
    "CurveFile",
    "CurveSampleFile",
    "FlexFieldFile",
    "FrameworkFile",
    "GridFile",
    "Vector",
    "vectors_out",
)

SCHEMA_VERSION = "1.0"
_SUPPORTED = Version(SCHEMA_VERSION)

Vector: TypeAlias = tuple[float, float, float]


def vectors_out(array: NDArray[np.float64]) -> list[Vector]:
    return [(float(x), float(y), float(z)) for x, y, z in array.reshape(-1, 3)]


class WireFile(Struct, kw_only=True, forbid_unknown_fields=True, omit_defaults=True):
    schema_version: str = SCHEMA_VERSION

    def check_version(self) -> None:
        try:
            version = Version(self.schema_version)
        except InvalidVersion:
            raise FlexlabParseError(
                f"schema_version {self.schema_version!r} is not a version number"
            ) from None
        if version.major != _SUPPORTED.major:
            raise FlexlabParseError(
                f"schema_version {version} is not supported (expected {_SUPPORTED.major}.x)"
            )


class FrameworkFile(WireFile):
    """A configuration, optionally with a first-order field attached as ``flex``."""

    vertices: list[Vector]
    edges: list[tuple[int, int]] = []
    flex: list[Vector] | None = None
    name: str | None = None

    def to_configuration(self) -> Configuration:
        self.check_version()
        framework = Framework.from_edges(len(self.vertices), self.edges)
        return Configuration.create(framework, self.vertices)

    def to_flex(self) -> FlexField | None:
        return None if self.flex is None else FlexField.create(self.flex)

    @classmethod
    def from_configuration(
        cls, configuration: Configuration, flex: FlexField | None = None, *, name: str | None = None
    ) -> FrameworkFile:
        return cls(
            vertices=vectors_out(configuration.positions),
            edges=[(i, j) for i, j in configuration.framework.edges],
            flex=None if flex is None else vectors_out(flex.vectors),
            name=name,
        )


class FlexFieldFile(WireFile):
    vectors: list[Vector]

    def to_flex(self) -> FlexField:
        self.check_version()
        return FlexField.create(self.vectors)


class CurveSampleFile(Struct, forbid_unknown_fields=True):
    r: float
    positions: list[Vector]
    flex: list[Vector]


class CurveFile(WireFile):
    edges: list[tuple[int, int]]
    samples: list[CurveSampleFile]
    step: float | None = None
    name: str | None = None

    def to_curve(self) -> ConfigCurve:
        self.check_version()
        if not self.samples:
            return ConfigCurve(())
        framework = Framework.from_edges(len(self.samples[0].positions), self.edges)
        return ConfigCurve(
            tuple(
                CurveSample(
                    sample.r,
                    Configuration.create(framework, sample.positions),
                    FlexField.create(sample.flex),
                )
                for sample in self.samples
            ),
            self.step,
        )

    @classmethod
    def from_curve(cls, curve: ConfigCurve, *, name: str | None = None) -> CurveFile:
        return cls(
            edges=[(i, j) for i, j in curve.framework.edges],
            samples=[
                CurveSampleFile(
                    r=sample.r,
                    positions=vectors_out(sample.configuration.positions),
                    flex=vectors_out(sample.flex.vectors),
                )
                for sample in curve.samples
            ],
            step=curve.step,
            name=name,
        )


class GridFile(WireFile):
    """``positions[i][j]`` is x(u_i, v_j); ``jets[k - 1]`` is the order-k field, same layout."""

    u: list[float]
    v: list[float]
    positions: list[list[Vector]]
    jets: list[list[list[Vector]]] = []
    name: str | None = None

    def to_grid(self) -> SurfaceGrid:
        self.check_version()
        return SurfaceGrid.create(self.u, self.v, self.positions, self.jets)

    @classmethod
    def from_grid(cls, grid: SurfaceGrid, *, name: str | None = None) -> GridFile:
        def rows(array: NDArray[np.float64]) -> list[list[Vector]]:
            return [vectors_out(row) for row in array]

        return cls(
            u=[float(value) for value in grid.u],
            v=[float(value) for value in grid.v],
            positions=rows(grid.positions),
            jets=[rows(field) for field in grid.jets],
            name=name,
        )
