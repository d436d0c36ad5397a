from __future__ import annotations

from typing import TYPE_CHECKING, Literal, TypeAlias

import numpy as np
from msgspec import Struct

from .errors import FlexlabParseError
from .model import ConfigCurve, Configuration, CurveSample, FlexField, Framework, SurfaceGrid

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from numpy.typing import ArrayLike, NDArray

__all__ = (
    "BUILTINS",
    "BUILTIN_PREFIX",
    "Builtin",
    "HINGE_EDGES",
    "analytic_fold_curve",
    "builtin",
    "builtin_names",
    "fold_positions",
    "fold_velocity",
    "hinge",
    "is_builtin",
    "subdivided_tetrahedron",
)

BUILTIN_PREFIX = "builtin:"

Kind: TypeAlias = Literal["framework", "curve", "grid"]
Item: TypeAlias = "Configuration | ConfigCurve | SurfaceGrid"

TETRAHEDRON_EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
HINGE_EDGES = ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3))
CURVE_STEP = 1e-3
FOLD_STEP = 1.25e-3
FOLD_WIDTHS = (1, 2, 4, 8)


def _configuration(positions: ArrayLike, edges: Sequence[tuple[int, int]]) -> Configuration:
    positions = np.asarray(positions, dtype=float)
    return Configuration.create(Framework.from_edges(len(positions), edges), positions)


def tetrahedron() -> Configuration:
    return _configuration([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], TETRAHEDRON_EDGES)


def regular_tetrahedron() -> Configuration:
    return _configuration([(0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)], TETRAHEDRON_EDGES)


def subdivided_tetrahedron(interior: ArrayLike = (1.0, 1.0, 0.0)) -> Configuration:
    """Tetrahedron ABCE with vertex D (index 4) joined to A, B and C inside face ABC."""

    positions = [(0, 0, 0), (3, 0, 0), (0, 3, 0), (1, 1, 3), tuple(interior)]
    return _configuration(positions, (*TETRAHEDRON_EDGES, (0, 4), (1, 4), (2, 4)))


def fold_positions(alpha: float) -> NDArray[np.float64]:
    """Hinge positions with the free wing folded by ``alpha`` about the x-axis."""

    return np.array(
        [(0, 0, 0), (2, 0, 0), (1, 2, 0), (1, -2 * np.sin(alpha), 2 * np.cos(alpha))],
        dtype=float,
    )


def fold_velocity(alpha: float) -> NDArray[np.float64]:
    """d/d(alpha) of ``fold_positions``."""

    velocity = np.zeros((4, 3))
    velocity[3] = (0.0, -2 * np.cos(alpha), -2 * np.sin(alpha))
    return velocity


def hinge(alpha: float = 0.0) -> Configuration:
    """Two triangles sharing the bar 0-1; the only nontrivial flex is the fold."""

    return _configuration(fold_positions(alpha), HINGE_EDGES)


def segment() -> Configuration:
    return _configuration([(0, 0, 0), (1, 0, 0)], [(0, 1)])


def single_vertex() -> Configuration:
    return _configuration([(0, 0, 0)], [])


def analytic_fold_curve(
    r_values: Sequence[float], coefficients: Sequence[float] = (1.0,)
) -> ConfigCurve:
    """Hinge folded by alpha(r) = sum_k c_k r^k (k from 1), with xi(r) = x'(r) / 2."""

    polynomial = np.polynomial.Polynomial([0.0, *coefficients])
    derivative = polynomial.deriv()
    framework = hinge().framework
    samples = tuple(
        CurveSample(
            float(r),
            Configuration.create(framework, fold_positions(polynomial(r))),
            FlexField.create(0.5 * derivative(r) * fold_velocity(polynomial(r))),
        )
        for r in sorted(r_values)
    )
    return ConfigCurve(samples)


def _symmetric(widths: Sequence[float]) -> list[float]:
    return sorted({0.0, *widths, *(-w for w in widths)})


def hinge_fold_curve() -> ConfigCurve:
    return analytic_fold_curve(_symmetric([k * FOLD_STEP for k in FOLD_WIDTHS]))


def _uniform_curve(
    base: Configuration,
    motion: Callable[[float], ArrayLike],
    flex: Callable[[float], ArrayLike],
    steps: int = 2,
) -> ConfigCurve:
    samples = tuple(
        CurveSample(
            k * CURVE_STEP,
            base.with_positions(base.positions + np.asarray(motion(k * CURVE_STEP))),
            FlexField.create(flex(k * CURVE_STEP)),
        )
        for k in range(-steps, steps + 1)
    )
    return ConfigCurve(samples, step=CURVE_STEP)


def _at_vertex(n: int, vertex: int, vector: ArrayLike) -> NDArray[np.float64]:
    field = np.zeros((n, 3))
    field[vertex] = vector
    return field


def in_face_curve() -> ConfigCurve:
    """Interior vertex slides inside its face while carrying the perpendicular flex."""

    base = subdivided_tetrahedron()
    return _uniform_curve(
        base,
        lambda r: _at_vertex(5, 4, (2 * r, 0, 0)),
        lambda r: _at_vertex(5, 4, (0, 0, 1)),
    )


def hinge_constant_curve() -> ConfigCurve:
    base = hinge()
    return _uniform_curve(base, lambda r: np.zeros((4, 3)), lambda r: np.zeros((4, 3)))


def hinge_translation_curve() -> ConfigCurve:
    base = hinge()
    tau = np.array([0.6, -0.3, 0.2])
    return _uniform_curve(base, lambda r: np.tile(2 * r * tau, (4, 1)), lambda r: np.tile(tau, (4, 1)))


def _square(n: int = 21, lo: float = -1.0, hi: float = 1.0) -> NDArray[np.float64]:
    return np.linspace(lo, hi, n)


def _plane(u: NDArray[np.float64], v: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.stack([u, v, np.zeros_like(u)], axis=-1)


def _vector_field(
    x: Callable[[NDArray[np.float64], NDArray[np.float64]], ArrayLike],
    y: Callable[[NDArray[np.float64], NDArray[np.float64]], ArrayLike] | None = None,
    z: Callable[[NDArray[np.float64], NDArray[np.float64]], ArrayLike] | None = None,
) -> Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]]:
    def field(u: NDArray[np.float64], v: NDArray[np.float64]) -> NDArray[np.float64]:
        parts = [
            np.broadcast_to(np.asarray(f(u, v), dtype=float), u.shape) if f else np.zeros_like(u)
            for f in (x, y, z)
        ]
        return np.stack(parts, axis=-1)

    return field


def plane_tilt_jet() -> SurfaceGrid:
    return SurfaceGrid.sample(
        _square(),
        _square(),
        _plane,
        [_vector_field(lambda u, v: 0, z=lambda u, v: u), _vector_field(lambda u, v: -u)],
    )


def plane_normal_bump() -> SurfaceGrid:
    return SurfaceGrid.sample(
        _square(),
        _square(),
        _plane,
        [_vector_field(lambda u, v: 0, z=lambda u, v: u * u), _vector_field(lambda u, v: 0)],
    )


def plane_inplane_stretch() -> SurfaceGrid:
    return SurfaceGrid.sample(_square(), _square(), _plane, [_vector_field(lambda u, v: u)])


def cylinder(u: NDArray[np.float64], v: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.stack([np.cos(u), np.sin(u), v], axis=-1)


KILLING_ROTATION = np.array([0.3, -0.2, 0.5])
KILLING_TRANSLATION = np.array([0.1, 0.2, 0.3])


def killing_field(
    surface: Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]],
) -> Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]]:
    def field(u: NDArray[np.float64], v: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.cross(KILLING_ROTATION, surface(u, v)) + KILLING_TRANSLATION

    return field


def cylinder_killing(n: int = 21) -> SurfaceGrid:
    return SurfaceGrid.sample(
        np.linspace(0.0, np.pi, n), _square(n), cylinder, [killing_field(cylinder)]
    )


def degenerate_grid() -> SurfaceGrid:
    return SurfaceGrid.sample(
        np.linspace(0, 1, 5),
        np.linspace(0, 1, 5),
        lambda u, v: np.stack([u, u, np.zeros_like(u)], axis=-1),
        [_vector_field(lambda u, v: 0, z=lambda u, v: 1)],
    )


class Builtin(Struct, frozen=True):
    kind: Kind
    factory: Callable[[], Item]
    description: str = ""

    def load(self) -> Item:
        return self.factory()


BUILTINS: dict[str, Builtin] = {
    "tetrahedron": Builtin("framework", tetrahedron, "first-order rigid tetrahedron"),
    "regular-tetrahedron": Builtin("framework", regular_tetrahedron, "regular tetrahedron"),
    "subdivided-tetrahedron": Builtin(
        "framework", subdivided_tetrahedron, "tetrahedron with a face subdivided by a coplanar vertex"
    ),
    "hinge": Builtin("framework", hinge, "two triangles sharing a bar"),
    "segment": Builtin("framework", segment, "a single bar"),
    "single-vertex": Builtin("framework", single_vertex, "one vertex, no bars"),
    "hinge-fold-curve": Builtin("curve", hinge_fold_curve, "analytic hinge fold"),
    "fig1-green-curve": Builtin(
        "curve", in_face_curve, "in-face motion of the subdivided tetrahedron, perpendicular flexes"
    ),
    "hinge-constant-curve": Builtin("curve", hinge_constant_curve, "constant hinge, zero flexes"),
    "hinge-translation-curve": Builtin(
        "curve", hinge_translation_curve, "translated hinge carrying the translation"
    ),
    "plane-tilt-jet": Builtin("grid", plane_tilt_jet, "plane with its second-order tilt"),
    "plane-normal-bump": Builtin("grid", plane_normal_bump, "plane with a normal bump flex"),
    "plane-inplane-stretch": Builtin("grid", plane_inplane_stretch, "plane with a stretch"),
    "cylinder-killing": Builtin("grid", cylinder_killing, "cylinder with a Killing field"),
    "degenerate-grid": Builtin("grid", degenerate_grid, "non-immersed grid"),
}


def builtin_names(kind: Kind | None = None) -> list[str]:
    return sorted(name for name, item in BUILTINS.items() if kind is None or item.kind == kind)


def is_builtin(source: str) -> bool:
    return source.startswith(BUILTIN_PREFIX)


def builtin(source: str) -> tuple[Kind, Item]:
    name = source.removeprefix(BUILTIN_PREFIX)
    try:
        entry = BUILTINS[name]
    except KeyError:
        raise FlexlabParseError(
            f"unknown builtin {name!r}; available: {', '.join(builtin_names())}"
        ) from None
    return entry.kind, entry.load()
