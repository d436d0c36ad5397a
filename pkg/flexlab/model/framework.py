from __future__ import annotations

from typing import TYPE_CHECKING, TypeAlias

from msgspec import Struct

from ..errors import FlexlabValidationError
from ..utils import Enum

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

__all__ = (
    "Edge",
    "Framework",
    "Violation",
    "ViolationKind",
    "canonical_edges",
    "require_valid",
    "validate_framework",
)

Edge: TypeAlias = tuple[int, int]


class ViolationKind(Enum):
    vertex_count = "vertex-count"
    self_loop = "self-loop"
    duplicate_edge = "duplicate-edge"
    bad_index = "bad-index"


class Violation(Struct, frozen=True):
    kind: ViolationKind
    message: str
    edge: Edge | None = None

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


def canonical_edges(edges: Iterable[Sequence[int]]) -> tuple[Edge, ...]:
    pairs: list[Edge] = []
    for edge in edges:
        i, j = (int(index) for index in edge)
        pairs.append((i, j) if i <= j else (j, i))
    return tuple(sorted(pairs))


class Framework(Struct, frozen=True):
    """Combinatorics of a bar-joint framework.

    Edges are stored in canonical order (pairs ascending, then lexicographic), so two
    frameworks with the same bars compare equal. Use ``Framework.from_edges`` to build
    one from an arbitrary edge listing.
    """

    vertex_count: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        if self.edges != canonical_edges(self.edges):
            raise FlexlabValidationError(
                "edge list is not canonical; build frameworks with Framework.from_edges"
            )

    @classmethod
    def from_edges(
        cls, vertex_count: int, edges: Iterable[Sequence[int]] = ()
    ) -> Framework:
        return cls(int(vertex_count), canonical_edges(edges))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_index(self, edge: Sequence[int]) -> int:
        i, j = sorted(int(index) for index in edge)
        try:
            return self.edges.index((i, j))
        except ValueError:
            raise FlexlabValidationError(f"edge {(i, j)} is not a bar of this framework") from None


def validate_framework(framework: Framework) -> list[Violation]:
    violations: list[Violation] = []
    if framework.vertex_count <= 0:
        violations.append(
            Violation(
                ViolationKind.vertex_count,
                f"vertex count must be positive, got {framework.vertex_count}",
            )
        )

    seen: set[Edge] = set()
    for edge in framework.edges:
        i, j = edge
        if i == j:
            violations.append(
                Violation(ViolationKind.self_loop, f"edge {edge} joins vertex {i} to itself", edge)
            )
        if i < 0 or j >= framework.vertex_count:
            violations.append(
                Violation(
                    ViolationKind.bad_index,
                    f"edge {edge} references a vertex outside 0..{framework.vertex_count - 1}",
                    edge,
                )
            )
        if edge in seen:
            violations.append(
                Violation(ViolationKind.duplicate_edge, f"edge {edge} is listed twice", edge)
            )
        seen.add(edge)

    return violations


def require_valid(framework: Framework) -> None:
    violations = validate_framework(framework)
    if violations:
        raise FlexlabValidationError(
            f"framework has {len(violations)} violation(s)",
            [str(violation) for violation in violations],
        )
