from __future__ import annotations

from typing import TYPE_CHECKING

import msgspec
from msgspec import Struct

from ..errors import FlexlabPolicyError

if TYPE_CHECKING:
    from collections.abc import Sequence

__all__ = ("TolerancePolicy",)


class TolerancePolicy(Struct, frozen=True, kw_only=True):
    """Every numeric judgment in flexlab goes through one of these thresholds."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    solve_tol: float = 1e-9
    marginal_gap: float = 100.0
    residual_gate: float = 1e-8
    overlap_min: float = 0.9
    velocity_factor: float = 10.0

    @classmethod
    def default(cls) -> TolerancePolicy:
        return cls()

    @classmethod
    def parse(cls, text: str) -> TolerancePolicy:
        """Build a policy from the ``rel:abs`` form; an empty part keeps its default."""

        rel, sep, abs_ = text.partition(":")
        if not sep:
            raise FlexlabPolicyError(f"tolerance must look like 'rel:abs', got {text!r}")
        changes: dict[str, float] = {}
        for name, raw in (("rel_tol", rel), ("abs_tol", abs_)):
            if not raw.strip():
                continue
            try:
                value = float(raw)
            except ValueError:
                raise FlexlabPolicyError(f"{name} is not a number: {raw!r}") from None
            if not value >= 0:
                raise FlexlabPolicyError(f"{name} must be non-negative, got {value}")
            changes[name] = value
        return msgspec.structs.replace(cls(), **changes)

    def rank_threshold(self, largest_singular_value: float, shape: Sequence[int]) -> float:
        return max(self.rel_tol * largest_singular_value * max(shape, default=0), self.abs_tol)

    def solve_threshold(self, rhs_norm: float) -> float:
        return self.solve_tol * (1.0 + rhs_norm)

    def gate(self, diameter: float) -> float:
        return self.residual_gate * max(diameter, 1.0)

    def velocity_tolerance(self, h: float, diameter: float) -> float:
        return self.velocity_factor * h * h * max(diameter, 1.0)
