from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from msgspec import Struct

from ..errors import FlexlabCurveError

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from .configuration import Configuration, FlexField
    from .framework import Framework

__all__ = ("ConfigCurve", "CurveSample", "NO_BASE_SAMPLE")

NO_BASE_SAMPLE = "no base sample"


class CurveSample(Struct, frozen=True, eq=False):
    r: float
    configuration: Configuration
    flex: FlexField


class ConfigCurve(Struct, frozen=True, eq=False):
    """A sampled family of configurations S(r), each carrying a first-order flex.

    ``step`` is set when the samples lie on a uniform grid r = k * step.
    """

    samples: tuple[CurveSample, ...]
    step: float | None = None

    def __post_init__(self) -> None:
        if not self.samples:
            raise FlexlabCurveError("a curve needs at least one sample", [NO_BASE_SAMPLE])

        framework = self.samples[0].configuration.framework
        for sample in self.samples:
            if sample.configuration.framework != framework:
                raise FlexlabCurveError(f"sample at r = {sample.r} uses a different framework")
            sample.flex.check_size(framework)

        r = self.r_values
        if np.any(np.diff(r) <= 0):
            raise FlexlabCurveError("curve parameters must be strictly increasing")
        if not np.any(r == 0.0):
            raise FlexlabCurveError("curve has no sample at r = 0", [NO_BASE_SAMPLE])

    @property
    def framework(self) -> Framework:
        return self.samples[0].configuration.framework

    @property
    def r_values(self) -> NDArray[np.float64]:
        return np.array([sample.r for sample in self.samples], dtype=float)

    @property
    def base_index(self) -> int:
        return int(np.flatnonzero(self.r_values == 0.0)[0])

    @property
    def base(self) -> CurveSample:
        return self.samples[self.base_index]

    @property
    def diameter(self) -> float:
        return max(sample.configuration.diameter for sample in self.samples)

    def neighbors(self) -> tuple[CurveSample, CurveSample] | None:
        """Nearest samples on either side of r = 0, if both exist."""

        index = self.base_index
        if index == 0 or index == len(self.samples) - 1:
            return None
        return self.samples[index - 1], self.samples[index + 1]

    def symmetric_pairs(self, rtol: float = 1e-9) -> list[tuple[float, CurveSample, CurveSample]]:
        """Pairs (w, S(-w), S(w)) for every w > 0 sampled on both sides, smallest first."""

        by_r = {sample.r: sample for sample in self.samples}
        negatives = [sample for sample in self.samples if sample.r < 0]
        pairs: list[tuple[float, CurveSample, CurveSample]] = []
        for sample in self.samples:
            if sample.r <= 0:
                continue
            mirror = by_r.get(-sample.r)
            if mirror is None:
                mirror = next(
                    (neg for neg in negatives if abs(neg.r + sample.r) <= rtol * sample.r),
                    None,
                )
            if mirror is not None:
                pairs.append((sample.r, mirror, sample))
        return pairs

    def reparametrized(self, alpha: float) -> ConfigCurve:
        """The curve r -> S(alpha * r), flexes scaled by alpha to keep the velocity match."""

        if alpha <= 0:
            raise FlexlabCurveError("reparametrization factor must be positive")
        return ConfigCurve(
            tuple(
                CurveSample(sample.r / alpha, sample.configuration, sample.flex * alpha)
                for sample in self.samples
            ),
            None if self.step is None else self.step / alpha,
        )
