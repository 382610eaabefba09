"""Single tolerance policy used for every rank and residual decision.

Numerical rank is decided against singular values: anything at or below
``max(abs_floor, rel_rank_threshold * sigma_max)`` counts as zero.  The
same pair of knobs drives residual tests (distance-to-flat, on-surface
checks) through :meth:`Tolerance.residual_cut` with a caller-supplied
scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerance:
    rel_rank_threshold: float = 1e-9
    abs_floor: float = 1e-12

    def __post_init__(self):
        if not (math.isfinite(self.rel_rank_threshold) and math.isfinite(self.abs_floor)):
            raise ValueError("tolerance thresholds must be finite")
        if self.rel_rank_threshold < 0 or self.abs_floor < 0:
            raise ValueError("tolerance thresholds must be nonnegative")
        if self.rel_rank_threshold >= 1:
            raise ValueError("rel_rank_threshold must be < 1")

    def rank_cut(self, sigma_max: float) -> float:
        """Threshold below which a singular value is treated as zero."""
        return max(self.abs_floor, self.rel_rank_threshold * sigma_max)

    def residual_cut(self, scale: float = 1.0) -> float:
        """Threshold below which a residual of the given scale is zero."""
        return max(self.abs_floor, self.rel_rank_threshold * scale)

    def scaled(self, factor: float) -> "Tolerance":
        """A copy with rel_rank_threshold multiplied by ``factor``."""
        return Tolerance(rel_rank_threshold=self.rel_rank_threshold * factor,
                         abs_floor=self.abs_floor)


DEFAULT_TOLERANCE = Tolerance()


def decided_rank(singular_values: np.ndarray, tol: Tolerance) -> int:
    """Number of singular values above the rank threshold."""
    s = np.asarray(singular_values)
    if s.size == 0:
        return 0
    return int(np.sum(s > tol.rank_cut(float(s[0]))))
