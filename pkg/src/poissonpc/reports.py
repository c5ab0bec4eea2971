"""Result records shared by the analytic checks and the inequality harness."""

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class RatioReport:
    """One inequality instance: ``lhs <= C * rhs`` is expected for a modest ``C``."""

    name: str
    lhs: float
    rhs: float
    params: dict = field(default_factory=dict)
    witness: object = None

    def __post_init__(self):
        if not self.rhs > 0:
            raise ValueError(f"{self.name}: right-hand side must be positive, got {self.rhs}")

    @property
    def ratio(self):
        return self.lhs / self.rhs

    def as_row(self):
        row = {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio,
               "witness": self.witness}
        row.update(self.params)
        return row


@dataclass(frozen=True)
class SweepResult:
    """Reports along a doubling ladder; ``drift_factor`` is the worst step-to-step growth."""

    reports: tuple

    @property
    def ratios(self):
        return [r.ratio for r in self.reports]

    @property
    def max_ratio(self):
        return max(self.ratios)

    @property
    def drift_factor(self):
        rs = self.ratios
        steps = [b / a for a, b in zip(rs, rs[1:]) if a > 0]
        return max(steps) if steps else 1.0

    @property
    def finite(self):
        return all(math.isfinite(r) for r in self.ratios)
