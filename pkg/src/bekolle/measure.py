"""The weighted area measure dA_alpha and Lebesgue exponent bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import CarlesonBox
from .quadrature import sin_power_integral


@dataclass(frozen=True)
class AlphaMeasure:
    """dA_alpha = y^alpha dx dy on the upper half-plane, alpha > -1."""

    alpha: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.alpha) or self.alpha <= -1.0:
            raise ValueError(f"alpha must be a finite real > -1, got {self.alpha}")

    def y_mass(self, y_lo: float, y_hi: float) -> float:
        """Integral of y^alpha dy over [y_lo, y_hi]."""
        if y_lo < 0.0 or y_hi < y_lo:
            raise ValueError(f"invalid vertical range [{y_lo}, {y_hi}]")
        op = 1.0 + self.alpha
        return (y_hi**op - y_lo**op) / op

    def sin_integral(self) -> float:
        """Integral of sin(theta)^alpha over [0, pi] (polar weight of dA_alpha)."""
        return sin_power_integral(self.alpha)


def alpha_area(box: CarlesonBox, mu: AlphaMeasure) -> float:
    """dA_alpha mass of a Carleson box or top half, in closed form.

    Full box over I: |I|^(2+alpha) / (1+alpha).
    Top half:        |I|^(2+alpha) (1 - 2^-(1+alpha)) / (1+alpha).
    """
    return box.interval.length * mu.y_mass(box.y_lo, box.y_hi)


@dataclass(frozen=True)
class Exponents:
    """A Lebesgue exponent p in (1, inf) and its conjugate p' = p/(p-1)."""

    p: float
    p_conj: float = field(init=False)

    def __post_init__(self) -> None:
        if not math.isfinite(self.p) or self.p <= 1.0:
            raise ValueError(f"exponent must satisfy 1 < p < inf, got {self.p}")
        object.__setattr__(self, "p_conj", self.p / (self.p - 1.0))

    @property
    def dual_power(self) -> float:
        """The exponent 1 - p' carried by the dual weight w^(1-p')."""
        return 1.0 - self.p_conj
