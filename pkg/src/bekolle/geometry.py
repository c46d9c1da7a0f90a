"""Dyadic geometry on the upper half-plane.

Two shifted dyadic grids are used throughout: the standard grid (shift
tag 0) and the one-third-shifted grid (shift tag 1/3).  An interval of
the grid with tag ``beta`` at scale ``j`` and position ``m`` realizes to

    [ 2^j (m + (-1)^j beta),  2^j (m + 1 + (-1)^j beta) ).

The sign flip of the shift from one scale to the next is what makes the
two grids jointly "complete": every bounded interval of the line is
contained in a grid interval at most eight times longer (see
:func:`covering_interval`).

The combinatorial triple ``(beta, j, m)`` is the primary representation.
Float endpoints are derived from it on demand, so neighbouring intervals
at one scale share bit-identical endpoints; exact endpoints are also
available as rationals for tests and tiling arguments.

Each interval ``I`` carries a Carleson box ``Q_I = I x [0, |I|]`` and a
top half ``T_I = I x (|I|/2, |I|]``.  The top halves of one grid tile
the half-plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

BETA_ZERO = 0.0
BETA_THIRD = 1.0 / 3.0
BETAS = (BETA_ZERO, BETA_THIRD)

# Scales beyond this leave the comfortably representable float range.
MAX_SCALE = 1000


def shift_numerator(beta: float) -> int:
    """Return 3*beta as an exact integer (0 or 1), validating beta."""
    c = round(3.0 * beta)
    if c not in (0, 1) or abs(3.0 * beta - c) > 1e-12:
        raise ValueError(f"shift must be 0 or 1/3, got {beta!r}")
    return c


def scale_sign(j: int) -> int:
    """(-1)^j, the per-scale orientation of the one-third shift."""
    return 1 if j % 2 == 0 else -1


@dataclass(frozen=True)
class Point:
    """A point x + iy of the open upper half-plane (y > 0)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")
        if self.y <= 0.0:
            raise ValueError(f"point must lie in the open upper half-plane, got y={self.y}")


@dataclass(frozen=True)
class Interval:
    """A bounded half-open interval [left, left + length) with length > 0."""

    left: float
    length: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.left) and math.isfinite(self.length)):
            raise ValueError("interval endpoints must be finite")
        if self.length <= 0.0:
            raise ValueError(f"interval length must be positive, got {self.length}")

    @property
    def right(self) -> float:
        return self.left + self.length

    @property
    def center(self) -> float:
        return self.left + 0.5 * self.length

    def contains_point(self, x: float) -> bool:
        return self.left <= x < self.right

    def contains_interval(self, other: "Interval") -> bool:
        return self.left <= other.left and other.right <= self.right


@dataclass(frozen=True)
class DyadicInterval:
    """Grid interval (beta, j, m); see the module docstring for its realization."""

    beta: float
    j: int
    m: int

    def __post_init__(self) -> None:
        shift_numerator(self.beta)  # validates
        if abs(self.j) > MAX_SCALE:
            raise ValueError(f"scale {self.j} outside representable range")

    @property
    def length(self) -> float:
        return math.ldexp(1.0, self.j)

    def endpoint(self, k: int) -> float:
        """Realized float endpoint 2^j (k + (-1)^j beta); k = m gives the left end."""
        s = scale_sign(self.j)
        return math.ldexp(k + s * self.beta, self.j)

    def realize(self) -> Interval:
        return Interval(self.endpoint(self.m), self.length)

    def endpoint_exact(self, k: int) -> Fraction:
        s = scale_sign(self.j)
        c = shift_numerator(self.beta)
        return Fraction(3 * k + s * c, 3) * Fraction(2) ** self.j

    def realize_exact(self) -> tuple[Fraction, Fraction]:
        """Exact (left, length) as rationals."""
        return self.endpoint_exact(self.m), Fraction(2) ** self.j

    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        """The two scale-(j-1) grid intervals that partition this one.

        The left child position is 2m + 3*(-1)^j*beta, an integer because
        3*beta is one.
        """
        c = shift_numerator(self.beta)
        m0 = 2 * self.m + scale_sign(self.j) * c
        return (
            DyadicInterval(self.beta, self.j - 1, m0),
            DyadicInterval(self.beta, self.j - 1, m0 + 1),
        )

    def parent(self) -> "DyadicInterval":
        c = shift_numerator(self.beta)
        return DyadicInterval(self.beta, self.j + 1, (self.m - scale_sign(self.j + 1) * c) // 2)

    def contains(self, other: "DyadicInterval") -> bool:
        """Same-grid containment, decided combinatorially (no floats)."""
        if shift_numerator(self.beta) != shift_numerator(other.beta):
            raise ValueError("containment is only defined within one grid")
        if other.j > self.j:
            return False
        d = other
        while d.j < self.j:
            d = d.parent()
        return d.m == self.m


@dataclass(frozen=True)
class GridWindow:
    """Scale band [j_min, j_max] and horizontal range [x_lo, x_hi) of a truncated grid."""

    j_min: int
    j_max: int
    x_lo: float
    x_hi: float

    def __post_init__(self) -> None:
        if self.j_min > self.j_max:
            raise ValueError(f"empty scale band: j_min={self.j_min} > j_max={self.j_max}")
        if abs(self.j_min) > MAX_SCALE or abs(self.j_max) > MAX_SCALE:
            raise ValueError("scale band outside representable range")
        if not (math.isfinite(self.x_lo) and math.isfinite(self.x_hi)) or self.x_lo >= self.x_hi:
            raise ValueError(f"invalid horizontal range [{self.x_lo}, {self.x_hi})")

    @property
    def width(self) -> float:
        return self.x_hi - self.x_lo

    @property
    def y_floor(self) -> float:
        """Bottom of the tiled region: tiles in the band have y > 2^(j_min - 1)."""
        return math.ldexp(1.0, self.j_min - 1)

    @property
    def y_ceil(self) -> float:
        return math.ldexp(1.0, self.j_max)


FULL_BOX = "full_box"
TOP_HALF = "top_half"


@dataclass(frozen=True)
class CarlesonBox:
    """Box over an interval: Q_I = I x [0, |I|] or its top half I x (|I|/2, |I|]."""

    interval: Interval
    kind: str = FULL_BOX

    def __post_init__(self) -> None:
        if self.kind not in (FULL_BOX, TOP_HALF):
            raise ValueError(f"unknown box kind {self.kind!r}")

    @property
    def y_lo(self) -> float:
        return 0.0 if self.kind == FULL_BOX else 0.5 * self.interval.length

    @property
    def y_hi(self) -> float:
        return self.interval.length


def full_box(i: Interval) -> CarlesonBox:
    return CarlesonBox(i, FULL_BOX)


def top_half(i: Interval) -> CarlesonBox:
    return CarlesonBox(i, TOP_HALF)


def tile_scale_of_height(y: float) -> int:
    """The unique j with 2^(j-1) < y <= 2^j, from the float exponent field.

    math.frexp(y) = (fr, e) with fr in [1/2, 1); y equals 2^(e-1) exactly
    when fr == 1/2, in which case the tile scale is e - 1, otherwise e.
    No transcendental log is involved, so ties are bit-exact.
    """
    if not math.isfinite(y) or y <= 0.0:
        raise ValueError(f"height must be a positive finite float, got {y}")
    fr, e = math.frexp(y)
    j = e - 1 if fr == 0.5 else e
    if abs(j) > MAX_SCALE:
        raise ValueError(f"height {y} requires scale {j} outside representable range")
    return j


def position_of(beta: float, j: int, x: float) -> int:
    """Position m of the scale-j grid interval whose realization contains x."""
    s = scale_sign(j)
    return math.floor(math.ldexp(x, -j) - s * beta)


def locate_tile(beta: float, z: Point) -> DyadicInterval:
    """The unique grid interval I with z in its top half T_I = I x (|I|/2, |I|]."""
    j = tile_scale_of_height(z.y)
    d = DyadicInterval(beta, j, position_of(beta, j, z.x))
    # Defend against boundary rounding in position_of; at most one step off.
    if z.x < d.endpoint(d.m):
        d = DyadicInterval(beta, j, d.m - 1)
    elif z.x >= d.endpoint(d.m + 1):
        d = DyadicInterval(beta, j, d.m + 1)
    return d


def scale_index(z: Point, xi: Point) -> int:
    """The integer l with 2^(2l) <= d^2 < 2^(2l+2), where d^2 = (x_z - x_xi)^2 + (y_z + y_xi)^2.

    d is the modulus |z - conj(xi)|; l is read off the float exponent of
    d^2 (frexp), never from a transcendental log, so the dyadic tie
    d = 2^k is classified exactly.
    """
    d2 = (z.x - xi.x) ** 2 + (z.y + xi.y) ** 2
    if not math.isfinite(d2) or d2 <= 0.0:
        raise ValueError(f"degenerate pair separation d^2={d2}")
    _, e2 = math.frexp(d2)
    # d^2 in [2^(e2-1), 2^e2) implies floor(log2 d) == (e2 - 1) // 2.
    return (e2 - 1) // 2


def common_box_interval(z: Point, xi: Point) -> Interval:
    """An interval I with both z and xi in Q_I and |I| = 2^(l+1), l = scale_index.

    Centered at the midpoint of the two x-coordinates.  Both points lie in
    Q_I because max(y_z, y_xi) <= y_z + y_xi <= d < 2^(l+1) and the
    x-offsets from the center are at most d/2 < 2^l.
    """
    l = scale_index(z, xi)
    length = math.ldexp(1.0, l + 1)
    mid = 0.5 * (z.x + xi.x)
    return Interval(mid - math.ldexp(1.0, l), length)


def covering_interval(i: Interval) -> tuple[float, DyadicInterval]:
    """Smallest grid interval (over both shifts) containing ``i``, with |K| <= 8|I|.

    Scans scales upward from the first dyadic length >= |I|; at each scale
    the standard grid is tried before the one-third grid, so ties prefer
    shift 0.  The three-scale headroom always suffices: one of the two
    grids has, three scales above the length of I, an interval whose
    middle half contains I.
    """
    fr, e = math.frexp(i.length)
    j0 = e - 1 if fr == 0.5 else e
    limit = 8.0 * i.length
    for j in range(j0, j0 + 4):
        if abs(j) > MAX_SCALE:
            raise ValueError(f"covering scale {j} outside representable range")
        if math.ldexp(1.0, j) > limit:
            break
        for beta in BETAS:
            d = DyadicInterval(beta, j, position_of(beta, j, i.left))
            k = d.realize()
            if k.left <= i.left and i.right <= k.right:
                return beta, d
    raise AssertionError(f"no covering interval found for {i} (violates the covering lemma)")


def grid_intervals_at_scale(beta: float, j: int, x_lo: float, x_hi: float) -> list[DyadicInterval]:
    """All scale-j grid intervals whose realization meets [x_lo, x_hi)."""
    if x_lo >= x_hi:
        raise ValueError("empty horizontal range")
    s = scale_sign(j)
    m_lo = position_of(beta, j, x_lo)
    # Largest m with left endpoint < x_hi.
    m_hi = math.ceil(math.ldexp(x_hi, -j) - s * beta) - 1
    if m_hi < m_lo:
        m_hi = m_lo
    return [DyadicInterval(beta, j, m) for m in range(m_lo, m_hi + 1)]


def grid_intervals(beta: float, window: GridWindow) -> list[DyadicInterval]:
    """All grid intervals of the window, coarsest scale first."""
    out: list[DyadicInterval] = []
    for j in range(window.j_max, window.j_min - 1, -1):
        out.extend(grid_intervals_at_scale(beta, j, window.x_lo, window.x_hi))
    return out
