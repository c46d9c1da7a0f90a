"""Piecewise-constant functions on a truncated dyadic tile decomposition.

A grid layout fixes a shift, a scale band [j_min, j_max], and a horizontal
range.  The tiles are the top halves of the grid's Carleson boxes: the tile
of the interval I = [l, l+2^j) is I x (2^(j-1), 2^j].  Over the scale band
these tiles partition the strip  {x in range, 2^(j_min-1) < y <= 2^j_max}
exactly once per grid, which makes per-tile-constant functions a faithful
discrete model: box sums, averages, and maximal functions over the grid's
own Carleson boxes are computed exactly, in linear time, by one upward and
one downward sweep over the scales.

Cross-grid quantities (sums over the *other* shift's boxes) are exact too:
a box of one grid meets at most two equal-length tiles of the other at each
scale, and the partial horizontal overlaps are plain float subtractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .geometry import (
    BETAS,
    DyadicInterval,
    GridWindow,
    scale_sign,
    shift_numerator,
)
from .measure import AlphaMeasure

__all__ = [
    "GridLayout",
    "TileFunction",
    "same_grid_box_sums",
    "cross_grid_box_sums",
    "two_grid_box_sums",
    "box_overlap_sum",
    "ancestor_running_max",
    "ancestor_accumulate",
    "load_tile_file",
    "save_tile_file",
]


def _gather(arr: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """arr[idx] with out-of-range indices contributing 0."""
    ok = (idx >= 0) & (idx < arr.shape[0])
    out = np.zeros(idx.shape, dtype=float)
    if ok.any():
        out[ok] = arr[idx[ok]]
    return out


class GridLayout:
    """Enumeration of one shifted grid's intervals over a window.

    At each scale j in [j_min, j_max] the layout stores the position m_lo(j)
    of the leftmost interval meeting the horizontal range and the count of
    intervals; an interval (j, m) maps to the dense index m - m_lo(j).
    """

    def __init__(self, beta: float, window: GridWindow, pad: int = 0) -> None:
        shift_numerator(beta)  # validate
        self.beta = beta
        self.window = window
        self.pad = pad
        self._m_lo: dict[int, int] = {}
        self._count: dict[int, int] = {}
        third = Fraction(shift_numerator(beta), 3)
        lo = Fraction(window.x_lo)
        hi = Fraction(window.x_hi)
        for j in range(window.j_min, window.j_max + 1):
            shift = scale_sign(j) * third
            step = Fraction(2) ** j
            m_lo = math.floor(lo / step - shift) - pad
            m_hi = math.ceil(hi / step - shift) - 1 + pad
            self._m_lo[j] = m_lo
            self._count[j] = max(m_hi - m_lo + 1, 0)

    # -- enumeration ----------------------------------------------------

    def scales(self) -> range:
        return range(self.window.j_min, self.window.j_max + 1)

    def count(self, j: int) -> int:
        return self._count[j]

    def m_lo(self, j: int) -> int:
        return self._m_lo[j]

    @property
    def size(self) -> int:
        return sum(self._count.values())

    def index(self, j: int, m: int) -> int:
        """Dense within-scale index of interval (j, m), or -1 if outside."""
        if j not in self._count:
            return -1
        i = m - self._m_lo[j]
        return i if 0 <= i < self._count[j] else -1

    def interval(self, j: int, i: int) -> DyadicInterval:
        return DyadicInterval(self.beta, j, self._m_lo[j] + i)

    def intervals(self) -> Iterator[DyadicInterval]:
        for j in self.scales():
            for i in range(self._count[j]):
                yield self.interval(j, i)

    # -- geometry arrays -------------------------------------------------

    def left_edges(self, j: int) -> np.ndarray:
        """Left endpoints of the scale-j intervals, in index order."""
        s3 = scale_sign(j) * shift_numerator(beta=self.beta)
        m = self._m_lo[j] + np.arange(self._count[j])
        return np.ldexp(m + s3 / 3.0, j)

    def tile_y_range(self, j: int) -> tuple[float, float]:
        """Vertical extent (2^(j-1), 2^j] shared by every scale-j tile."""
        return math.ldexp(1.0, j - 1), math.ldexp(1.0, j)

    def tile_area(self, j: int, mu: AlphaMeasure) -> float:
        """dA_alpha mass of one scale-j tile (equal across the scale)."""
        y_lo, y_hi = self.tile_y_range(j)
        return math.ldexp(1.0, j) * mu.y_mass(y_lo, y_hi)

    def child_indices(self, j: int) -> np.ndarray:
        """For scale j > j_min: dense index of each interval's left child.

        The right child sits at the returned index + 1; either may be -1
        padding when the child falls outside the enumerated range.
        """
        if j <= self.window.j_min:
            raise ValueError("no child scale below j_min")
        c = shift_numerator(self.beta)
        m = self._m_lo[j] + np.arange(self._count[j])
        child_m = 2 * m + scale_sign(j) * c
        return child_m - self._m_lo[j - 1]

    def parent_indices(self, j: int) -> np.ndarray:
        """For scale j < j_max: dense index of each interval's parent."""
        if j >= self.window.j_max:
            raise ValueError("no parent scale above j_max")
        c = shift_numerator(self.beta)
        m = self._m_lo[j] + np.arange(self._count[j])
        parent_m = (m - scale_sign(j + 1) * c) // 2
        return parent_m - self._m_lo[j + 1]

    def padded(self, pad: int = 3) -> "GridLayout":
        """The same enumeration widened by `pad` extra intervals per side
        at every scale.

        Used when this grid's boxes must account for tiles of the other
        grid in full: a tile meeting the window extends less than its own
        length beyond it, so two extra same-length intervals per side catch
        every straddling box, and the overlap recursion stays exact (a
        dropped child is then guaranteed to meet no tile).
        """
        return GridLayout(self.beta, self.window, pad=max(self.pad, pad))


@dataclass
class TileFunction:
    """A function constant on each tile of a grid layout.

    values[j] is the float array over the scale-j tiles in index order.
    """

    layout: GridLayout
    values: dict[int, np.ndarray]

    # -- constructors ----------------------------------------------------

    @classmethod
    def zeros(cls, layout: GridLayout) -> "TileFunction":
        return cls(layout, {j: np.zeros(layout.count(j)) for j in layout.scales()})

    @classmethod
    def full(cls, layout: GridLayout, value: float) -> "TileFunction":
        return cls(
            layout,
            {j: np.full(layout.count(j), float(value)) for j in layout.scales()},
        )

    @classmethod
    def sample(
        cls, layout: GridLayout, fn: Callable[[np.ndarray, float], np.ndarray]
    ) -> "TileFunction":
        """Evaluate fn(x_centers, y_center) at tile centers, scale by scale.

        The representative point of a scale-j tile is its center
        (x_mid, 3 * 2^(j-1) / 2): mid-range in both coordinates.
        """
        values = {}
        for j in layout.scales():
            x = layout.left_edges(j) + math.ldexp(1.0, j - 1)
            y = 3.0 * math.ldexp(1.0, j - 2)
            values[j] = np.asarray(fn(x, y), dtype=float).reshape(x.shape).copy()
        return cls(layout, values)

    @classmethod
    def box_indicator(cls, layout: GridLayout, top: DyadicInterval) -> "TileFunction":
        """Indicator of the Carleson box over `top`, exact on this layout.

        `top` must belong to the same grid; the tiles inside its box are the
        tiles of its descendants (and of `top` itself) within the band.
        """
        if top.beta != layout.beta:
            raise ValueError("indicator interval must come from the layout's grid")
        out = cls.zeros(layout)
        j_hi = min(top.j, layout.window.j_max)
        for j in range(layout.window.j_min, j_hi + 1):
            # descendants of `top` at scale j occupy a contiguous run of m.
            lo = top
            hi = top
            while lo.j > j:
                lo = lo.children()[0]
                hi = hi.children()[1]
            i0 = lo.m - layout.m_lo(j)
            i1 = hi.m - layout.m_lo(j)
            a = max(i0, 0)
            b = min(i1, layout.count(j) - 1)
            if a <= b:
                out.values[j][a : b + 1] = 1.0
        return out

    # -- algebra ----------------------------------------------------------

    def _check(self, other: "TileFunction") -> None:
        if other.layout is not self.layout and (
            other.layout.beta != self.layout.beta
            or other.layout.window != self.layout.window
        ):
            raise ValueError("tile functions live on different layouts")

    def copy(self) -> "TileFunction":
        return TileFunction(self.layout, {j: v.copy() for j, v in self.values.items()})

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "TileFunction":
        return TileFunction(
            self.layout, {j: np.asarray(fn(v), dtype=float) for j, v in self.values.items()}
        )

    def __add__(self, other: "TileFunction") -> "TileFunction":
        self._check(other)
        return TileFunction(
            self.layout, {j: self.values[j] + other.values[j] for j in self.values}
        )

    def __sub__(self, other: "TileFunction") -> "TileFunction":
        self._check(other)
        return TileFunction(
            self.layout, {j: self.values[j] - other.values[j] for j in self.values}
        )

    def __mul__(self, other: "TileFunction | float") -> "TileFunction":
        if isinstance(other, TileFunction):
            self._check(other)
            return TileFunction(
                self.layout, {j: self.values[j] * other.values[j] for j in self.values}
            )
        return self.map(lambda v: v * float(other))

    __rmul__ = __mul__

    def __truediv__(self, other: "TileFunction | float") -> "TileFunction":
        if isinstance(other, TileFunction):
            self._check(other)
            return TileFunction(
                self.layout, {j: self.values[j] / other.values[j] for j in self.values}
            )
        return self.map(lambda v: v / float(other))

    def __pow__(self, exponent: float) -> "TileFunction":
        return self.map(lambda v: v ** float(exponent))

    def maximum(self, other: "TileFunction") -> "TileFunction":
        self._check(other)
        return TileFunction(
            self.layout,
            {j: np.maximum(self.values[j], other.values[j]) for j in self.values},
        )

    def abs(self) -> "TileFunction":
        return self.map(np.abs)

    # -- reductions -------------------------------------------------------

    def max_value(self) -> float:
        return max(
            (float(v.max()) for v in self.values.values() if v.size), default=0.0
        )

    def min_value(self) -> float:
        return min(
            (float(v.min()) for v in self.values.values() if v.size), default=0.0
        )

    def tile_masses(self, mu: AlphaMeasure) -> dict[int, np.ndarray]:
        """Per-tile integrals value * dA_alpha(tile), scale by scale."""
        return {
            j: self.values[j] * self.layout.tile_area(j, mu) for j in self.values
        }

    def integral(self, mu: AlphaMeasure) -> float:
        """Integral against dA_alpha over the whole tiled strip."""
        return float(sum(m.sum() for m in self.tile_masses(mu).values()))

    def norm_lp(self, p: float, mu: AlphaMeasure, weight: "TileFunction | None" = None) -> float:
        """(integral of |f|^p w dA_alpha)^(1/p) over the tiled strip."""
        g = self.abs() ** p
        if weight is not None:
            g = g * weight
        return g.integral(mu) ** (1.0 / p)


# -- box sums --------------------------------------------------------------


def same_grid_box_sums(masses: dict[int, np.ndarray], layout: GridLayout) -> dict[int, np.ndarray]:
    """Sum of per-tile masses over each enumerated interval's Carleson box.

    One upward sweep: the box over I collects I's own tile plus the boxes of
    its two children.  Children outside the enumerated range contribute 0.
    """
    sums: dict[int, np.ndarray] = {}
    for j in layout.scales():
        total = masses[j].astype(float).copy()
        if j > layout.window.j_min:
            below = sums[j - 1]
            ci = layout.child_indices(j)
            total += _gather(below, ci) + _gather(below, ci + 1)
        sums[j] = total
    return sums


def ancestor_running_max(
    per_box: dict[int, np.ndarray], layout: GridLayout
) -> dict[int, np.ndarray]:
    """Downward sweep: max of per-box values along each ancestor chain."""
    out: dict[int, np.ndarray] = {}
    for j in reversed(list(layout.scales())):
        best = per_box[j].astype(float).copy()
        if j < layout.window.j_max:
            above = out[j + 1]
            best = np.maximum(best, _gather(above, layout.parent_indices(j)))
        out[j] = best
    return out


def ancestor_accumulate(
    per_box: dict[int, np.ndarray], layout: GridLayout
) -> dict[int, np.ndarray]:
    """Downward sweep: sum of per-box values along each ancestor chain."""
    out: dict[int, np.ndarray] = {}
    for j in reversed(list(layout.scales())):
        acc = per_box[j].astype(float).copy()
        if j < layout.window.j_max:
            acc += _gather(out[j + 1], layout.parent_indices(j))
        out[j] = acc
    return out


def _scale_row_sums(
    tf: TileFunction, co: GridLayout, j: int, mu: AlphaMeasure
) -> np.ndarray:
    """For each scale-j interval I' of `co`: sum over tf's scale-j tiles of
    value * |tile cap I'| * (vertical alpha-mass of the scale-j tile band).

    Tiles and co-intervals share the length 2^j, so each I' meets at most
    two tiles and the overlaps are 2^j - frac and frac.
    """
    vals = tf.values[j]
    lay = tf.layout
    length = math.ldexp(1.0, j)
    y_lo, y_hi = lay.tile_y_range(j)
    ymass = mu.y_mass(y_lo, y_hi)
    left = co.left_edges(j)
    if left.size == 0:
        return np.zeros(0)
    # tf-grid position of each co-left-edge
    s3 = scale_sign(j) * shift_numerator(lay.beta)
    pos = np.floor(np.ldexp(left, -j) - s3 / 3.0).astype(int)
    tile_left = np.ldexp(pos + s3 / 3.0, j)
    frac = np.clip(left - tile_left, 0.0, length)
    idx = pos - lay.m_lo(j)
    v0 = _gather(vals, idx)
    v1 = _gather(vals, idx + 1)
    return (v0 * (length - frac) + v1 * frac) * ymass


def cross_grid_box_sums(
    tf: TileFunction, co: GridLayout, mu: AlphaMeasure
) -> dict[int, np.ndarray]:
    """Integral of tf dA_alpha over each Carleson box of the *other* grid.

    Recursion over `co`: the box over I' collects its two children's boxes
    plus the scale-j(I') row of tile overlaps.  Exact whenever `co` is
    padded widely enough that every child meeting tf's tiles is enumerated
    (see GridLayout.padded).
    """
    if co.beta == tf.layout.beta:
        raise ValueError("cross-grid sums expect the complementary shift")
    sums: dict[int, np.ndarray] = {}
    for j in co.scales():
        total = _scale_row_sums(tf, co, j, mu)
        if j > co.window.j_min:
            below = sums[j - 1]
            ci = co.child_indices(j)
            total += _gather(below, ci) + _gather(below, ci + 1)
        sums[j] = total
    return sums


def box_overlap_sum(
    tf: TileFunction,
    mu: AlphaMeasure,
    x_lo: float,
    x_hi: float,
    y_hi: float,
    y_lo: float = 0.0,
) -> float:
    """Integral of tf dA_alpha over a box [x_lo, x_hi] x (y_lo, y_hi].

    Exact: per scale, the horizontal overlap of each tile with [x_lo, x_hi]
    and the vertical overlap of the tile band with (y_lo, y_hi] are products
    of interval intersections.
    """
    lay = tf.layout
    total = 0.0
    for j in lay.scales():
        band_lo, band_hi = lay.tile_y_range(j)
        a = max(band_lo, y_lo)
        b = min(band_hi, y_hi)
        yv = mu.y_mass(a, b) if b > a else 0.0
        if yv <= 0.0 or lay.count(j) == 0:
            continue
        left = lay.left_edges(j)
        right = left + math.ldexp(1.0, j)
        xov = np.clip(np.minimum(right, x_hi) - np.maximum(left, x_lo), 0.0, None)
        total += float((tf.values[j] * xov).sum()) * yv
    return total


def two_grid_box_sums(
    tf: TileFunction, mu: AlphaMeasure
) -> dict[float, tuple[GridLayout, dict[int, np.ndarray]]]:
    """Integrals of tf dA_alpha over every Carleson box of *both* grids.

    Keys are the grid shifts; each value pairs the enumeration of that grid
    over tf's own window with the per-box integral arrays.  The same-shift
    half is one upward sweep; the other shift is computed exactly on a
    padded enumeration and restricted back to the window.
    """
    lay = tf.layout
    out: dict[float, tuple[GridLayout, dict[int, np.ndarray]]] = {
        lay.beta: (lay, same_grid_box_sums(tf.tile_masses(mu), lay))
    }
    other = next(b for b in BETAS if b != lay.beta)
    co_pad = GridLayout(other, lay.window).padded()
    cross = cross_grid_box_sums(tf, co_pad, mu)
    co = GridLayout(other, lay.window)
    restricted: dict[int, np.ndarray] = {}
    for j in co.scales():
        offset = co.m_lo(j) - co_pad.m_lo(j)
        idx = offset + np.arange(co.count(j))
        restricted[j] = _gather(cross[j], idx)
    out[other] = (co, restricted)
    return out


# -- file format ------------------------------------------------------------


def _format_beta(beta: float) -> str:
    return "0" if shift_numerator(beta) == 0 else "1/3"


def _parse_beta(token: str) -> float:
    if token in ("0", "0.0"):
        return 0.0
    if token in ("1/3", "0.3333333333333333"):
        return BETAS[1]
    raise ValueError(f"unrecognized grid shift {token!r}")


def save_tile_file(tf: TileFunction, path: str | Path) -> None:
    """Write a tile function as whitespace-delimited text.

    Header line:  beta j_min j_max x_lo x_hi
    Data lines:   j m value      (position m is the grid integer, not the
    dense index; float fields use repr-exact formatting).
    """
    lay = tf.layout
    w = lay.window
    lines = [
        f"{_format_beta(lay.beta)} {w.j_min} {w.j_max} {w.x_lo!r} {w.x_hi!r}"
    ]
    for j in lay.scales():
        m0 = lay.m_lo(j)
        for i, v in enumerate(tf.values[j]):
            lines.append(f"{j} {m0 + i} {float(v)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_tile_file(path: str | Path) -> TileFunction:
    """Read a tile function written by save_tile_file.

    Unlisted tiles inside the window default to 0; rows outside the window
    are rejected.
    """
    text = Path(path).read_text().strip().splitlines()
    if not text:
        raise ValueError(f"{path}: empty tile file")
    head = text[0].split()
    if len(head) != 5:
        raise ValueError(f"{path}: header must be 'beta j_min j_max x_lo x_hi'")
    beta = _parse_beta(head[0])
    window = GridWindow(int(head[1]), int(head[2]), float(head[3]), float(head[4]))
    layout = GridLayout(beta, window)
    tf = TileFunction.zeros(layout)
    for ln, row in enumerate(text[1:], start=2):
        if not row.strip():
            continue
        parts = row.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{ln}: expected 'j m value'")
        j, m, v = int(parts[0]), int(parts[1]), float(parts[2])
        i = layout.index(j, m)
        if i < 0:
            raise ValueError(f"{path}:{ln}: tile ({j}, {m}) outside the window")
        tf.values[j][i] = v
    return tf
