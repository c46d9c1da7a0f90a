"""Grid combinatorics: realizations, nesting, tiling, covering."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bekolle import (
    BETAS,
    CarlesonBox,
    DyadicInterval,
    GridWindow,
    Interval,
    Point,
    covering_interval,
    full_box,
    grid_intervals,
    locate_tile,
    top_half,
)
from bekolle.geometry import (
    MAX_SCALE,
    common_box_interval,
    grid_intervals_at_scale,
    position_of,
    scale_index,
    scale_sign,
    shift_numerator,
    tile_scale_of_height,
)

betas = st.sampled_from(BETAS)
scales = st.integers(min_value=-40, max_value=40)
positions = st.integers(min_value=-(10**6), max_value=10**6)


def test_realize_standard_unit():
    i = DyadicInterval(0.0, 0, 0).realize()
    assert i.left == 0.0 and i.right == 1.0


def test_realize_shifted_examples():
    # Shift sign is (-1)^j: positive at even scales, negative at odd ones.
    assert DyadicInterval(1 / 3, 0, 0).realize().left == pytest.approx(1 / 3, abs=1e-15)
    i = DyadicInterval(1 / 3, 1, 0).realize()
    assert i.left == pytest.approx(-2 / 3, abs=1e-15)
    assert i.length == 2.0
    assert DyadicInterval(1 / 3, 2, 0).realize().left == pytest.approx(4 / 3, abs=1e-15)


def test_realize_exact_matches_float():
    for beta in BETAS:
        for j in (-3, -2, -1, 0, 1, 2, 3):
            for m in (-5, -1, 0, 1, 7):
                d = DyadicInterval(beta, j, m)
                left, length = d.realize_exact()
                assert float(left) == pytest.approx(d.realize().left, abs=1e-14)
                assert float(length) == d.length


@given(betas, scales, positions)
def test_children_partition_exactly(beta, j, m):
    """The two children tile the parent with no gap, in exact arithmetic."""
    d = DyadicInterval(beta, j, m)
    lo, hi = d.children()
    p_left, p_len = d.realize_exact()
    l_left, l_len = lo.realize_exact()
    r_left, r_len = hi.realize_exact()
    assert l_left == p_left
    assert l_left + l_len == r_left
    assert r_left + r_len == p_left + p_len
    assert l_len == r_len == p_len / 2


@given(betas, scales, positions)
def test_parent_inverts_children(beta, j, m):
    d = DyadicInterval(beta, j, m)
    lo, hi = d.children()
    assert lo.parent() == d
    assert hi.parent() == d


@given(betas, scales, positions)
def test_containment_is_combinatorial(beta, j, m):
    d = DyadicInterval(beta, j, m)
    lo, hi = d.children()
    assert d.contains(lo) and d.contains(hi)
    assert d.contains(d)
    assert not lo.contains(d)
    grand = lo.children()[1]
    assert d.contains(grand)
    sibling = DyadicInterval(beta, j, m + 1)
    assert not sibling.contains(lo)


def test_containment_rejects_mixed_grids():
    with pytest.raises(ValueError):
        DyadicInterval(0.0, 0, 0).contains(DyadicInterval(1 / 3, 0, 0))


@given(
    betas,
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
    st.floats(min_value=1e-8, max_value=1e8, allow_nan=False),
)
def test_locate_tile_contains_point(beta, x, y):
    # Faithful float regime: the tile position index must stay below 2^52,
    # i.e. |x| / y not astronomically large.
    z = Point(x, y)
    d = locate_tile(beta, z)
    i = d.realize()
    assert i.contains_point(x)
    assert 0.5 * i.length < y <= i.length


def test_tile_scale_exact_dyadic_ties():
    # y = 2^k lands in the top half of a scale-k interval, not scale k+1.
    for k in (-20, -3, 0, 1, 17):
        assert tile_scale_of_height(math.ldexp(1.0, k)) == k
        assert tile_scale_of_height(math.ldexp(1.0, k) * 1.0000001) == k + 1


def test_tile_scale_rejects_bad_heights():
    with pytest.raises(ValueError):
        tile_scale_of_height(0.0)
    with pytest.raises(ValueError):
        tile_scale_of_height(-1.0)
    with pytest.raises(ValueError):
        tile_scale_of_height(math.inf)


def _first_cover(i):
    # Reference scan: scales upward from the first dyadic length >= |i|,
    # standard grid before the shifted one at each scale.
    fr, e = math.frexp(i.length)
    j0 = e - 1 if fr == 0.5 else e
    for j in range(j0, j0 + 4):
        for beta in BETAS:
            d = DyadicInterval(beta, j, position_of(beta, j, i.left))
            k = d.realize()
            if k.left <= i.left and i.right <= k.right:
                return beta, d
    return None


def test_covering_prefers_standard_grid_on_ties():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        left = rng.uniform(-100.0, 100.0)
        length = float(2.0 ** rng.uniform(-12.0, 6.0))
        i = Interval(left, length)
        got = covering_interval(i)
        assert got == _first_cover(i)


def test_covering_straddle_of_origin_needs_shifted_grid():
    beta, d = covering_interval(Interval(-0.01, 0.02))
    assert beta == 1 / 3
    k = d.realize()
    assert k.left <= -0.01 and 0.01 <= k.right


@settings(max_examples=300)
@given(
    st.floats(min_value=-1e5, max_value=1e5, allow_nan=False),
    st.floats(min_value=1e-6, max_value=1e5, allow_nan=False),
)
def test_covering_length_bound(left, length):
    i = Interval(left, length)
    beta, d = covering_interval(i)
    k = d.realize()
    assert k.left <= i.left and i.right <= k.right
    assert k.length <= 8.0 * i.length + 1e-9 * i.length


def test_scale_index_handles_dyadic_separation_exactly():
    # z = xi = i gives |z - conj(xi)| = 2, the boundary case d = 2^1.
    z = Point(0.0, 1.0)
    assert scale_index(z, z) == 1
    box = common_box_interval(z, z)
    assert box.length == 4.0
    assert box.contains_point(z.x)


@given(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
    st.floats(min_value=1e-8, max_value=1e8, allow_nan=False),
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
    st.floats(min_value=1e-8, max_value=1e8, allow_nan=False),
)
def test_common_box_contains_both_points(xz, yz, xx, yx):
    z, xi = Point(xz, yz), Point(xx, yx)
    l = scale_index(z, xi)
    d2 = (z.x - xi.x) ** 2 + (z.y + xi.y) ** 2
    assert math.ldexp(1.0, 2 * l) <= d2 < math.ldexp(1.0, 2 * l + 2)
    box = common_box_interval(z, xi)
    assert box.contains_point(z.x) and box.contains_point(xi.x)
    assert max(z.y, xi.y) <= box.length


def test_grid_enumeration_covers_the_range():
    for beta in BETAS:
        for j in (-2, 0, 3):
            row = grid_intervals_at_scale(beta, j, -5.0, 5.0)
            assert row[0].realize().left <= -5.0
            assert row[-1].realize().right >= 5.0
            for a, b in zip(row, row[1:]):
                assert b.m == a.m + 1


def test_grid_enumeration_window_order():
    w = GridWindow(-2, 1, 0.0, 1.0)
    rows = grid_intervals(0.0, w)
    js = [d.j for d in rows]
    assert js == sorted(js, reverse=True)
    assert js[0] == 1 and js[-1] == -2


def test_top_halves_stack_through_the_band():
    """At a fixed x the tiles of one grid partition the strip in y."""
    w = GridWindow(-3, 2, -1.0, 1.0)
    for beta in BETAS:
        for x in (-0.77, 0.0, 0.31):
            prev_top = w.y_floor
            for j in range(w.j_min, w.j_max + 1):
                d = locate_tile(beta, Point(x, math.ldexp(1.0, j)))
                assert d.j == j
                assert 0.5 * d.length == prev_top
                prev_top = d.length
            assert prev_top == w.y_ceil


def test_boxes_and_kinds():
    i = Interval(0.0, 2.0)
    q = full_box(i)
    t = top_half(i)
    assert (q.y_lo, q.y_hi) == (0.0, 2.0)
    assert (t.y_lo, t.y_hi) == (1.0, 2.0)
    with pytest.raises(ValueError):
        CarlesonBox(i, "middle")


def test_window_properties():
    w = GridWindow(-4, 2, -2.0, 2.0)
    assert w.width == 4.0
    assert w.y_floor == math.ldexp(1.0, -5)
    assert w.y_ceil == 4.0


def test_validation_errors():
    with pytest.raises(ValueError):
        Point(0.0, 0.0)
    with pytest.raises(ValueError):
        Point(0.0, -1.0)
    with pytest.raises(ValueError):
        Point(math.nan, 1.0)
    with pytest.raises(ValueError):
        Interval(0.0, 0.0)
    with pytest.raises(ValueError):
        DyadicInterval(0.2, 0, 0)
    with pytest.raises(ValueError):
        DyadicInterval(0.0, MAX_SCALE + 1, 0)
    with pytest.raises(ValueError):
        GridWindow(3, 2, 0.0, 1.0)
    with pytest.raises(ValueError):
        GridWindow(0, 1, 1.0, 1.0)
    with pytest.raises(ValueError):
        shift_numerator(0.5)
    with pytest.raises(ValueError):
        grid_intervals_at_scale(0.0, 0, 2.0, 1.0)


def test_shift_bookkeeping():
    assert shift_numerator(0.0) == 0
    assert shift_numerator(1 / 3) == 1
    assert scale_sign(0) == 1 and scale_sign(1) == -1 and scale_sign(-3) == -1


def test_exact_endpoints_are_rational():
    d = DyadicInterval(1 / 3, -2, 5)
    left, length = d.realize_exact()
    assert left == Fraction(3 * 5 + 1, 3) * Fraction(1, 4)
    assert length == Fraction(1, 4)
