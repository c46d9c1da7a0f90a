"""Tile layouts, tile-constant functions, and exact box-sum sweeps."""

import math

import numpy as np
import pytest

from bekolle import (
    AlphaMeasure,
    DyadicInterval,
    GridLayout,
    GridWindow,
    TileFunction,
    load_tile_file,
    save_tile_file,
)
from bekolle.geometry import BETAS
from bekolle.tiles import (
    ancestor_accumulate,
    ancestor_running_max,
    box_overlap_sum,
    same_grid_box_sums,
    two_grid_box_sums,
)

WINDOW = GridWindow(-2, 1, 0.0, 1.0)


def _random_tf(layout, seed, lo=0.5, hi=2.0):
    rng = np.random.default_rng(seed)
    tf = TileFunction.zeros(layout)
    for j in layout.scales():
        tf.values[j][:] = rng.uniform(lo, hi, layout.count(j))
    return tf


def test_layout_counts_standard_grid():
    lay = GridLayout(0.0, WINDOW)
    assert [lay.count(j) for j in lay.scales()] == [4, 2, 1, 1]
    assert lay.size == 8
    assert lay.interval(0, 0) == DyadicInterval(0.0, 0, 0)
    assert lay.index(0, 0) == 0
    assert lay.index(0, 5) == -1
    assert lay.index(7, 0) == -1


def test_layout_edges_match_realizations():
    for beta in BETAS:
        lay = GridLayout(beta, WINDOW)
        for j in lay.scales():
            edges = lay.left_edges(j)
            for i in range(lay.count(j)):
                d = lay.interval(j, i)
                assert edges[i] == pytest.approx(d.realize().left, abs=1e-15)
                # every enumerated interval meets the horizontal range
                assert d.realize().left < WINDOW.x_hi
                assert d.realize().right > WINDOW.x_lo


def test_layout_child_parent_indices_agree():
    for beta in BETAS:
        lay = GridLayout(beta, GridWindow(-3, 2, -1.5, 1.0))
        for j in lay.scales():
            if j > lay.window.j_min:
                ci = lay.child_indices(j)
                for i in range(lay.count(j)):
                    d = lay.interval(j, i)
                    lo, hi = d.children()
                    assert ci[i] == lo.m - lay.m_lo(j - 1)
                    assert ci[i] + 1 == hi.m - lay.m_lo(j - 1)
            if j < lay.window.j_max:
                pi = lay.parent_indices(j)
                for i in range(lay.count(j)):
                    d = lay.interval(j, i)
                    assert pi[i] == d.parent().m - lay.m_lo(j + 1)
        with pytest.raises(ValueError):
            lay.child_indices(lay.window.j_min)
        with pytest.raises(ValueError):
            lay.parent_indices(lay.window.j_max)


def test_padded_layout_extends_every_scale():
    lay = GridLayout(1 / 3, WINDOW)
    wide = lay.padded(2)
    for j in lay.scales():
        assert wide.m_lo(j) == lay.m_lo(j) - 2
        assert wide.count(j) == lay.count(j) + 4


def test_sample_uses_tile_centers():
    lay = GridLayout(0.0, WINDOW)
    tf = TileFunction.sample(lay, lambda x, y: x + 10.0 * y)
    for j in lay.scales():
        x_mid = lay.left_edges(j) + math.ldexp(1.0, j - 1)
        y_mid = 3.0 * math.ldexp(1.0, j - 2)
        assert np.allclose(tf.values[j], x_mid + 10.0 * y_mid, rtol=0, atol=0)


def test_box_indicator_masses():
    lay = GridLayout(0.0, WINDOW)
    mu = AlphaMeasure(0.0)
    ind = TileFunction.box_indicator(lay, DyadicInterval(0.0, 0, 0))
    # truncated Carleson box over [0, 1): y in (2^(j_min-1), 1]
    assert ind.integral(mu) == pytest.approx(1.0 - lay.window.y_floor, rel=1e-14)
    counts = {j: int(ind.values[j].sum()) for j in lay.scales()}
    assert counts == {-2: 4, -1: 2, 0: 1, 1: 0}
    with pytest.raises(ValueError):
        TileFunction.box_indicator(lay, DyadicInterval(1 / 3, 0, 0))


def test_algebra_roundtrips():
    lay = GridLayout(0.0, WINDOW)
    f = _random_tf(lay, 1)
    g = _random_tf(lay, 2)
    back = (f + g) - g
    for j in lay.scales():
        assert np.allclose(back.values[j], f.values[j], rtol=1e-15, atol=0)
        assert np.allclose((2.0 * f).values[j], (f + f).values[j], rtol=0, atol=0)
        assert np.allclose((f**2).values[j], (f * f).values[j], rtol=0, atol=0)
        assert np.allclose((f / g).values[j], f.values[j] / g.values[j], rtol=0, atol=0)
    h = f.copy()
    h.values[0][0] = 99.0
    assert f.values[0][0] != 99.0
    m = f.maximum(g)
    assert m.values[-1][0] == max(f.values[-1][0], g.values[-1][0])


def test_algebra_rejects_layout_mismatch():
    f = _random_tf(GridLayout(0.0, WINDOW), 1)
    g = _random_tf(GridLayout(0.0, GridWindow(-2, 1, 0.0, 2.0)), 1)
    with pytest.raises(ValueError):
        _ = f + g
    h = _random_tf(GridLayout(1 / 3, WINDOW), 1)
    with pytest.raises(ValueError):
        _ = f * h


def test_integral_of_ones_is_strip_mass():
    for alpha in (0.0, 1.0, -0.5):
        mu = AlphaMeasure(alpha)
        for beta in BETAS:
            lay = GridLayout(beta, WINDOW)
            ones = TileFunction.full(lay, 1.0)
            got = ones.integral(mu)
            # Tiles tile the strip exactly once, but the enumerated
            # intervals overhang the horizontal range; integrate per-scale.
            exact = sum(
                lay.count(j) * lay.tile_area(j, mu) for j in lay.scales()
            )
            assert got == pytest.approx(exact, rel=1e-14)


def test_norm_lp_weighted():
    lay = GridLayout(0.0, WINDOW)
    mu = AlphaMeasure(1.0)
    ones = TileFunction.full(lay, 1.0)
    w = TileFunction.full(lay, 3.0)
    mass = ones.integral(mu)
    assert ones.norm_lp(2.0, mu, weight=w) == pytest.approx(
        math.sqrt(3.0 * mass), rel=1e-14
    )


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_same_grid_box_sums_match_overlap_sums(beta, alpha):
    mu = AlphaMeasure(alpha)
    lay = GridLayout(beta, WINDOW)
    tf = _random_tf(lay, 5)
    sums = same_grid_box_sums(tf.tile_masses(mu), lay)
    for j in lay.scales():
        for i in range(lay.count(j)):
            iv = lay.interval(j, i).realize()
            want = box_overlap_sum(tf, mu, iv.left, iv.right, iv.length)
            assert sums[j][i] == pytest.approx(want, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("beta", BETAS)
def test_two_grid_box_sums_are_exact_on_both_grids(beta):
    """The cross-grid sweep agrees with direct overlap integration."""
    mu = AlphaMeasure(0.5)
    lay = GridLayout(beta, WINDOW)
    tf = _random_tf(lay, 9)
    both = two_grid_box_sums(tf, mu)
    assert set(both) == set(BETAS)
    for b, (grid, sums) in both.items():
        assert grid.window == WINDOW
        for j in grid.scales():
            for i in range(grid.count(j)):
                iv = grid.interval(j, i).realize()
                want = box_overlap_sum(tf, mu, iv.left, iv.right, iv.length)
                assert sums[j][i] == pytest.approx(want, rel=1e-12, abs=1e-15)


def test_cross_grid_requires_complementary_shift():
    from bekolle.tiles import cross_grid_box_sums

    lay = GridLayout(0.0, WINDOW)
    tf = _random_tf(lay, 3)
    with pytest.raises(ValueError):
        cross_grid_box_sums(tf, GridLayout(0.0, WINDOW), AlphaMeasure(0.0))


def test_ancestor_sweeps_match_chain_walks():
    lay = GridLayout(0.0, GridWindow(-3, 1, -1.0, 1.0))
    rng = np.random.default_rng(11)
    per_box = {j: rng.uniform(-1.0, 1.0, lay.count(j)) for j in lay.scales()}
    run_max = ancestor_running_max(per_box, lay)
    run_sum = ancestor_accumulate(per_box, lay)
    for j in lay.scales():
        for i in range(lay.count(j)):
            chain = [per_box[j][i]]
            d = lay.interval(j, i)
            while d.j < lay.window.j_max:
                d = d.parent()
                k = lay.index(d.j, d.m)
                if k >= 0:
                    chain.append(per_box[d.j][k])
            assert run_max[j][i] == pytest.approx(max(chain), abs=1e-15)
            assert run_sum[j][i] == pytest.approx(sum(chain), rel=1e-14, abs=1e-15)


def test_boundary_tiles_outside_enumeration_contribute_zero():
    # A one-interval-per-scale window: children of the top interval fall
    # partly outside; the sweep must treat them as zero, not wrap around.
    lay = GridLayout(0.0, GridWindow(0, 1, 0.0, 1.0))
    assert lay.count(1) == 1 and lay.count(0) == 1
    masses = {1: np.array([1.0]), 0: np.array([1.0])}
    sums = same_grid_box_sums(masses, lay)
    # box over [0, 2) sees its own tile plus the single enumerated child
    assert sums[1][0] == 2.0


@pytest.mark.parametrize("beta", BETAS)
def test_tile_file_roundtrip(tmp_path, beta):
    lay = GridLayout(beta, GridWindow(-1, 1, -0.5, 1.5))
    tf = _random_tf(lay, 21)
    p = tmp_path / "tiles.txt"
    save_tile_file(tf, p)
    back = load_tile_file(p)
    assert back.layout.beta == beta
    assert back.layout.window == lay.window
    for j in lay.scales():
        assert np.array_equal(back.values[j], tf.values[j])


def test_tile_file_sparse_rows_default_to_zero(tmp_path):
    p = tmp_path / "sparse.txt"
    p.write_text("0 -1 1 0.0 1.0\n-1 1 2.5\n")
    tf = load_tile_file(p)
    assert tf.values[-1][tf.layout.index(-1, 1)] == 2.5
    assert tf.values[0].sum() == 0.0
    assert tf.values[1].sum() == 0.0


def test_tile_file_rejects_bad_input(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("\n")
    with pytest.raises(ValueError):
        load_tile_file(empty)
    bad_head = tmp_path / "head.txt"
    bad_head.write_text("0 -1 1 0.0\n")
    with pytest.raises(ValueError):
        load_tile_file(bad_head)
    outside = tmp_path / "outside.txt"
    outside.write_text("0 -1 1 0.0 1.0\n5 0 1.0\n")
    with pytest.raises(ValueError):
        load_tile_file(outside)
    short_row = tmp_path / "row.txt"
    short_row.write_text("0 -1 1 0.0 1.0\n-1 1\n")
    with pytest.raises(ValueError):
        load_tile_file(short_row)
    bad_beta = tmp_path / "beta.txt"
    bad_beta.write_text("1/2 -1 1 0.0 1.0\n")
    with pytest.raises(ValueError):
        load_tile_file(bad_beta)
