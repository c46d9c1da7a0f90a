"""Iteration exponent, majorant series, and the joint-characteristic claim."""

import numpy as np
import pytest

from bekolle import (
    AlphaMeasure,
    BoxFamily,
    ConstantWeight,
    ExtrapolationConfig,
    ExtrapolationError,
    GridLayout,
    GridWindow,
    PowerWeight,
    StepWeight,
    TileFunction,
    check_joint_claim,
    config_for,
    phi,
    rdf_algorithm,
    s_operator,
    weight_tiles,
)

MU0 = AlphaMeasure(0.0)
WIN = GridWindow(-4, 2, -2.0, 2.0)


@pytest.fixture
def layout():
    return GridLayout(0.0, WIN)


def _rand_h(layout, seed, kind="lognorm"):
    rng = np.random.default_rng(seed)
    tf = TileFunction.zeros(layout)
    for j in layout.scales():
        n = layout.count(j)
        tf.values[j][:] = (
            np.exp(rng.normal(0.0, 0.8, n)) if kind == "lognorm" else rng.exponential(1.0, n)
        )
    return tf


def test_phi_values():
    assert phi(2.0).value == 0.0
    assert phi(3.0).value == 0.5
    assert phi(4.0).value == pytest.approx(2.0 / 3.0, rel=1e-15)
    for bad in (1.5, 1.0, 0.0, float("inf")):
        with pytest.raises(ValueError):
            phi(bad)


def test_s_operator_rejects_p_two_and_negatives(layout):
    ones = TileFunction.full(layout, 1.0)
    with pytest.raises(ValueError, match="no iteration step"):
        s_operator(ones, ConstantWeight(1.0), 2.0, MU0)
    bad = TileFunction.full(layout, 1.0)
    bad.values[0][0] = -0.5
    with pytest.raises(ValueError, match="nonnegative"):
        s_operator(bad, ConstantWeight(1.0), 3.0, MU0)


def test_s_operator_constant_fixed_point(layout):
    out = s_operator(TileFunction.full(layout, 2.5), ConstantWeight(1.0), 3.0, MU0)
    for j in layout.scales():
        assert np.array_equal(out.values[j], np.full(layout.count(j), 2.5))


def test_s_operator_homogeneous_and_monotone(layout):
    w = StepWeight(1.0, 4.0)
    h = _rand_h(layout, 5)
    s1 = s_operator(h, w, 3.0, MU0)
    s2 = s_operator(3.7 * h, w, 3.0, MU0)
    for j in layout.scales():
        assert np.allclose(s2.values[j], 3.7 * s1.values[j], rtol=1e-12, atol=0)
    bigger = h + _rand_h(layout, 6)
    sa = s_operator(h, ConstantWeight(1.0), 3.0, MU0)
    sb = s_operator(bigger, ConstantWeight(1.0), 3.0, MU0)
    for j in layout.scales():
        assert (sb.values[j] >= sa.values[j] - 1e-15).all()


def test_config_validation_and_control_exponent():
    cfg = ExtrapolationConfig(3.0, 1.5)
    assert cfg.control_exponent == pytest.approx(3.0, rel=1e-15)
    assert ExtrapolationConfig(4.0, 1.0).control_exponent == pytest.approx(2.0, rel=1e-14)
    with pytest.raises(ValueError):
        ExtrapolationConfig(2.0, 1.5)
    with pytest.raises(ValueError):
        ExtrapolationConfig(3.0, 1.5, truncation=0)
    with pytest.raises(ValueError):
        ExtrapolationConfig(3.0, 0.0)
    with pytest.raises(ValueError):
        config_for(TileFunction.full(GridLayout(0.0, WIN), 1.0), ConstantWeight(1.0), 2.0, MU0)


def test_config_for_respects_analytic_bound(layout):
    h = _rand_h(layout, 7, "exp")
    measured = config_for(h, StepWeight(1.0, 4.0), 3.0, MU0)
    forced = config_for(h, StepWeight(1.0, 4.0), 3.0, MU0, analytic_bound=50.0)
    assert forced.norm_bound == 50.0
    assert measured.norm_bound < 50.0


def test_majorant_geometric_closed_form(layout):
    """With h = w = 1 every iterate is 1, the probe divisor is exactly 1,
    and the truncated series sums to a plain geometric series."""
    ones = TileFunction.full(layout, 1.0)
    cfg = config_for(ones, ConstantWeight(1.0), 3.0, MU0)
    assert cfg.norm_bound == 1.0
    d = rdf_algorithm(ones, ConstantWeight(1.0), cfg, MU0)
    g = 1.0 / (2.0 * cfg.norm_bound)
    closed = (1.0 - g ** (cfg.truncation + 1)) / (1.0 - g)
    for j in layout.scales():
        assert np.allclose(d.values[j], closed, rtol=1e-12, atol=0)
    assert closed <= 2.0


def test_majorant_dominates_input_exactly(layout):
    w = StepWeight(1.0, 4.0)
    h = _rand_h(layout, 7, "exp")
    cfg = config_for(h, w, 3.0, MU0)
    d = rdf_algorithm(h, w, cfg, MU0)
    for j in layout.scales():
        assert (d.values[j] >= h.values[j]).all()


def test_majorant_norm_at_most_twice(layout):
    w = StepWeight(1.0, 4.0)
    h = _rand_h(layout, 7, "exp")
    cfg = config_for(h, w, 3.0, MU0)
    d = rdf_algorithm(h, w, cfg, MU0)
    wt = weight_tiles(w, layout)
    q = cfg.control_exponent
    quot = d.norm_lp(q, MU0, weight=wt) / h.norm_lp(q, MU0, weight=wt)
    assert quot == pytest.approx(1.7788474705110944, rel=1e-6)
    assert quot <= 2.0 * (1.0 + 1e-6)


def test_majorant_spreads_mass_everywhere(layout):
    """A one-tile spike still produces a strictly positive majorant: the
    shifted grid carries averages across the whole window."""
    spike = TileFunction.zeros(layout)
    spike.values[0][0] = 1.0
    cfg = config_for(spike, ConstantWeight(1.0), 3.0, MU0)
    d = rdf_algorithm(spike, ConstantWeight(1.0), cfg, MU0)
    assert min(float(np.min(d.values[j])) for j in layout.scales()) > 0.0


def test_series_divergence_is_reported(layout):
    h = _rand_h(layout, 7, "exp")
    with pytest.raises(ExtrapolationError, match="raise norm_bound"):
        rdf_algorithm(h, StepWeight(1.0, 4.0), ExtrapolationConfig(3.0, 1e-6), MU0)


def test_joint_claim_trivial_weight(layout):
    ones = TileFunction.full(layout, 1.0)
    rep = check_joint_claim(ones, ConstantWeight(1.0), 3.0, MU0, BoxFamily.dyadic(WIN))
    assert rep.lhs == 1.0
    assert rep.rhs == 1.0
    assert rep.margin == 0.0
    assert rep.family_size == 262


def test_joint_claim_step_weight(layout):
    ones = TileFunction.full(layout, 1.0)
    rep = check_joint_claim(ones, StepWeight(1.0, 4.0), 3.0, MU0, BoxFamily.dyadic(WIN))
    assert rep.lhs == pytest.approx(1.0773502691896257, rel=1e-10)
    assert rep.margin > 0.1
    assert rep.lhs <= rep.rhs


def test_joint_claim_power_weight_random_h(layout):
    h = _rand_h(layout, 9)
    rep = check_joint_claim(h, PowerWeight(3.0), 3.0, MU0, BoxFamily.dyadic(WIN))
    assert rep.margin > 0.0
    assert rep.lhs == pytest.approx(2.202123656771677, rel=1e-9)


def test_joint_claim_report_text(layout):
    ones = TileFunction.full(layout, 1.0)
    rep = check_joint_claim(ones, ConstantWeight(1.0), 3.0, MU0, BoxFamily.dyadic(WIN))
    text = rep.as_text()
    for key in ("claim:", "lhs:", "rhs:", "margin:", "family_size:", "worst_box: ["):
        assert key in text


def test_joint_claim_rejects_zero_h(layout):
    with pytest.raises(ValueError, match="h must be nonzero"):
        check_joint_claim(
            TileFunction.zeros(layout), ConstantWeight(1.0), 3.0, MU0, BoxFamily.dyadic(WIN)
        )


def test_joint_claim_reports_unreachable_tiles():
    """On a single-scale window a spike's iterate vanishes on far tiles,
    which the claim check flags instead of dividing by zero."""
    win = GridWindow(0, 0, -2.0, 2.0)
    lay = GridLayout(0.0, win)
    spike = TileFunction.zeros(lay)
    spike.values[0][lay.count(0) - 1] = 1.0
    with pytest.raises(ValueError, match="vanishes on some tile"):
        check_joint_claim(spike, ConstantWeight(1.0), 3.0, MU0, BoxFamily.dyadic(win))
