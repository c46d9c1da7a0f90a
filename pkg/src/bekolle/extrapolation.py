"""Iteration machinery that turns one weighted bound into a family of them.

Given an exponent p > 2 and a weight w, the sublinear operator
S(h) = (M(h^(1/phi) w) / w)^phi, phi = (p-2)/(p-1), is applied repeatedly
to build the majorant D(h) = sum_k 2^(-k) S^k(h) / N^k.  Three properties
make D useful and are checked here numerically:

  (1) h <= D(h) pointwise (the k = 0 term is h, everything else is >= 0);
  (2) the L^(p'/phi)(w dA_alpha) norm of D(h) is at most 2-ish times h's,
      provided the divisor N dominates every realized iterate quotient;
  (3) box characteristics of the product weights h w and S(h) w are
      controlled by the p-characteristic of w alone.

All box quantities are evaluated in the tile model with strip-truncated
denominators, where the per-box inequality chain behind (3) is exact (two
applications of Hölder plus the maximal function's domination of box
averages); the checks below therefore measure honest margins, not float
noise around a hoped-for bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BETAS, Interval, full_box
from .measure import AlphaMeasure, Exponents
from .operators import maximal_alpha, weight_tiles
from .tiles import TileFunction, box_overlap_sum, two_grid_box_sums
from .weights import BoxFamily, Weight

__all__ = [
    "PhiValue",
    "phi",
    "ExtrapolationConfig",
    "config_for",
    "s_operator",
    "rdf_algorithm",
    "ExtrapolationError",
    "ClaimReport",
    "check_joint_claim",
]


class ExtrapolationError(RuntimeError):
    """Raised when a series term fails to decay as the divisor promised."""


@dataclass(frozen=True)
class PhiValue:
    """The interpolation exponent (p-2)/(p-1), in [0, 1)."""

    value: float


def phi(p: float) -> PhiValue:
    """phi(p) = (p-2)/(p-1) for p >= 2.

    Values below 2 are rejected: that half of the exponent range is reached
    by duality, not by this iteration.
    """
    if not (p >= 2.0 and math.isfinite(p)):
        raise ValueError(f"iteration exponent must satisfy p >= 2, got {p}")
    return PhiValue((p - 2.0) / (p - 1.0))


def _require_nonnegative(h: TileFunction, name: str) -> None:
    for j, v in h.values.items():
        if v.size and (v < 0.0).any():
            raise ValueError(f"{name} must be nonnegative (scale {j} has a negative tile)")


def s_operator(h: TileFunction, w: Weight, p: float, mu: AlphaMeasure) -> TileFunction:
    """S(h) = (M(h^(1/phi) w) / w)^phi on h's layout, tile by tile.

    M is the two-grid maximal function, so S(h) dominates the box averages
    behind the joint-characteristic claim on every family box.  p = 2 is
    rejected (the inner exponent 1/phi degenerates).
    """
    ph = phi(p).value
    if ph == 0.0:
        raise ValueError("p = 2 has no iteration step (phi = 0)")
    _require_nonnegative(h, "h")
    wt = weight_tiles(w, h.layout)
    inner = (h ** (1.0 / ph)) * wt
    m = maximal_alpha(inner, mu)
    return (m / wt) ** ph


@dataclass(frozen=True)
class ExtrapolationConfig:
    """Series parameters: exponent, truncation length, divisor, tolerance.

    norm_bound is the divisor N: it must dominate every realized quotient
    ||S^k h|| / ||S^(k-1) h|| in L^(p'/phi)(w dA_alpha), which rdf_algorithm
    enforces at run time.  truncation K bounds the dropped tail by 2^-K
    times the controlled norm.
    """

    p: float
    norm_bound: float
    truncation: int = 40
    tolerance: float = 1e-9

    def __post_init__(self) -> None:
        if self.p <= 2.0:
            raise ValueError("series iteration requires p > 2")
        if self.truncation < 1:
            raise ValueError("need at least one series term")
        if not (self.norm_bound > 0.0 and math.isfinite(self.norm_bound)):
            raise ValueError("norm_bound must be positive finite")

    @property
    def control_exponent(self) -> float:
        """The Lebesgue exponent p'/phi(p) of the controlled norm."""
        e = Exponents(self.p)
        return e.p_conj / phi(self.p).value


def config_for(
    h: TileFunction,
    w: Weight,
    p: float,
    mu: AlphaMeasure,
    *,
    truncation: int = 40,
    probe_terms: int = 6,
    analytic_bound: float | None = None,
    tolerance: float = 1e-9,
) -> ExtrapolationConfig:
    """Measure iterate quotients on h and choose a safe divisor.

    N = max(measured quotients over `probe_terms` iterates, analytic_bound)
    where the analytic bound, when supplied, is the p-characteristic of w
    raised to phi(p) — the proven operator bound for S.
    """
    ph = phi(p).value
    if ph == 0.0:
        raise ValueError("p = 2 has no iteration step")
    wt = weight_tiles(w, h.layout)
    q = Exponents(p).p_conj / ph
    n_bound = analytic_bound if analytic_bound is not None else 0.0
    cur = h
    prev_norm = cur.norm_lp(q, mu, weight=wt)
    for _ in range(probe_terms):
        if prev_norm == 0.0:
            break
        cur = s_operator(cur, w, p, mu)
        norm = cur.norm_lp(q, mu, weight=wt)
        n_bound = max(n_bound, norm / prev_norm)
        prev_norm = norm
    if n_bound <= 0.0:
        n_bound = 1.0
    return ExtrapolationConfig(p, n_bound, truncation, tolerance)


def rdf_algorithm(
    h: TileFunction, w: Weight, cfg: ExtrapolationConfig, mu: AlphaMeasure
) -> TileFunction:
    """The truncated majorant D(h) = sum_{k<=K} 2^-k S^k(h) / N^k.

    Every term is nonnegative and the k = 0 term is h itself, so
    h <= D(h) holds exactly.  If some iterate's norm quotient exceeds N
    (so the series would not be summable at the promised rate), an
    ExtrapolationError reports the offending term.
    """
    _require_nonnegative(h, "h")
    wt = weight_tiles(w, h.layout)
    q = cfg.control_exponent
    total = h.copy()
    term = h
    term_scale = 1.0
    prev_norm = h.norm_lp(q, mu, weight=wt)
    for k in range(1, cfg.truncation + 1):
        term = s_operator(term, w, cfg.p, mu)
        norm = term.norm_lp(q, mu, weight=wt)
        if prev_norm > 0.0 and norm > cfg.norm_bound * prev_norm * (1.0 + cfg.tolerance):
            raise ExtrapolationError(
                f"term {k}: iterate quotient {norm / prev_norm:.6g} exceeds the "
                f"divisor {cfg.norm_bound:.6g}; raise norm_bound"
            )
        prev_norm = norm
        term_scale /= 2.0 * cfg.norm_bound
        total = total + term * term_scale
    return total


# ---------------------------------------------------------------------------
# The joint-characteristic claim
# ---------------------------------------------------------------------------


def _family_max(
    fam: BoxFamily,
    mu: AlphaMeasure,
    parts: list[tuple[TileFunction, float]],
) -> tuple[float, Interval, int]:
    """max over family boxes of prod_i (avg of parts_i over the box)^expo_i.

    Averages are tile-model averages (strip-truncated base); the dyadic
    part of the family is evaluated by linear sweeps, the rest box by box.
    """
    layout = parts[0][0].layout
    ones = TileFunction.full(layout, 1.0)
    best = -math.inf
    worst: Interval | None = None
    searched = 0

    if "dyadic" in fam.mode:
        if fam.window != layout.window:
            raise ValueError("dyadic family window must match the tile layout")
        sums = [two_grid_box_sums(tf, mu) for tf, _ in parts]
        base = two_grid_box_sums(ones, mu)
        for beta in BETAS:
            lay = base[beta][0]
            for j in lay.scales():
                b = base[beta][1][j]
                if b.size == 0:
                    continue
                searched += b.size
                prod = np.ones_like(b)
                with np.errstate(invalid="ignore", divide="ignore"):
                    for (tf, expo), s in zip(parts, sums):
                        prod = prod * (s[beta][1][j] / b) ** expo
                prod = np.where(b > 0.0, prod, -np.inf)
                k = int(np.nanargmax(prod))
                if prod[k] > best:
                    best = float(prod[k])
                    worst = lay.interval(j, k).realize()

    per_box: list[Interval] = []
    if "centered" in fam.mode:
        per_box.extend(Interval(-t, 2.0 * t) for t in fam.ladder)
    if fam.mode == "explicit":
        per_box.extend(fam.intervals)
    for i in per_box:
        searched += 1
        box = full_box(i)
        b = box_overlap_sum(ones, mu, i.left, i.right, box.y_hi)
        if b <= 0.0:
            continue
        prod = 1.0
        for tf, expo in parts:
            prod *= (box_overlap_sum(tf, mu, i.left, i.right, box.y_hi) / b) ** expo
        if prod > best:
            best = prod
            worst = i
    if worst is None:
        raise ValueError("empty box family")
    return best, worst, searched


@dataclass(frozen=True)
class ClaimReport:
    """One verified inequality: lhs <= rhs over a finite box family."""

    claim: str
    lhs: float
    rhs: float
    margin: float
    family_size: int
    worst_box: Interval

    def as_text(self) -> str:
        wb = self.worst_box
        return "\n".join(
            [
                f"claim: {self.claim}",
                f"lhs: {self.lhs!r}",
                f"rhs: {self.rhs!r}",
                f"margin: {self.margin!r}",
                f"family_size: {self.family_size}",
                f"worst_box: [{wb.left!r}, {wb.right!r})",
            ]
        )


def check_joint_claim(
    h: TileFunction,
    w: Weight,
    p: float,
    mu: AlphaMeasure,
    fam: BoxFamily,
    *,
    tolerance: float = 1e-9,
) -> ClaimReport:
    """Verify: joint 2-characteristic of (h w, S(h) w) <= (p-characteristic
    of w)^(1/(p-1)) over the family.

    Both sides are tile-model quantities over the same family; the report
    carries the margin and the interval where the left side peaks.  Raises
    ValueError if the inequality fails beyond `tolerance`.
    """
    _require_nonnegative(h, "h")
    if h.max_value() <= 0.0:
        raise ValueError("h must be nonzero")
    e = Exponents(p)
    wt = weight_tiles(w, h.layout)
    sh = s_operator(h, w, p, mu)
    shw = sh * wt
    if shw.min_value() <= 0.0:
        raise ValueError(
            "S(h) w vanishes on some tile; enlarge the window's top scale so "
            "the shifted grid holds a box joining every tile to the support of h"
        )
    lhs, worst, n1 = _family_max(fam, mu, [(h * wt, 1.0), (shw ** -1.0, 1.0)])
    rhs_inner, _, _ = _family_max(
        fam, mu, [(wt, 1.0), (wt ** e.dual_power, e.p - 1.0)]
    )
    rhs = rhs_inner ** (1.0 / (e.p - 1.0))
    report = ClaimReport(
        claim="joint-2-characteristic(h*w, S(h)*w) <= p-characteristic(w)^(1/(p-1))",
        lhs=lhs,
        rhs=rhs,
        margin=rhs - lhs,
        family_size=n1,
        worst_box=worst,
    )
    if lhs > rhs * (1.0 + tolerance):
        raise ValueError("joint-characteristic claim failed:\n" + report.as_text())
    return report
