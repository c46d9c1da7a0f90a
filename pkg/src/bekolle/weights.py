"""Weight catalog, weighted box masses, and box-ratio characteristics.

The catalog is deliberately closed: constants, radial powers |z|^gamma,
horizontal two-value steps, and tables of per-tile values.  Every member
has an exact (or log-polar) box mass, and raising a member to a real power
stays inside the catalog, so dual weights w^(1-p') never leave the set and
every characteristic below has an independent closed-form oracle.

Characteristics are suprema of box ratios over *families* of intervals;
a supremum over all intervals is unobservable, so a family here is always
an explicit finite search set (both shifted grids over a window, a
geometric ladder of intervals centered at the origin, or a user list) and
every result is a certified lower bound attained at a reported interval.

Everything in this module is pure and deterministic: family maxima are
folded in enumeration order, so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

from .geometry import (
    BETAS,
    CarlesonBox,
    GridWindow,
    Interval,
    full_box,
    grid_intervals,
    scale_sign,
    shift_numerator,
)
from .measure import AlphaMeasure, Exponents
from .quadrature import (
    QuadratureError,
    QuadratureSpec,
    integrate_box,
    power_box_mass,
    radial_power_integral,
    sin_power_integral,
)
from .tiles import (
    GridLayout,
    TileFunction,
    box_overlap_sum,
    two_grid_box_sums,
)

__all__ = [
    "Weight",
    "ConstantWeight",
    "PowerWeight",
    "StepWeight",
    "TileTableWeight",
    "dual_weight",
    "weighted_box_integral",
    "quadrature_box_mass",
    "bekolle_ratio",
    "bekolle_constant",
    "bekolle_report",
    "joint_b2_constant",
    "joint_b2_report",
    "BoxFamily",
    "FamilyReport",
    "NormResult",
    "lp_norm",
    "parse_weight",
    "save_weight_table",
    "load_weight_table",
]


# ---------------------------------------------------------------------------
# The catalog
# ---------------------------------------------------------------------------


class Weight(ABC):
    """A positive weight on the upper half-plane, closed under real powers."""

    kind: str = ""

    @abstractmethod
    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Pointwise values; x and y broadcast together."""

    def __call__(self, x, y) -> np.ndarray:
        return self.evaluate(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    @abstractmethod
    def power(self, t: float) -> "Weight":
        """The pointwise power w^t, again a catalog weight."""

    @abstractmethod
    def rect_mass(
        self,
        x_lo: float,
        x_hi: float,
        y_lo: float,
        y_hi: float,
        mu: AlphaMeasure,
        q: QuadratureSpec | None = None,
    ) -> float:
        """Integral of w dA_alpha over [x_lo, x_hi] x (y_lo, y_hi]."""

    def base_rect_area(
        self, x_lo: float, x_hi: float, y_lo: float, y_hi: float, mu: AlphaMeasure
    ) -> float:
        """The unweighted dA_alpha mass used as denominator in averages.

        Table weights override this: their base measure is dA_alpha
        restricted to the tiled strip, so numerator and denominator always
        integrate over the same region.
        """
        return (x_hi - x_lo) * mu.y_mass(y_lo, y_hi)

    @abstractmethod
    def spec_string(self) -> str:
        """Text form of the weight (see parse_weight)."""


@dataclass(frozen=True)
class ConstantWeight(Weight):
    c: float
    kind = "constant"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.c) and self.c > 0.0):
            raise ValueError(f"constant weight must be positive finite, got {self.c}")

    def evaluate(self, x, y):
        return np.full(np.broadcast(x, y).shape, self.c)

    def power(self, t: float) -> "ConstantWeight":
        return ConstantWeight(self.c**t)

    def rect_mass(self, x_lo, x_hi, y_lo, y_hi, mu, q=None):
        return self.c * (x_hi - x_lo) * mu.y_mass(y_lo, y_hi)

    def spec_string(self) -> str:
        return f"constant:c={self.c!r}"


@dataclass(frozen=True)
class PowerWeight(Weight):
    """w(z) = |z|^gamma.  Box masses by exact polar reduction."""

    gamma: float
    kind = "power"

    def __post_init__(self) -> None:
        if not math.isfinite(self.gamma):
            raise ValueError("power exponent must be finite")

    def evaluate(self, x, y):
        return (np.asarray(x) ** 2 + np.asarray(y) ** 2) ** (self.gamma / 2.0)

    def power(self, t: float) -> "PowerWeight":
        return PowerWeight(self.gamma * t)

    def rect_mass(self, x_lo, x_hi, y_lo, y_hi, mu, q=None):
        if self.gamma == 0.0:
            return (x_hi - x_lo) * mu.y_mass(y_lo, y_hi)
        return power_box_mass(self.gamma, x_lo, x_hi, y_lo, y_hi, mu.alpha)

    def spec_string(self) -> str:
        return f"power:gamma={self.gamma!r}"


@dataclass(frozen=True)
class StepWeight(Weight):
    """w = a on {x < 0}, b on {x >= 0}."""

    a: float
    b: float
    kind = "step"

    def __post_init__(self) -> None:
        for v in (self.a, self.b):
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"step levels must be positive finite, got {v}")

    def evaluate(self, x, y):
        xb, yb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y))
        return np.where(xb < 0.0, self.a, self.b)

    def power(self, t: float) -> "StepWeight":
        return StepWeight(self.a**t, self.b**t)

    def rect_mass(self, x_lo, x_hi, y_lo, y_hi, mu, q=None):
        w_neg = max(0.0, min(x_hi, 0.0) - x_lo)
        w_pos = max(0.0, x_hi - max(x_lo, 0.0))
        return (self.a * w_neg + self.b * w_pos) * mu.y_mass(y_lo, y_hi)

    def spec_string(self) -> str:
        return f"step:a={self.a!r},b={self.b!r}"


class TileTableWeight(Weight):
    """A weight constant on each tile of one grid layout.

    Its natural domain is the tiled strip; evaluation outside raises.  Box
    masses, and the base areas used in averages, are taken with respect to
    dA_alpha restricted to the strip, which keeps every average an honest
    average of the table values.
    """

    kind = "table"

    def __init__(self, table: TileFunction, source: str | None = None) -> None:
        for j, v in table.values.items():
            if v.size and (not np.isfinite(v).all() or (v <= 0.0).any()):
                raise ValueError(f"table weight has a non-positive entry at scale {j}")
        self.table = table
        self.source = source
        self._ones: TileFunction | None = None

    def _ones_table(self) -> TileFunction:
        if self._ones is None:
            self._ones = TileFunction.full(self.table.layout, 1.0)
        return self._ones

    def evaluate(self, x, y):
        xb, yb = np.broadcast_arrays(
            np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        )
        flat_x, flat_y = xb.ravel(), yb.ravel()
        fr, ex = np.frexp(flat_y)
        jj = np.where(fr == 0.5, ex - 1, ex).astype(int)
        lay = self.table.layout
        w = lay.window
        if (flat_y <= 0).any() or (jj < w.j_min).any() or (jj > w.j_max).any():
            raise ValueError("table weight evaluated outside its vertical band")
        out = np.empty(flat_x.shape)
        c = shift_numerator(lay.beta)
        for j in np.unique(jj):
            sel = jj == j
            s3 = scale_sign(int(j)) * c
            m = np.floor(np.ldexp(flat_x[sel], -int(j)) - s3 / 3.0).astype(int)
            idx = m - lay.m_lo(int(j))
            if (idx < 0).any() or (idx >= lay.count(int(j))).any():
                raise ValueError("table weight evaluated outside its window")
            out[sel] = self.table.values[int(j)][idx]
        return out.reshape(xb.shape)

    def power(self, t: float) -> "TileTableWeight":
        return TileTableWeight(self.table**t)

    def rect_mass(self, x_lo, x_hi, y_lo, y_hi, mu, q=None):
        return box_overlap_sum(self.table, mu, x_lo, x_hi, y_hi, y_lo)

    def base_rect_area(self, x_lo, x_hi, y_lo, y_hi, mu):
        return box_overlap_sum(self._ones_table(), mu, x_lo, x_hi, y_hi, y_lo)

    def spec_string(self) -> str:
        if self.source is None:
            raise ValueError(
                "table weight has no file yet; use save_weight_table first"
            )
        return f"table:path={self.source}"


def dual_weight(w: Weight, e: Exponents) -> Weight:
    """The conjugate-exponent companion w^(1-p')."""
    return w.power(e.dual_power)


# ---------------------------------------------------------------------------
# Box masses and ratios
# ---------------------------------------------------------------------------


def weighted_box_integral(
    w: Weight, box: CarlesonBox, mu: AlphaMeasure, q: QuadratureSpec | None = None
) -> float:
    """Integral of w dA_alpha over a Carleson box or its top half.

    Catalog weights use their closed-form or polar mass; the quadrature
    spec only matters for the cross-check path (quadrature_box_mass).
    """
    i = box.interval
    return w.rect_mass(i.left, i.right, box.y_lo, box.y_hi, mu, q)


def quadrature_box_mass(
    w: Weight, box: CarlesonBox, mu: AlphaMeasure, spec: QuadratureSpec | None = None
) -> float:
    """The same mass by blind tensor quadrature (vertical u-substitution).

    Intended as an independent check of the closed forms; splits the box at
    x = 0 so step weights stay smooth on each panel.
    """
    spec = spec or QuadratureSpec()
    i = box.interval
    edges = sorted({i.left, i.right} | ({0.0} if i.left < 0.0 < i.right else set()))
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        total += integrate_box(
            lambda X, Y: w.evaluate(X, Y), a, b, box.y_lo, box.y_hi, mu.alpha, spec
        )
    return total


def _average_pair(
    w: Weight, wd: Weight, box: CarlesonBox, mu: AlphaMeasure, q: QuadratureSpec | None
) -> tuple[float, float]:
    i = box.interval
    base_w = w.base_rect_area(i.left, i.right, box.y_lo, box.y_hi, mu)
    base_d = wd.base_rect_area(i.left, i.right, box.y_lo, box.y_hi, mu)
    return (
        weighted_box_integral(w, box, mu, q) / base_w,
        weighted_box_integral(wd, box, mu, q) / base_d,
    )


def bekolle_ratio(
    w: Weight,
    e: Exponents,
    mu: AlphaMeasure,
    i: Interval,
    q: QuadratureSpec | None = None,
) -> float:
    """(avg of w over Q_I) * (avg of w^(1-p') over Q_I)^(p-1)."""
    a_w, a_d = _average_pair(w, dual_weight(w, e), full_box(i), mu, q)
    return a_w * a_d ** (e.p - 1.0)


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoxFamily:
    """A finite search family of intervals whose Carleson boxes are scanned.

    modes:
      dyadic            all intervals of both shifted grids over `window`
      centered          intervals [-t, t] for t in a geometric ladder
      explicit          a user-provided interval list
      dyadic+centered   union of the first two
    """

    mode: str
    window: GridWindow | None = None
    ladder: tuple[float, ...] = ()
    intervals: tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        if self.mode not in ("dyadic", "centered", "explicit", "dyadic+centered"):
            raise ValueError(f"unknown family mode {self.mode!r}")
        if "dyadic" in self.mode and self.window is None:
            raise ValueError("dyadic family requires a window")
        if "centered" in self.mode and not self.ladder:
            raise ValueError("centered family requires a nonempty ladder")
        if self.mode == "explicit" and not self.intervals:
            raise ValueError("explicit family must be nonempty")

    @classmethod
    def dyadic(cls, window: GridWindow) -> "BoxFamily":
        return cls("dyadic", window=window)

    @classmethod
    def centered(cls, t_lo: float, t_hi: float, ratio: float = 2.0) -> "BoxFamily":
        if not (0.0 < t_lo <= t_hi) or ratio <= 1.0:
            raise ValueError("centered ladder needs 0 < t_lo <= t_hi and ratio > 1")
        ts = []
        t = t_lo
        while t <= t_hi * (1.0 + 1e-12):
            ts.append(t)
            t *= ratio
        return cls("centered", ladder=tuple(ts))

    @classmethod
    def explicit(cls, intervals: Iterable[Interval]) -> "BoxFamily":
        return cls("explicit", intervals=tuple(intervals))

    @classmethod
    def dyadic_and_centered(
        cls, window: GridWindow, t_lo: float, t_hi: float, ratio: float = 2.0
    ) -> "BoxFamily":
        ladder = cls.centered(t_lo, t_hi, ratio).ladder
        return cls("dyadic+centered", window=window, ladder=ladder)

    def members(self) -> Iterator[Interval]:
        if "dyadic" in self.mode:
            assert self.window is not None
            for beta in BETAS:
                for d in grid_intervals(beta, self.window):
                    yield d.realize()
        if "centered" in self.mode:
            for t in self.ladder:
                yield Interval(-t, 2.0 * t)
        if self.mode == "explicit":
            yield from self.intervals

    def size(self) -> int:
        return sum(1 for _ in self.members())


@dataclass(frozen=True)
class FamilyReport:
    """A family maximum together with where it was attained."""

    value: float
    worst: Interval
    searched: int


def _fold_family_max(
    fam: BoxFamily, ratio_fn: Callable[[Interval], float]
) -> FamilyReport:
    best = -math.inf
    worst: Interval | None = None
    n = 0
    for i in fam.members():
        n += 1
        try:
            r = ratio_fn(i)
        except QuadratureError as exc:
            raise QuadratureError(f"{exc} (interval [{i.left}, {i.right}))") from exc
        if r > best:
            best, worst = r, i
    if worst is None:
        raise ValueError("empty box family")
    return FamilyReport(best, worst, n)


def _table_dyadic_ratio_max(
    w: TileTableWeight, e: Exponents, mu: AlphaMeasure, window: GridWindow
) -> FamilyReport:
    """Exact max of the box ratio over both grids' boxes, by linear sweeps."""
    sums_w = two_grid_box_sums(w.table, mu)
    sums_d = two_grid_box_sums(w.table ** e.dual_power, mu)
    sums_1 = two_grid_box_sums(TileFunction.full(w.table.layout, 1.0), mu)
    best = -math.inf
    worst: Interval | None = None
    n = 0
    for beta in BETAS:
        lay = sums_w[beta][0]
        for j in lay.scales():
            area = sums_1[beta][1][j]
            if area.size == 0:
                continue
            with np.errstate(invalid="ignore", divide="ignore"):
                ratios = (sums_w[beta][1][j] / area) * (
                    sums_d[beta][1][j] / area
                ) ** (e.p - 1.0)
            ratios = np.where(area > 0.0, ratios, -np.inf)
            n += area.size
            k = int(np.argmax(ratios))
            if ratios[k] > best:
                best = float(ratios[k])
                worst = lay.interval(j, k).realize()
    assert worst is not None
    return FamilyReport(best, worst, n)


def bekolle_report(
    w: Weight,
    e: Exponents,
    mu: AlphaMeasure,
    fam: BoxFamily,
    q: QuadratureSpec | None = None,
) -> FamilyReport:
    """Family maximum of the box ratio, with the attaining interval.

    Table weights over a dyadic family whose window matches the table use
    the linear two-sweep path; everything else is evaluated box by box.
    """
    if (
        isinstance(w, TileTableWeight)
        and "dyadic" in fam.mode
        and fam.window == w.table.layout.window
    ):
        fast = _table_dyadic_ratio_max(w, e, mu, fam.window)
        if fam.mode == "dyadic":
            return fast
        rest = BoxFamily("centered", ladder=fam.ladder)
        slow = _fold_family_max(rest, lambda i: bekolle_ratio(w, e, mu, i, q))
        total = fast.searched + slow.searched
        return (
            FamilyReport(fast.value, fast.worst, total)
            if fast.value >= slow.value
            else FamilyReport(slow.value, slow.worst, total)
        )
    return _fold_family_max(fam, lambda i: bekolle_ratio(w, e, mu, i, q))


def bekolle_constant(
    w: Weight,
    e: Exponents,
    mu: AlphaMeasure,
    fam: BoxFamily,
    q: QuadratureSpec | None = None,
) -> float:
    """Max of the box ratio over the family: a certified lower bound for
    the supremum over all intervals."""
    return bekolle_report(w, e, mu, fam, q).value


def joint_b2_report(
    w: Weight,
    sigma: Weight,
    mu: AlphaMeasure,
    fam: BoxFamily,
    q: QuadratureSpec | None = None,
) -> FamilyReport:
    """Family maximum of (avg of w) * (avg of sigma^(-1)) over Carleson boxes."""
    sig_inv = sigma.power(-1.0)

    if (
        isinstance(w, TileTableWeight)
        and isinstance(sigma, TileTableWeight)
        and "dyadic" in fam.mode
        and fam.window == w.table.layout.window
        and sigma.table.layout.window == fam.window
        and sigma.table.layout.beta == w.table.layout.beta
    ):
        sums_w = two_grid_box_sums(w.table, mu)
        sums_s = two_grid_box_sums(sigma.table ** -1.0, mu)
        sums_1 = two_grid_box_sums(TileFunction.full(w.table.layout, 1.0), mu)
        best = -math.inf
        worst: Interval | None = None
        n = 0
        for beta in BETAS:
            lay = sums_w[beta][0]
            for j in lay.scales():
                area = sums_1[beta][1][j]
                if area.size == 0:
                    continue
                with np.errstate(invalid="ignore", divide="ignore"):
                    prods = (sums_w[beta][1][j] / area) * (sums_s[beta][1][j] / area)
                prods = np.where(area > 0.0, prods, -np.inf)
                n += area.size
                k = int(np.argmax(prods))
                if prods[k] > best:
                    best = float(prods[k])
                    worst = lay.interval(j, k).realize()
        assert worst is not None
        fast = FamilyReport(best, worst, n)
        if fam.mode == "dyadic":
            return fast
        rest: BoxFamily = BoxFamily("centered", ladder=fam.ladder)
    else:
        fast = None
        rest = fam

    def prod(i: Interval) -> float:
        a_w, a_s = _average_pair(w, sig_inv, full_box(i), mu, q)
        return a_w * a_s

    slow = _fold_family_max(rest, prod)
    if fast is None:
        return slow
    total = fast.searched + slow.searched
    return (
        FamilyReport(fast.value, fast.worst, total)
        if fast.value >= slow.value
        else FamilyReport(slow.value, slow.worst, total)
    )


def joint_b2_constant(
    w: Weight,
    sigma: Weight,
    mu: AlphaMeasure,
    fam: BoxFamily,
    q: QuadratureSpec | None = None,
) -> float:
    return joint_b2_report(w, sigma, mu, fam, q).value


# ---------------------------------------------------------------------------
# Weighted norms over a window
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormResult:
    """A norm value together with a truncation-tail estimate.

    tail bounds the p-th power mass *not* captured by the reported value
    (0 for exact paths and compactly supported integrands).
    """

    value: float
    tail: float


def lp_norm(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray] | None,
    w: Weight,
    e: Exponents,
    mu: AlphaMeasure,
    window: GridWindow,
    q: QuadratureSpec | None = None,
    *,
    radial: tuple[float, float] | None = None,
    compact_support: bool = False,
    decay: float | None = None,
) -> NormResult:
    """(integral of |f|^p w dA_alpha)^(1/p), with its truncation tail.

    Three paths:

    * radial=(s, R): |f| = |z|^s on {|z| <= R}.  Requires a constant or
      power weight; the integral collapses to an exact polar product over
      the full half-disc (no window truncation), tail = 0.
    * compact_support=True: f vanishes outside the window strip; tensor
      quadrature over the strip, tail = 0.
    * decay=eps: quadrature over the strip plus a far-field estimate
      assuming |f|^p w y^alpha <= C r^(-2-eps) beyond the strip's outer
      radius, with C sampled on that arc.
    """
    alpha = mu.alpha
    if radial is not None:
        s, radius = radial
        if isinstance(w, ConstantWeight):
            gamma, scale = 0.0, w.c
        elif isinstance(w, PowerWeight):
            gamma, scale = w.gamma, 1.0
        else:
            raise ValueError("radial norm path needs a constant or power weight")
        exponent = e.p * s + gamma + alpha + 2.0
        mass = scale * sin_power_integral(alpha) * radial_power_integral(
            exponent, 0.0, radius
        )
        return NormResult(mass ** (1.0 / e.p), 0.0)

    if f is None:
        raise ValueError("a function handle is required outside the radial path")
    if not compact_support and decay is None:
        raise ValueError(
            "pass radial=, compact_support=True, or decay= so the truncation "
            "tail can be reported"
        )

    spec = q or QuadratureSpec()
    total = 0.0
    p = e.p
    for j in range(window.j_min, window.j_max + 1):
        y_lo, y_hi = math.ldexp(1.0, j - 1), math.ldexp(1.0, j)
        panels = max(1, min(1024, math.ceil(window.width / y_hi)))
        edges = np.linspace(window.x_lo, window.x_hi, panels + 1)
        for a, b in zip(edges, edges[1:]):
            total += integrate_box(
                lambda X, Y: np.abs(f(X, Y)) ** p * w.evaluate(X, Y),
                float(a),
                float(b),
                y_lo,
                y_hi,
                alpha,
                spec,
            )

    tail = 0.0
    if not compact_support:
        assert decay is not None
        r_far = math.hypot(max(abs(window.x_lo), abs(window.x_hi)), window.y_ceil)
        thetas = np.linspace(1e-3, math.pi - 1e-3, 64)
        xs, ys = r_far * np.cos(thetas), r_far * np.sin(thetas)
        g = np.abs(f(xs, ys)) ** p * w.evaluate(xs, ys) * ys**alpha
        c = float((g * r_far ** (2.0 + decay)).max())
        tail = c * math.pi * r_far ** (-decay) / decay
    return NormResult(total ** (1.0 / p), tail)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def parse_weight(text: str) -> Weight:
    """Parse the text form: constant:c=.., power:gamma=.., step:a=..,b=..,
    table:path=.. (the table file holds `beta j m value` rows)."""
    kind, _, rest = text.strip().partition(":")
    params: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise ValueError(f"malformed weight parameter {item!r} in {text!r}")
            params[key.strip()] = val.strip()
    try:
        if kind == "constant":
            return ConstantWeight(float(params["c"]))
        if kind == "power":
            return PowerWeight(float(params["gamma"]))
        if kind == "step":
            return StepWeight(float(params["a"]), float(params["b"]))
        if kind == "table":
            return load_weight_table(params["path"])
    except KeyError as exc:
        raise ValueError(f"weight spec {text!r} is missing parameter {exc}") from exc
    raise ValueError(f"unknown weight kind {kind!r}")


def save_weight_table(w: TileTableWeight, path: str | Path) -> TileTableWeight:
    """Write a table weight as `beta j m value` rows.

    A leading `# window j_min j_max x_lo x_hi` comment pins the exact
    enumeration for round-tripping; readers ignore unknown comments.
    """
    lay = w.table.layout
    win = lay.window
    b = "0" if shift_numerator(lay.beta) == 0 else "1/3"
    lines = [f"# window {win.j_min} {win.j_max} {win.x_lo!r} {win.x_hi!r}"]
    for j in lay.scales():
        m0 = lay.m_lo(j)
        for i, v in enumerate(w.table.values[j]):
            lines.append(f"{b} {j} {m0 + i} {float(v)!r}")
    Path(path).write_text("\n".join(lines) + "\n")
    return TileTableWeight(w.table, source=str(path))


def load_weight_table(path: str | Path) -> TileTableWeight:
    """Read `beta j m value` rows back into a table weight.

    Without a window comment the window is inferred as the tightest range
    consistent with the listed tiles; either way the rows must cover the
    enumeration exactly, with positive values.
    """
    rows: list[tuple[float, int, int, float]] = []
    window: GridWindow | None = None
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts[:1] == ["window"] and len(parts) == 5:
                window = GridWindow(
                    int(parts[1]), int(parts[2]), float(parts[3]), float(parts[4])
                )
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"{path}:{ln}: expected 'beta j m value'")
        beta = {"0": 0.0, "1/3": BETAS[1]}.get(parts[0])
        if beta is None:
            beta = float(parts[0])
            if beta not in BETAS:
                raise ValueError(f"{path}:{ln}: unrecognized shift {parts[0]!r}")
        rows.append((beta, int(parts[1]), int(parts[2]), float(parts[3])))
    if not rows:
        raise ValueError(f"{path}: no tile rows")
    betas = {r[0] for r in rows}
    if len(betas) != 1:
        raise ValueError(f"{path}: a table weight lives on a single grid")
    beta = betas.pop()

    if window is None:
        per_scale: dict[int, list[int]] = {}
        for _, j, m, _v in rows:
            per_scale.setdefault(j, []).append(m)
        j_min, j_max = min(per_scale), max(per_scale)
        c = shift_numerator(beta)
        x_lo = max(
            math.ldexp(min(ms) + scale_sign(j) * c / 3.0, j)
            for j, ms in per_scale.items()
        )
        x_hi = min(
            math.ldexp(max(ms) + 1 + scale_sign(j) * c / 3.0, j)
            for j, ms in per_scale.items()
        )
        window = GridWindow(j_min, j_max, x_lo, x_hi)

    layout = GridLayout(beta, window)
    seen = {j: np.zeros(layout.count(j), dtype=bool) for j in layout.scales()}
    tf = TileFunction.zeros(layout)
    for _, j, m, v in rows:
        i = layout.index(j, m)
        if i < 0:
            raise ValueError(f"{path}: tile ({j}, {m}) outside the window")
        if seen[j][i]:
            raise ValueError(f"{path}: duplicate tile ({j}, {m})")
        seen[j][i] = True
        tf.values[j][i] = v
    for j, mask in seen.items():
        if not mask.all():
            m = layout.m_lo(j) + int(np.flatnonzero(~mask)[0])
            raise ValueError(f"{path}: missing tile ({j}, {m}); weights must cover the window")
    return TileTableWeight(tf, source=str(path))
