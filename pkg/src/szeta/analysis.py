"""Zero counting, localization, dimension solve, and grid statistics.

The zero counters integrate Z'/Z counterclockwise around rectangles with
adaptive Gauss-Legendre panels (argument principle); the dimension solve
brackets the largest real zero by a downward scan and polishes it with a
bisection-safeguarded Newton iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import (
    ContourNearZero,
    MaxIterations,
    NonIntegerResult,
    NoSignChange,
)
from .zeta import ZetaSeries

GL_ORDER = 16
QUAD_TOL = 1e-8
CONTOUR_FLOOR = 1e-8
_MAX_SPLIT_DEPTH = 48
# split-line offsets tried when a child contour lands on a zero
_SPLIT_FRACTIONS = (0.5, 0.53, 0.47, 0.57, 0.43, 0.61)


@dataclass(frozen=True)
class Rectangle:
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"degenerate rectangle {self}")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    def corners(self) -> list[complex]:
        return [complex(self.x0, self.y0), complex(self.x1, self.y0),
                complex(self.x1, self.y1), complex(self.x0, self.y1)]


@dataclass(frozen=True)
class ZeroCount:
    integral: complex       # contour integral / (2 pi i)
    count: int
    residual: float
    panels: int


@dataclass(frozen=True)
class DimensionResult:
    delta: float
    iterations: int
    bracket: tuple[float, float]
    residual: float


@dataclass(frozen=True)
class DensityRow:
    y: float
    count: int
    statistic: float        # log N / log y - 1, NaN when undefined


@dataclass(frozen=True)
class LogZRow:
    s_re: float
    s_im: float
    abs_z: float
    statistic: float        # log log|Z| / log|s|, NaN when undefined


def _value_fn(target):
    """Normalize a ZetaSeries or an (f, f') pair of vectorized callables
    to one callable s_array -> (z_array, dz_array)."""
    if isinstance(target, ZetaSeries):
        return target.evaluate_batch
    if isinstance(target, tuple) and len(target) == 2:
        f, df = target
        return lambda s: (np.asarray(f(s)), np.asarray(df(s)))
    if callable(target):
        return target
    raise TypeError(f"cannot evaluate {type(target).__name__} on the plane")


class _LogDeriv:
    """Z'/Z as a vectorized integrand, tracking the smallest |Z| seen."""

    def __init__(self, fn):
        self.fn = fn
        self.min_abs = math.inf
        self.evaluations = 0

    def __call__(self, s):
        z, dz = self.fn(s)
        self.evaluations += len(s)
        small = float(np.min(np.abs(z)))
        if small < self.min_abs:
            self.min_abs = small
        with np.errstate(divide="ignore", invalid="ignore"):
            return dz / z


def _adaptive_line(g, a: complex, b: complex, tol: float, x: np.ndarray,
                   w: np.ndarray, depth: int) -> tuple[complex, int]:
    """Adaptive Gauss-Legendre integral of g along the segment [a, b].

    A panel is accepted when halving changes it by less than tol; the
    tolerance is per panel (absolute), so the total error scales with the
    panel count, which the integer-residual check absorbs.
    """
    def gl(lo, hi):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        return half * np.dot(w, g(mid + half * x))

    def recurse(lo, hi, whole, level):
        mid = 0.5 * (lo + hi)
        left = gl(lo, mid)
        right = gl(mid, hi)
        if abs(left + right - whole) <= tol or level >= depth:
            return left + right, 2
        lv, lp = recurse(lo, mid, left, level + 1)
        rv, rp = recurse(mid, hi, right, level + 1)
        return lv + rv, lp + rp

    return recurse(a, b, gl(a, b), 0)


def _sample_floor(g: _LogDeriv, fn, region: Rectangle, floor: float) -> None:
    corners = region.corners()
    pts = []
    for k in range(4):
        a, b = corners[k], corners[(k + 1) % 4]
        t = np.linspace(0.0, 1.0, 33)
        pts.append(a + t * (b - a))
    z, _ = fn(np.concatenate(pts))
    small = float(np.min(np.abs(z)))
    if small < floor:
        raise ContourNearZero(
            f"|Z| = {small:.3e} on the boundary of {region}; "
            f"shift the rectangle")


def count_zeros(target, region: Rectangle, quad_tol: float = QUAD_TOL, *,
                order: int = GL_ORDER, floor: float = CONTOUR_FLOOR,
                max_retries: int = 3) -> ZeroCount:
    """Number of zeros inside the rectangle by the argument principle."""
    fn = _value_fn(target)
    g = _LogDeriv(fn)
    _sample_floor(g, fn, region, floor)
    x, w = leggauss(order)
    corners = region.corners()
    tol = quad_tol
    for _ in range(max_retries + 1):
        total = 0.0 + 0.0j
        panels = 0
        for k in range(4):
            val, p = _adaptive_line(g, corners[k], corners[(k + 1) % 4],
                                    tol, x, w, _MAX_SPLIT_DEPTH)
            total += val
            panels += p
        if g.min_abs < floor:
            raise ContourNearZero(
                f"|Z| = {g.min_abs:.3e} at a quadrature node on {region}; "
                f"shift the rectangle")
        value = total / (2.0j * math.pi)
        count = int(round(value.real))
        residual = abs(value - count)
        if residual < 0.25:
            return ZeroCount(integral=complex(value), count=count,
                             residual=float(residual), panels=panels)
        tol /= 16.0
    raise NonIntegerResult(
        f"contour count {value} did not stabilise on an integer "
        f"over {region}")


def locate_zeros(target, region: Rectangle, resolution: float,
                 quad_tol: float = QUAD_TOL, *,
                 floor: float = CONTOUR_FLOOR
                 ) -> list[tuple[Rectangle, int]]:
    """Quadrisection of the region into boxes of diameter below
    `resolution`, each carrying its zero count; empty boxes are dropped."""
    parent = count_zeros(target, region, quad_tol, floor=floor)
    return _locate(target, region, parent.count, resolution, quad_tol, floor)


def _locate(target, region, count, resolution, quad_tol, floor):
    if count == 0:
        return []
    if max(region.width, region.height) <= resolution:
        return [(region, count)]
    last_error: Exception | None = None
    for fx in _SPLIT_FRACTIONS:
        for fy in _SPLIT_FRACTIONS:
            xm = region.x0 + fx * region.width
            ym = region.y0 + fy * region.height
            quads = [Rectangle(region.x0, xm, region.y0, ym),
                     Rectangle(xm, region.x1, region.y0, ym),
                     Rectangle(region.x0, xm, ym, region.y1),
                     Rectangle(xm, region.x1, ym, region.y1)]
            try:
                counted = [count_zeros(target, q, quad_tol, floor=floor)
                           for q in quads]
            except (ContourNearZero, NonIntegerResult) as exc:
                last_error = exc
                continue
            if sum(c.count for c in counted) != count:
                last_error = NonIntegerResult(
                    f"child counts do not sum to {count} over {region}")
                continue
            out = []
            for q, c in zip(quads, counted):
                out.extend(_locate(target, q, c.count, resolution,
                                   quad_tol, floor))
            return out
        if last_error is None:  # pragma: no cover
            break
    raise last_error if last_error is not None else NonIntegerResult(
        f"could not split {region}")


def dimension(series: ZetaSeries, tol: float = 1e-10, *,
              scan_from: float = 1.0, scan_step: float = 0.05,
              scan_to: float = 0.02, max_iter: int = 100
              ) -> DimensionResult:
    """Largest real zero of Z_M on (0, 1).

    Scans downward from scan_from until Z changes sign, then runs Newton
    from the bracket midpoint, falling back to bisection whenever a step
    leaves the current bracket.
    """

    def f(x):
        v = series.evaluate(x)
        return v.z.real, v.dz.real

    s_hi = scan_from
    z_hi, _ = f(s_hi)
    bracket = None
    while s_hi - scan_step >= scan_to - 1e-12:
        s_lo = s_hi - scan_step
        z_lo, _ = f(s_lo)
        if z_lo == 0.0:
            return DimensionResult(delta=s_lo, iterations=0,
                                   bracket=(s_lo, s_hi), residual=0.0)
        if z_lo * z_hi < 0.0:
            bracket = (s_lo, s_hi)
            break
        s_hi, z_hi = s_lo, z_lo
    if bracket is None:
        raise NoSignChange(
            f"no sign change of Z on [{scan_to}, {scan_from}]; "
            f"increase M or check the group")
    lo, hi = bracket
    zlo, _ = f(lo)
    x = 0.5 * (lo + hi)
    for it in range(1, max_iter + 1):
        z, dz = f(x)
        if z == 0.0:
            return DimensionResult(delta=x, iterations=it, bracket=bracket,
                                   residual=0.0)
        if zlo * z < 0.0:
            hi = x
        else:
            lo, zlo = x, z
        xn = x - z / dz if dz != 0.0 else math.inf
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) < tol:
            residual = abs(series.evaluate(xn).z)
            return DimensionResult(delta=xn, iterations=it, bracket=bracket,
                                   residual=float(residual))
        x = xn
    raise MaxIterations(f"Newton did not converge within {max_iter} steps")


def density_grid(series: ZetaSeries, x0: float, y_max: float,
                 samples: int, *, x1: float = 10.0, y0: float = -0.1,
                 y_start: float = 2.0, quad_tol: float = QUAD_TOL,
                 floor: float = CONTOUR_FLOOR,
                 nudge_tries: int = 6) -> list[DensityRow]:
    """Cumulative zero counts N(y) of the strip [x0, x1] x [y0, y] on a
    log-spaced y grid, with the density statistic log N / log y - 1.

    The count is one-sided (y > y0 = -0.1); off-axis zeros pair up under
    conjugation, so the two-sided count is 2N minus the real zeros in the
    strip.  Strip tops that land on a zero are nudged upward slightly and
    the adjusted y is reported in the row.
    """
    if y_start <= 1.0:
        raise ValueError("y_start must exceed 1 for the log-y statistic")
    ys = np.geomspace(y_start, y_max, samples)
    rows = []
    total = 0
    bottom = y0
    for y in ys:
        top = float(y)
        last_exc: Exception | None = None
        for k in range(nudge_tries + 1):
            try:
                strip = Rectangle(x0, x1, bottom, top)
                piece = count_zeros(series, strip, quad_tol, floor=floor)
                last_exc = None
                break
            except ContourNearZero as exc:
                last_exc = exc
                top *= 1.0 + 0.004 * (k + 1)
        if last_exc is not None:
            raise last_exc
        total += piece.count
        stat = math.log(total) / math.log(top) - 1.0 if total > 0 else math.nan
        rows.append(DensityRow(y=top, count=total, statistic=stat))
        bottom = top
    return rows


def logz_grid(series: ZetaSeries, region: Rectangle, samples: int, *,
              im_log: bool = False) -> list[LogZRow]:
    """|Z| and the growth statistic log log|Z| / log|s| on a samples x
    samples grid over the rectangle; NaN where the statistic is undefined
    (|Z| <= 1 or |s| = 1)."""
    res = np.linspace(region.x0, region.x1, samples)
    if im_log:
        lo = max(region.y0, 1e-3)
        ims = np.geomspace(lo, region.y1, samples)
    else:
        ims = np.linspace(region.y0, region.y1, samples)
    grid = (res[None, :] + 1j * ims[:, None]).ravel()
    z, _ = series.evaluate_batch(grid)
    absz = np.abs(z)
    rows = []
    for s, az in zip(grid, absz):
        mod = abs(s)
        if az > 1.0 and mod > 0.0 and abs(math.log(mod)) > 1e-12:
            stat = math.log(math.log(az)) / math.log(mod)
        else:
            stat = math.nan
        rows.append(LogZRow(s_re=float(s.real), s_im=float(s.imag),
                            abs_z=float(az), statistic=stat))
    return rows
