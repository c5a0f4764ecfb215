"""Ray scans, section-count scans, and finite-horizon exponent estimators.

A ray scan samples a_s = s*A + D along a geometric grid s = base^(-q),
reduces each point once, and records the volume, the raw ratio
log vol / log s, the distance proxy phi, and the gallery word length.  A
section scan samples G_m = rounddown(m*D) + A over integer m, records
h0 = h0_nef_big after reduction, and carries the two sandwich columns
lower = (G^N)/N! and upper = C_N (G^N)/N!, exact integers whose row-wise
inequality lower <= h0 <= upper ties the chamber and volume modules
together on every scanned class.

Estimator conventions (all finite-horizon, all labeled estimates):

* windowed least-squares slopes of log vol against log s measure the local
  decay exponent; along an oscillating ray they plateau at 1 on climbs into
  a cusp and at N-1 on descents, and cross N/2 at the turning points.
* the liminf/limsup exponents delta^inf/delta^sup are limits of the raw
  ratio, not of local slopes, so delta_inf_hat and delta_sup_hat are the
  ratio extremes over the deep half of the grid (t >= t_max/2); the shallow
  half is discarded because the additive constants in log vol bias the
  ratio by O(1/t).
* kappa estimators restrict the h0 ratio log h0 / log m to designated
  subsequences: valleys (excursion return times) estimate the liminf
  kappa^{R,-}, hills (excursion midpoints) estimate the limsup kappa^{R,+}.
* nu_vol is estimated as N - delta_sup_hat.

Hills and valleys are designated from the schedule itself: excursion n
occupies [T_{n-1}, T_n] with T_n = 2(log k_1 + ... + log k_n) the realized
return time; its midpoint T_{n-1} + log k_n is the hill (phi apex of height
log k_n), its return T_n the valley (phi back to O(1)).  Both times have
e^{2t} integral, so the designated m = e^{2t} are computed as exact
integers (hill: k_n^2 prod_{i<n} k_i^4; valley: prod_{i<=n} k_i^4) and
s = 1/(m - 1) is exact as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import mpmath

from .boundary import BoundaryPointSpec, materialize_with_certificate
from .chamber import reduce_to_chamber
from .cusp import ExcursionSchedule
from .errors import InvalidSpec, NotNef, WehlerError
from .lattice import (
    LatticeVector,
    as_int_coords,
    norm_sq,
    to_context,
    vector,
)
from .scalars import Context, FLOAT_CTX
from .volume import h0_nef_big, sandwich_constant, symmetric_profile

DEFAULT_WINDOW = 5


def _as_mpf(x):
    """mpf view of a row scalar; Fractions convert without float round."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


@dataclass(frozen=True)
class RayScanRow:
    s: object
    t: object
    vol: object
    log_vol_over_log_s: object
    phi: object
    word_length: int
    clamped: bool


@dataclass(frozen=True)
class RayScanTable:
    rows: tuple
    metadata: dict

    def __post_init__(self):
        prev = None
        for row in self.rows:
            if prev is not None and not row.s < prev:
                raise InvalidSpec("ray scan grid must be strictly decreasing in s")
            prev = row.s


@dataclass(frozen=True)
class SectionScanRow:
    m: int
    h0: int
    log_h0_over_log_m: object
    word_length: int
    lower: int  # (G^N)/N! = 2 tau_N of the reduced class
    upper: int  # C_N (G^N)/N!


@dataclass(frozen=True)
class SectionScanTable:
    rows: tuple
    metadata: dict

    def __post_init__(self):
        prev = None
        for row in self.rows:
            if prev is not None and not row.m > prev:
                raise InvalidSpec("section scan grid must be strictly increasing in m")
            if row.h0 <= 0:
                raise InvalidSpec("section counts must be positive")
            prev = row.m


@dataclass(frozen=True)
class SubsequenceDesignation:
    """Hill/valley targets derived from an excursion schedule, in all three
    parametrizations: the m entries are exact integers equal to e^{2t}, the
    s entries are the exact rationals 1/(m-1), and the t entries are
    (log m)/2 rounded once at the requested precision."""

    hills_t: tuple
    valleys_t: tuple
    hills_s: tuple
    valleys_s: tuple
    hills_m: tuple
    valleys_m: tuple
    derivation: str


def _require_ample(a: LatticeVector):
    with a.ctx.work():
        thr = a.ctx.eps()
        if not all(c > thr for c in a.coords):
            raise NotNef("A must be ample (all coordinates positive)")


def _reduce_stats(v: LatticeVector, max_steps=None):
    """One reduction serving volume, tau_1 and word length.

    max_steps None keeps the library's default step cap so a bad input
    surfaces as StepCapExceeded instead of an unbounded loop.
    """
    if max_steps is None:
        res = reduce_to_chamber(v)
    else:
        res = reduce_to_chamber(v, max_steps=max_steps)
    taus = symmetric_profile(res.reduced)
    n = v.n
    vol = 2 * factorial(n) * taus[n]
    return vol, taus[1], res.word.length, res.clamped


def ray_scan(
    d_spec,
    a: LatticeVector,
    qs,
    base: int = 2,
    ctx: Context | None = None,
    truncation_depth: int | None = None,
    max_steps=None,
) -> RayScanTable:
    """Sample vol(s*A + D), phi and word length over s = base^(-q)."""
    if isinstance(d_spec, BoundaryPointSpec):
        d_vec, cert = materialize_with_certificate(d_spec, ctx, truncation_depth)
        d_desc = describe_spec(d_spec)
    else:
        d_vec, cert = (to_context(d_spec, ctx) if ctx else d_spec), None
        d_desc = repr(d_vec)
    ctx = d_vec.ctx
    a = to_context(a, ctx)
    if a.n != d_vec.n:
        raise InvalidSpec("A and D have different ranks")
    _require_ample(a)
    qs = list(qs)
    if any(q2 <= q1 for q1, q2 in zip(qs, qs[1:])):
        raise InvalidSpec("q grid must be strictly increasing")
    rows = []
    n = d_vec.n
    with ctx.work():
        for q in qs:
            if ctx.is_exact:
                if int(q) != q:
                    raise InvalidSpec(
                        "the exact backend needs integer grid exponents q"
                    )
                qi = int(q)
                s = ctx.make(
                    Fraction(1, base**qi) if qi >= 0 else base ** (-qi)
                )
            else:
                s = ctx.make(base) ** ctx.make(-q)
            point = a.scale(s) + d_vec
            try:
                vol, tau1, wlen, clamped = _reduce_stats(point, max_steps)
            except WehlerError as exc:
                raise type(exc)(f"at s = base^(-{q}): {exc}") from exc
            log_s = ctx.log(s)
            if not vol > 0:
                raise WehlerError(
                    f"volume vanished at s = base^(-{q}); raise precision"
                )
            ratio = ctx.log(vol) / log_s
            t = ctx.log((1 + s) / s) / 2
            nrm2 = norm_sq(point)
            # chamber-position proxy; undefined off the timelike cone, so
            # rows whose class went spacelike leave the column blank
            phi = ctx.log(tau1) - ctx.log(nrm2) / 2 if nrm2 > 0 else None
            rows.append(
                RayScanRow(s, t, vol, ratio, phi, wlen, clamped)
            )
    meta = {
        "n": n,
        "d": d_desc,
        "a": tuple(ctx.to_str(c) for c in a.coords),
        "backend": ctx.backend,
        "precision": ctx.prec,
        "grid": (
            f"s = {base}^-q, q in {qs[0]}..{qs[-1]} ({len(qs)} points)"
            if qs
            else "empty"
        ),
        "truncation_certificate": None
        if cert is None or cert.final_increment is None
        else mpmath.nstr(_as_mpf(cert.final_increment), 8),
    }
    return RayScanTable(tuple(rows), meta)


def _lsq_slope(xs, ys):
    k = len(xs)
    xbar = sum(xs) / k
    ybar = sum(ys) / k
    num = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    den = sum((x - xbar) ** 2 for x in xs)
    return num / den


def windowed_slopes(table: RayScanTable, window: int = DEFAULT_WINDOW):
    """Per-window least-squares slope of log vol vs log s; returns a list of
    (center_t, slope) with one entry per window of consecutive rows."""
    rows = table.rows
    if len(rows) < window + 2:
        raise InvalidSpec(
            f"need at least {window + 2} rows for window {window}"
        )
    prec = table.metadata.get("precision", FLOAT_CTX.prec)
    out = []
    with mpmath.workprec(prec):
        log_s = [mpmath.log(_as_mpf(r.s)) for r in rows]
        log_v = [mpmath.log(_as_mpf(r.vol)) for r in rows]
        for i in range(len(rows) - window + 1):
            xs = log_s[i : i + window]
            ys = log_v[i : i + window]
            center = rows[i + window // 2].t
            out.append((center, _lsq_slope(xs, ys)))
    return out


def fitted_slope(table: RayScanTable, skip: int = 0):
    """Single least-squares slope of log vol against log s over rows[skip:]."""
    rows = table.rows[skip:]
    if len(rows) < 2:
        raise InvalidSpec("need at least two rows to fit a slope")
    prec = table.metadata.get("precision", FLOAT_CTX.prec)
    with mpmath.workprec(prec):
        xs = [mpmath.log(_as_mpf(r.s)) for r in rows]
        ys = [mpmath.log(_as_mpf(r.vol)) for r in rows]
        return _lsq_slope(xs, ys)


def slope_estimates(table: RayScanTable, window: int = DEFAULT_WINDOW) -> dict:
    """Finite-horizon exponent readings from one ray scan.

    delta_inf_hat / delta_sup_hat are the ratio extremes over the deep half
    of the grid (t >= t_max / 2); slope_min / slope_max are the windowed
    least-squares extremes over the whole grid, with the window-center
    times where they occur.
    """
    slopes = windowed_slopes(table, window)
    rows = table.rows
    t_max = rows[-1].t
    deep = [r for r in rows if 2 * r.t >= t_max]
    if len(deep) < 2:
        deep = list(rows[len(rows) // 2 :])
    ratios = [(r.log_vol_over_log_s, r.t) for r in deep]
    all_ratios = [(r.log_vol_over_log_s, r.t) for r in rows]
    slope_min = min(slopes, key=lambda p: p[1])
    slope_max = max(slopes, key=lambda p: p[1])
    return {
        "delta_inf_hat": min(ratios)[0],
        "delta_sup_hat": max(ratios)[0],
        "delta_inf_at_t": min(ratios)[1],
        "delta_sup_at_t": max(ratios)[1],
        "ratio_min": min(all_ratios)[0],
        "ratio_max": max(all_ratios)[0],
        "slope_min": slope_min[1],
        "slope_min_at_t": slope_min[0],
        "slope_max": slope_max[1],
        "slope_max_at_t": slope_max[0],
        "window": window,
        "horizon_t": t_max,
    }


def designated_subsequences(
    schedule: ExcursionSchedule,
    horizon,
    prec: int = 128,
) -> SubsequenceDesignation:
    """Hill (midpoint) and valley (return) targets of a schedule up to time
    ``horizon``; errors when the horizon outruns the schedule.

    Excursion n has realized length 2 log k_n, so e^{2t} at its midpoint
    and return are the exact integers k_n^2 prod_{i<n} k_i^4 and
    prod_{i<=n} k_i^4.  Those integers are the m designations; the
    corresponding s = 1/(m-1) exactly, and t = (log m)/2 is the only
    rounded quantity.
    """
    hill_ms, valley_ms = [], []
    past = 1  # prod_{i<n} k_i^4
    for _, k in schedule.steps:
        hill_ms.append(past * k * k)
        past *= k**4
        valley_ms.append(past)
    hills_t, valleys_t = [], []
    hills_s, valleys_s = [], []
    hills_m, valleys_m = [], []
    with mpmath.workprec(prec):
        horizon_f = _as_mpf(horizon)
        slack = 1 + mpmath.mpf(2) ** (-prec // 2)
        last_return = mpmath.log(mpmath.mpf(valley_ms[-1])) / 2
        if horizon_f > last_return * slack:
            raise InvalidSpec(
                "horizon extends beyond the schedule's total excursion time"
            )
        for ms, out_t, out_s, out_m in (
            (hill_ms, hills_t, hills_s, hills_m),
            (valley_ms, valleys_t, valleys_s, valleys_m),
        ):
            for m in ms:
                t = mpmath.log(mpmath.mpf(m)) / 2
                if t <= horizon_f * slack:
                    out_t.append(t)
                    out_s.append(Fraction(1, m - 1))
                    out_m.append(m)
    derivation = (
        f"schedule of {len(schedule)} excursions on support {schedule.support}"
    )
    return SubsequenceDesignation(
        tuple(hills_t),
        tuple(valleys_t),
        tuple(hills_s),
        tuple(valleys_s),
        tuple(hills_m),
        tuple(valleys_m),
        derivation,
    )


def rounddown(v: LatticeVector) -> LatticeVector:
    """Coordinate-wise floor in the omega basis (floor(-1/2) = -1)."""
    out = []
    with v.ctx.work():
        for c in v.coords:
            if isinstance(c, Fraction):
                out.append(c.numerator // c.denominator)
            elif isinstance(c, int):
                out.append(c)
            else:
                out.append(int(mpmath.floor(c)))
    return vector(v.n, out, v.ctx)


def h0_scan(
    d_spec,
    a: LatticeVector,
    m_grid,
    ctx: Context | None = None,
    truncation_depth: int | None = None,
    max_steps=None,
) -> SectionScanTable:
    """Sample h0(rounddown(m*D) + A) with the row-wise volume sandwich.

    A must be integral with every coordinate >= 2: the floor loses less
    than 1 per coordinate, so G - m*D stays coordinatewise >= 1 and every
    scanned class is the sum of a pseudoeffective one and an ample one.
    Each row carries lower = (G^N)/N! and upper = C_N (G^N)/N!, computed
    exactly from the reduced class, with lower <= h0 <= upper.
    """
    if isinstance(d_spec, BoundaryPointSpec):
        d_vec, _ = materialize_with_certificate(d_spec, ctx, truncation_depth)
        d_desc = describe_spec(d_spec)
    else:
        d_vec = to_context(d_spec, ctx) if ctx else d_spec
        d_desc = repr(d_vec)
    ctx = d_vec.ctx
    a = to_context(a, ctx)
    if a.n != d_vec.n:
        raise InvalidSpec("A and D have different ranks")
    a_int = as_int_coords(a)
    if min(a_int) < 2:
        raise InvalidSpec(
            "A needs integer coordinates >= 2 to dominate the rounding error"
        )
    n = d_vec.n
    c_n = sandwich_constant(n)
    ms = [int(m) for m in m_grid]
    if any(m2 <= m1 for m1, m2 in zip(ms, ms[1:])) or (ms and ms[0] < 1):
        raise InvalidSpec("m grid must be strictly increasing positive integers")
    rows = []
    skipped = []
    with ctx.work():
        for m in ms:
            floor_md = rounddown(d_vec.scale(m))
            g = vector(
                n,
                tuple(
                    int(c) + ai
                    for c, ai in zip(as_int_coords(floor_md), a_int)
                ),
            )
            res = (
                reduce_to_chamber(g, max_steps=max_steps)
                if max_steps is not None
                else reduce_to_chamber(g)
            )
            reduced_int = as_int_coords(res.reduced)
            if sum(1 for c in reduced_int if c == 0) > 1:
                skipped.append((m, "reduced class is not big"))
                continue
            h0 = h0_nef_big(res.reduced)
            # sandwich: (G^N)/N! <= h0 <= C_N (G^N)/N!, all exact integers
            taus = [0] * (n + 1)
            taus[0] = 1
            for x in reduced_int:
                for j in range(n, 0, -1):
                    taus[j] = taus[j] + x * taus[j - 1]
            lower = 2 * taus[n]
            upper = c_n * lower
            # log m = 0 at m = 1; the ratio column starts at the second row
            ratio = (
                ctx.log(ctx.make(h0)) / ctx.log(ctx.make(m)) if m > 1 else None
            )
            rows.append(
                SectionScanRow(m, h0, ratio, res.word.length, lower, upper)
            )
    meta = {
        "n": n,
        "d": d_desc,
        "a": a_int,
        "backend": ctx.backend,
        "precision": ctx.prec,
        "rounding": "coordinate-wise floor in the omega basis",
        "sandwich_constant": c_n,
        "skipped": tuple(skipped),
    }
    return SectionScanTable(tuple(rows), meta)


def _nearest_rows(rows, targets, max_log_gap=1.4):
    """Scan row nearest to each target m by |log(m/target)|, dropping
    targets farther than max_log_gap (factor ~4) from every row."""
    out = []
    with mpmath.workprec(64):
        gap = mpmath.mpf(max_log_gap)
        for tm in targets:
            lt = mpmath.log(mpmath.mpf(tm))
            best, best_d = None, None
            for row in rows:
                d = abs(mpmath.log(mpmath.mpf(row.m)) - lt)
                if best_d is None or d < best_d:
                    best, best_d = row, d
            if best is not None and best_d <= gap:
                out.append(best)
    return out


def kappa_estimates(table: SectionScanTable, designation: SubsequenceDesignation) -> dict:
    """Numerical-dimension readings from a section scan restricted to the
    designated subsequences; grid extremes are reported separately and are
    finite-horizon estimates.

    Designated m are matched to the nearest scanned m on the log scale so
    grids that merely bracket a target still count it; targets more than a
    factor ~4 from every scanned row are dropped.
    """
    if not table.rows:
        raise InvalidSpec("empty section scan")
    usable = [r for r in table.rows if r.m > 1]
    valley_rows = _nearest_rows(usable, designation.valleys_m)
    hill_rows = _nearest_rows(usable, designation.hills_m)
    if not valley_rows or not hill_rows:
        raise InvalidSpec(
            "designation does not intersect the scanned m grid"
        )
    valley_ratios = [r.log_h0_over_log_m for r in valley_rows]
    hill_ratios = [r.log_h0_over_log_m for r in hill_rows]
    grid_ratios = [r.log_h0_over_log_m for r in table.rows if r.m > 1]
    return {
        "kappa_R_minus_hat": min(valley_ratios),
        "kappa_R_plus_hat": max(hill_ratios),
        "kappa_sup_hat": max(grid_ratios),
        "grid_min": min(grid_ratios),
        "grid_max": max(grid_ratios),
        "valley_ms": tuple(r.m for r in valley_rows),
        "hill_ms": tuple(r.m for r in hill_rows),
        "horizon_m": table.rows[-1].m,
    }


def nu_vol_estimate(table: RayScanTable, window: int = DEFAULT_WINDOW):
    """N - delta_sup_hat: the R-valued volume numerical dimension estimate."""
    est = slope_estimates(table, window)
    n = table.metadata["n"]
    return n - est["delta_sup_hat"]


def describe_spec(spec: BoundaryPointSpec) -> str:
    parts = [f"n={spec.n}"]
    if spec.word.length:
        parts.append(f"word length {spec.word.length}")
    if spec.divergent:
        parts.append(
            "divergent {"
            + ", ".join(f"{t}: {c}" for t, c in spec.divergent)
            + "}"
        )
    if spec.recurrent is not None:
        kind = (
            "schedule"
            if isinstance(spec.recurrent, ExcursionSchedule)
            else "explicit"
        )
        parts.append(f"recurrent {kind} on {tuple(spec.recurrent.support)}")
    return "; ".join(parts)
