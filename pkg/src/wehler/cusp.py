"""Cusp geometry on the positive light cone.

The isotropic rays omega_hat(i,j) = u - omega_i - omega_j label the cusps.
For a future timelike v the height into cusp {i,j} is

    Ht_{ij}(v) = sqrt(pair(v,v)) / pair(v, omega_hat(i,j)),

a scale-invariant quantity; horoballs are its superlevel sets.  Along a ray
a_s = s*a + p the geodesic time is t = (1/2) log((1+s)/s), inverted by
s = e^(-2t)/(1 - e^(-2t)).

A cusp excursion is the unipotent power (sigma_i sigma_j)^k; it carries a
geodesic to phi-depth about log k inside the horoball and back out, so it
occupies a t-interval of realized length 2 log k (the in-leg and the out-leg
each take log k).  Schedules are parametrized by nominal lengths ell_n with
k_n = round(exp(ell_n)); realized quantities below always come from the
integer k_n, never from ell_n.  Concatenating excursion words e_1 e_2 ... e_d
(consecutive cusps adjacent, i.e. sharing exactly one index) and applying
them to u produces directions that converge projectively; the limit is a
recurrent boundary direction.  Convergence is certified from the successive
projective increments, never assumed.

The distance proxy phi is log vol_1 of the reduced, norm-one representative;
it tracks hyperbolic distance to the basepoint up to additive constants and
reuses the chamber reduction that the volume computations need anyway.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .chamber import Word, apply_word, reduce_to_chamber
from .errors import (
    InvalidSpec,
    NonConvergent,
    NonTimelike,
    WehlerError,
    ZeroPairing,
)
from .lattice import LatticeVector, omega_hat, pair, u_vector, vector
from .scalars import EXACT_CTX, FLOAT_CTX, Context

DEFAULT_K_MIN = 3
DEFAULT_GLUING_THRESHOLD = 1.0  # L1: minimal log k per excursion
# Cap for super-geometric length schedules.  Realized excursions take time
# 2*ell, so a cap of 24 puts the first apex at t = 24 and the first return
# at t = 48: reachable by scans of a few hundred dyadic steps.
DEFAULT_ELL_CAP = 24


@dataclass(frozen=True)
class CuspId:
    """Unordered pair {i, j}, stored with i < j."""

    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise InvalidSpec("cusp indices must be distinct")
        if self.i > self.j:
            i, j = self.j, self.i
            object.__setattr__(self, "i", i)
            object.__setattr__(self, "j", j)

    def indices(self) -> tuple:
        return (self.i, self.j)

    def adjacent_to(self, other: "CuspId") -> bool:
        return len(set(self.indices()) & set(other.indices())) == 1

    def __repr__(self):
        return f"CuspId({self.i},{self.j})"


def _as_positive_int(k) -> int:
    kk = int(k)
    if kk != k or kk < 1:
        raise InvalidSpec(f"excursion power must be a positive integer: {k!r}")
    return kk


def _round_exp(ell) -> int:
    """Nearest integer to e^ell, computed at sufficient precision."""
    if isinstance(ell, Fraction):
        approx = ell.numerator / ell.denominator
    else:
        approx = float(ell)
    if approx < 0:
        raise InvalidSpec("excursion length must be positive")
    prec = int(1.5 * approx) + 64
    with mpmath.workprec(prec):
        if isinstance(ell, Fraction):
            x = mpmath.mpf(ell.numerator) / ell.denominator
        else:
            x = mpmath.mpf(ell)
        return int(mpmath.nint(mpmath.exp(x)))


@dataclass(frozen=True)
class ExcursionSchedule:
    """Sequence of cusp excursions (cusp_n, k_n) inside support S.

    Constraints: |S| >= 3; consecutive cusps adjacent (share exactly one
    index) or equal; k_n >= k_min and log k_n above the gluing threshold.
    """

    n: int
    steps: tuple
    support: tuple

    def __post_init__(self):
        if self.n < 2:
            raise InvalidSpec("need rank >= 3 (n >= 2)")
        support = tuple(sorted(set(int(i) for i in self.support)))
        object.__setattr__(self, "support", support)
        if len(support) < 3:
            raise InvalidSpec("schedule support needs at least 3 indices")
        if support[0] < 0 or support[-1] > self.n:
            raise InvalidSpec("support indices out of range")
        steps = []
        prev = None
        for cusp, k in self.steps:
            if not isinstance(cusp, CuspId):
                cusp = CuspId(*cusp)
            k = _as_positive_int(k)
            if not set(cusp.indices()) <= set(support):
                raise InvalidSpec(f"cusp {cusp} leaves the support")
            if k < DEFAULT_K_MIN:
                raise InvalidSpec(
                    f"excursion power {k} below k_min {DEFAULT_K_MIN}"
                )
            if prev is not None and cusp != prev and not cusp.adjacent_to(prev):
                raise InvalidSpec(
                    f"consecutive cusps {prev} and {cusp} are not adjacent"
                )
            steps.append((cusp, k))
            prev = cusp
        if not steps:
            raise InvalidSpec("schedule must contain at least one excursion")
        object.__setattr__(self, "steps", tuple(steps))

    def __len__(self):
        return len(self.steps)

    def word(self, depth: int | None = None) -> Word:
        """Concatenated excursion word e_1 e_2 ... e_depth (leftmost block
        is the first excursion; apply_word applies the last block first)."""
        depth = len(self.steps) if depth is None else depth
        if not 1 <= depth <= len(self.steps):
            raise InvalidSpec(f"depth {depth} outside schedule")
        return Word(
            ((cusp.i, cusp.j), k) for cusp, k in self.steps[:depth]
        )

    def lengths(self, prec: int = 128) -> tuple:
        """Realized excursion lengths 2 log k_n as mpf values.

        Excursion n walks in to phi-depth log k_n and back out, so it
        occupies a t-interval of length 2 log k_n (about twice the
        nominal ell_n used to choose k_n).
        """
        out = []
        with mpmath.workprec(prec):
            for _, k in self.steps:
                out.append(2 * mpmath.log(mpmath.mpf(k)))
        return tuple(out)


def _cusp_path(support, count, start=None):
    """Deterministic adjacent cusp sequence: from {i,j} step to the
    lexicographically least admissible pair {i, l} or {j, l}."""
    s = tuple(sorted(support))
    cur = start if start is not None else CuspId(s[0], s[1])
    path = [cur]
    while len(path) < count:
        best = None
        for ell in s:
            if ell in cur.indices():
                continue
            for anchor in cur.indices():
                cand = CuspId(anchor, ell)
                if best is None or cand.indices() < best.indices():
                    best = cand
        path.append(best)
        cur = best
    return path


def geometric_schedule(
    n: int, L, count: int, support=None
) -> ExcursionSchedule:
    """ell_m = L^m (L > 1), k_m = round(exp(ell_m)), alternating cusps."""
    if not count >= 1:
        raise InvalidSpec("count must be >= 1")
    if isinstance(L, (int, str, Fraction)):
        Lq = Fraction(L)
    else:
        Lq = float(L)
    if not Lq > 1:
        raise WehlerError("need L > 1")
    support = tuple(range(3)) if support is None else tuple(support)
    cusps = _cusp_path(support, count)
    steps = []
    ell = Fraction(1) if isinstance(Lq, Fraction) else 1.0
    for m in range(count):
        ell = ell * Lq
        steps.append((cusps[m], _round_exp(ell)))
    return ExcursionSchedule(n, tuple(steps), support)


def supergeometric_schedule(
    n: int, count: int, support=None, ell_cap: int = DEFAULT_ELL_CAP
) -> ExcursionSchedule:
    """ell_m = min(10^(10^m), ell_cap): the delta -> 1 length schedule,
    capped so powers stay exactly representable."""
    if not 2 <= ell_cap <= 100000:
        raise InvalidSpec("ell_cap out of range")
    support = tuple(range(3)) if support is None else tuple(support)
    cusps = _cusp_path(support, count)
    steps = []
    for m in range(1, count + 1):
        # 10^(10^m) >= 10^10 already dwarfs any admissible cap
        ell = min(10 ** (10 ** m), ell_cap) if m <= 2 else ell_cap
        steps.append((cusps[m - 1], _round_exp(ell)))
    return ExcursionSchedule(n, tuple(steps), support)


def polynomial_schedule(
    n: int, count: int, power: int = 10, support=None
) -> ExcursionSchedule:
    """ell_m = m^power: the delta -> N/2 length schedule."""
    support = tuple(range(3)) if support is None else tuple(support)
    cusps = _cusp_path(support, count)
    steps = []
    for m in range(1, count + 1):
        steps.append((cusps[m - 1], _round_exp(m**power)))
    return ExcursionSchedule(n, tuple(steps), support)


def height(c: CuspId, v: LatticeVector):
    """Ht_{ij}(v) = ||v|| / <v, omega_hat(i,j)>; scale-invariant."""
    ray = omega_hat(v.n, c.i, c.j, v.ctx)
    with v.ctx.work():
        q = pair(v, v)
        denom = pair(v, ray)
        scale = sum(x * x for x in v.coords)
        thr = v.ctx.eps() * (scale if scale > 1 else 1)
        if not q > thr:
            raise NonTimelike("height needs a future timelike vector")
        if not denom > thr:
            raise ZeroPairing("pairing with the cusp ray must be positive")
        return v.ctx.sqrt(q) / denom


def in_horoball(c: CuspId, v: LatticeVector, L) -> bool:
    """Closed horoball condition Ht_{ij}(v) >= L."""
    h = height(c, v)
    with v.ctx.work():
        bound = v.ctx.make(L)
        slack = v.ctx.eps() * (bound if bound > 1 else 1)
        return h >= bound - slack


def s_to_t(s, ctx: Context = FLOAT_CTX):
    with ctx.work():
        s = ctx.make(s)
        if not s > 0:
            raise WehlerError("s must be positive")
        return ctx.log((1 + s) / s) / 2


def t_to_s(t, ctx: Context = FLOAT_CTX):
    with ctx.work():
        t = ctx.make(t)
        if not t > 0:
            raise WehlerError("t must be positive")
        e = ctx.exp(-2 * t)
        return e / (1 - e)


def phi_offset(n: int, ctx: Context = FLOAT_CTX):
    """log vol_1 of the normalized basepoint u: the additive calibration."""
    with ctx.work():
        norm = ctx.sqrt(ctx.make(2 * (n + 1)))
        return ctx.log(ctx.make(n + 1) / norm)


def phi_proxy(v: LatticeVector, max_steps: int | None = None):
    """log vol_1(reduce(v / ||v||)): the volume-based distance proxy."""
    with v.ctx.work():
        q = pair(v, v)
        if not q > 0:
            raise NonTimelike("distance proxy needs a timelike vector")
        if max_steps is None:
            res = reduce_to_chamber(v)
        else:
            res = reduce_to_chamber(v, max_steps=max_steps)
        tau1 = sum(res.reduced.coords)
        return v.ctx.log(tau1 / v.ctx.sqrt(q))


def excursion_word(c: CuspId, k) -> Word:
    """(sigma_i sigma_j)^k."""
    k = _as_positive_int(k)
    return Word((((c.i, c.j), k),))


@dataclass(frozen=True)
class ConvergenceCertificate:
    """Projective increments between successive truncations, with the
    fitted geometric decay rate (None when fewer than two increments)."""

    depths: tuple
    increments: tuple
    rate: object
    normalization: str = "coordinate sum = 1"

    @property
    def final_increment(self):
        return self.increments[-1] if self.increments else None


def _normalized_direction(coords, ctx: Context):
    with ctx.work():
        xs = [ctx.make(c) for c in coords]
        total = sum(xs)
        if not total > 0:
            raise NonConvergent(-1, "direction left the future cone")
        return tuple(x / total for x in xs)


def schedule_limit_vector(
    schedule: ExcursionSchedule,
    depth: int | None = None,
    ctx: Context = FLOAT_CTX,
    should_continue=None,
):
    """Direction of lim apply_word(e_1 ... e_d, u), tau_1-normalized.

    Word application is exact on integer coordinates; only the final
    normalization rounds.  Returns (vector, certificate).  Raises
    NonConvergent when the projective increments fail to decay.
    """
    depth = len(schedule) if depth is None else depth
    if not 1 <= depth <= len(schedule):
        raise InvalidSpec(f"depth {depth} outside schedule")
    base = u_vector(schedule.n, EXACT_CTX)
    dirs = []
    for d in range(1, depth + 1):
        if should_continue is not None and not should_continue():
            raise WehlerError("materialization cancelled")
        image = apply_word(schedule.word(d), base)
        dirs.append(_normalized_direction(image.coords, ctx))
    increments = []
    with ctx.work():
        for prev, cur in zip(dirs, dirs[1:]):
            increments.append(max(abs(a - b) for a, b in zip(prev, cur)))
        rate = None
        if len(increments) >= 2:
            ratios = []
            for a, b in zip(increments, increments[1:]):
                if not a > 0:
                    break
                ratios.append(b / a)
            if any(r >= 1 for r in ratios):
                raise NonConvergent(
                    len(increments),
                    "projective increments are not decaying",
                )
            rate = max(ratios) if ratios else None
    cert = ConvergenceCertificate(
        tuple(range(1, depth + 1)), tuple(increments), rate
    )
    return vector(schedule.n, dirs[-1], ctx), cert


def build_recurrent_point(
    schedule: ExcursionSchedule,
    depth: int | None = None,
    ctx: Context = FLOAT_CTX,
):
    """Boundary-point spec for the limit direction of a schedule.

    The recurrent program is the explicit truncated limit vector; the
    certificate records the projective increments of the truncations.
    """
    from . import boundary

    vec, cert = schedule_limit_vector(schedule, depth, ctx)
    spec = boundary.BoundaryPointSpec(
        n=schedule.n,
        word=Word(()),
        divergent={},
        recurrent=boundary.ExplicitIsotropic(vec, schedule.support),
    )
    return {"spec": spec, "certificate": cert}


def limsup_ratio(L):
    """(L-1)/(L+1): limiting ell_n / (2 t'_n) for geometric lengths."""
    if isinstance(L, (int, Fraction)):
        L = Fraction(L)
        if not L > 1:
            raise WehlerError("need L > 1")
        return (L - 1) / (L + 1)
    with FLOAT_CTX.work():
        L = FLOAT_CTX.make(L)
        if not L > 1:
            raise WehlerError("need L > 1")
        return (L - 1) / (L + 1)


def delta_inf_target(L, n: int):
    """N/2 - ((N-2)/2) * (L-1)/(L+1): the liminf volume exponent reached
    by the geometric length schedule."""
    r = limsup_ratio(L)
    if isinstance(r, Fraction):
        return Fraction(n, 2) - Fraction(n - 2, 2) * r
    with FLOAT_CTX.work():
        return FLOAT_CTX.make(n) / 2 - FLOAT_CTX.make(n - 2) / 2 * r


@dataclass(frozen=True)
class ExcursionTimes:
    """Realized time map of a schedule: excursion n occupies the interval
    [starts[n], returns[n]] of length 2 log k_n, with its phi-apex (height
    log k_n, half the interval length) at midpoints[n].  Returns are the
    phi = O(1) valleys; midpoints are the hills."""

    lengths: tuple
    starts: tuple
    midpoints: tuple
    returns: tuple


def excursion_times(schedule: ExcursionSchedule, prec: int = 128) -> ExcursionTimes:
    """Accumulate realized excursion intervals along the time axis."""
    lengths = schedule.lengths(prec)
    starts, mids, rets = [], [], []
    with mpmath.workprec(prec):
        total = mpmath.mpf(0)
        for ell in lengths:
            starts.append(total)
            mids.append(total + ell / 2)
            total = total + ell
            rets.append(total)
    return ExcursionTimes(lengths, tuple(starts), tuple(mids), tuple(rets))
