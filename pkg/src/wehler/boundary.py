"""Constructive boundary points and the divergent-recurrent decomposition.

A boundary class is specified, never sampled: a word w, a divergent part
q_d = sum of positive multiples of omega_t over t in S_d (a face of the nef
cone), and an optional recurrent program whose realization q_r is a future
isotropic vector with <q_r, omega_t> = 0 for every t outside its support
S_r.  The represented point is p = w(q_d + q_r).

Supports obey |S_r| >= 3 (a rank-2 sub-reflection-group has only parabolic
limit directions) and |S_d| <= N-1, with S_d and S_r disjoint.

``decompose`` normalizes such a spec:

* parabolic content hides inside explicit recurrent vectors exactly when
  the vector sits on the W_{S_r}-orbit of a ray omega_hat(i,j) with
  {i,j} in S_r; an exact orbit scan up to a word-depth cap detects this and
  folds the content into the divergent part (the letters of the detected
  translate commute past q_d because every generator in S_r fixes each
  omega_t with t outside S_r).
* the split of q into p_d and p_r follows the coordinate convention: the
  recurrent vector keeps only its S_r coordinates, and the forced
  cross-terms x_t = (sum q_r)/(N-1) on positions outside S_r (the lambda
  shifts of the conformal embedding) are accounted to the divergent side.
* the word is canonicalized by stripping trailing letters that fix
  q = q_d + q_r (those letters generate the stabilizer of the chamber face
  through q), leaving one representative per stabilizer coset.

Floating-point vectors are never classified by tolerance alone: when an
orbit scan lands in the gray zone between the match threshold and the
certification threshold the decomposition refuses (AmbiguousAtDepth) rather
than guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath

from .chamber import Word, apply_word
from .cusp import ConvergenceCertificate, ExcursionSchedule, schedule_limit_vector
from .errors import (
    AmbiguousAtDepth,
    DegenerateSpan,
    DimensionMismatch,
    InvalidSpec,
    WehlerError,
)
from .lattice import (
    LatticeVector,
    is_isotropic,
    omega_hat,
    pair,
    pair_with_u,
    to_context,
    u_vector,
    vector,
)
from .scalars import EXACT_CTX, FLOAT_CTX, Context

DEFAULT_SCAN_DEPTH = 10
DEFAULT_SCAN_BUDGET = 200_000


def _coord_tol(v: LatticeVector):
    scale = sum(abs(c) for c in v.coords)
    one = v.ctx.make(1)
    return v.ctx.eps() * (scale if scale > one else one)


@dataclass(frozen=True)
class ExplicitIsotropic:
    """Realized recurrent program: a future isotropic vector supported,
    in the pairing sense, on S_r (orthogonal to every omega_t outside)."""

    vector: LatticeVector
    support: tuple

    def __post_init__(self):
        support = tuple(sorted(set(int(t) for t in self.support)))
        object.__setattr__(self, "support", support)
        v = self.vector
        if len(support) < 3:
            raise InvalidSpec("recurrent support needs at least 3 indices")
        if support[0] < 0 or support[-1] > v.n:
            raise InvalidSpec("support indices out of range")
        if not is_isotropic(v):
            raise InvalidSpec("recurrent vector must be isotropic")
        with v.ctx.work():
            if not pair_with_u(v) > 0:
                raise InvalidSpec("recurrent vector must be future-pointing")
            tol = _coord_tol(v) * (v.n + 1)
            for t in range(v.n + 1):
                if t in support:
                    continue
                basis = vector(
                    v.n,
                    tuple(1 if s == t else 0 for s in range(v.n + 1)),
                    v.ctx,
                )
                if abs(pair(v, basis)) > tol:
                    raise InvalidSpec(
                        f"recurrent vector pairs nontrivially with omega_{t}"
                    )


RecurrentProgram = ExplicitIsotropic  # or an ExcursionSchedule


@dataclass(frozen=True)
class BoundaryPointSpec:
    """p = word applied to (sum_t divergent[t]*omega_t + recurrent vector)."""

    n: int
    word: Word
    divergent: tuple  # sorted ((index, coefficient), ...)
    recurrent: object = None  # None | ExplicitIsotropic | ExcursionSchedule

    def __post_init__(self):
        word = self.word
        if not isinstance(word, Word):
            word = Word.from_indices(tuple(word))
        object.__setattr__(self, "word", word)
        div = self.divergent
        if isinstance(div, dict):
            div = tuple(sorted(div.items()))
        else:
            div = tuple(sorted((int(t), c) for t, c in div))
        object.__setattr__(self, "divergent", div)
        s_d = []
        for t, c in div:
            if not 0 <= t <= self.n:
                raise InvalidSpec(f"divergent index {t} out of range")
            if not float(c) > 0:
                raise InvalidSpec("divergent coefficients must be positive")
            s_d.append(t)
        if len(set(s_d)) != len(s_d):
            raise InvalidSpec("repeated divergent index")
        if s_d and len(s_d) > self.n - 1:
            raise InvalidSpec(
                f"divergent support of size {len(s_d)} exceeds N-1 = {self.n - 1}"
            )
        rec = self.recurrent
        if rec is not None:
            if isinstance(rec, ExplicitIsotropic):
                if rec.vector.n != self.n:
                    raise DimensionMismatch("recurrent vector rank mismatch")
                s_r = rec.support
            elif isinstance(rec, ExcursionSchedule):
                if rec.n != self.n:
                    raise DimensionMismatch("schedule rank mismatch")
                s_r = rec.support
            else:
                raise InvalidSpec(
                    "recurrent program must be ExplicitIsotropic or ExcursionSchedule"
                )
            if set(s_d) & set(s_r):
                raise InvalidSpec("divergent and recurrent supports overlap")
        if not s_d and rec is None:
            raise InvalidSpec("spec needs a divergent or a recurrent part")

    @property
    def s_d(self) -> tuple:
        return tuple(t for t, _ in self.divergent)

    @property
    def s_r(self) -> tuple:
        if self.recurrent is None:
            return ()
        return tuple(self.recurrent.support)


def _resolve_ctx(spec: BoundaryPointSpec, ctx: Context | None) -> Context:
    if ctx is not None:
        return ctx
    if isinstance(spec.recurrent, ExplicitIsotropic):
        return spec.recurrent.vector.ctx
    if isinstance(spec.recurrent, ExcursionSchedule):
        return FLOAT_CTX
    return EXACT_CTX


def _divergent_vector(spec: BoundaryPointSpec, ctx: Context) -> LatticeVector:
    coords = [0] * (spec.n + 1)
    for t, c in spec.divergent:
        coords[t] = c
    return vector(spec.n, coords, ctx)


def materialize_with_certificate(
    spec: BoundaryPointSpec,
    ctx: Context | None = None,
    truncation_depth: int | None = None,
):
    """Assemble apply_word(word, q_d + q_r); returns (vector, certificate).

    Schedule programs are truncated at ``truncation_depth`` excursions and
    certified by their projective increments; explicit programs carry a
    trivial certificate.
    """
    ctx = _resolve_ctx(spec, ctx)
    cert = ConvergenceCertificate((), (), None)
    q = _divergent_vector(spec, ctx)
    rec = spec.recurrent
    if isinstance(rec, ExplicitIsotropic):
        q = q + to_context(rec.vector, ctx)
    elif isinstance(rec, ExcursionSchedule):
        if truncation_depth is not None and truncation_depth < 1:
            raise InvalidSpec("truncation_depth must be >= 1")
        vec, cert = schedule_limit_vector(rec, truncation_depth, ctx)
        q = q + vec
    return apply_word(spec.word, q), cert


def materialize(
    spec: BoundaryPointSpec,
    ctx: Context | None = None,
    truncation_depth: int | None = None,
) -> LatticeVector:
    return materialize_with_certificate(spec, ctx, truncation_depth)[0]


# -- parabolic orbit scan -------------------------------------------------


def _primitive(coords: tuple) -> tuple:
    g = 0
    for c in coords:
        g = gcd(g, abs(c))
    return coords if g <= 1 else tuple(c // g for c in coords)


def parabolic_scan(
    q: LatticeVector,
    support,
    depth: int = DEFAULT_SCAN_DEPTH,
    budget: int = DEFAULT_SCAN_BUDGET,
):
    """Search the W_{S_r}-orbit of the rays omega_hat(i,j), {i,j} in S_r,
    for a projective match with q, up to word length ``depth``.

    Returns ``(word_letters, (i, j), scale)`` on a match (apply-order:
    the letters right-compose onto the spec word) or ``None`` when every
    scanned ray is certifiably distinct.  Raises AmbiguousAtDepth when the
    closest scanned ray falls between the match and certification
    thresholds (float backend only).
    """
    support = tuple(sorted(set(int(t) for t in support)))
    n = q.n
    with q.ctx.work():
        total = sum(q.coords)
        if not total > 0:
            raise InvalidSpec("scan target must be future-pointing")
        qhat = tuple(c / total for c in q.coords)
        if q.ctx.is_exact:
            match_thr = None
        else:
            match_thr = q.ctx.make(2) ** (-(q.ctx.prec // 2) + 6)
            ambig_thr = q.ctx.make(2) ** (-(q.ctx.prec // 3))
        min_diff = None

        def compare(coords_int):
            # projective max-coordinate distance to q, both sum-normalized
            t = sum(coords_int)
            diffs = [
                abs(qhat[i] - q.ctx.make(coords_int[i]) / t)
                for i in range(n + 1)
            ]
            return max(diffs)

        frontier = []
        seen = set()
        for a in range(len(support)):
            for b in range(a + 1, len(support)):
                ray = omega_hat(n, support[a], support[b], EXACT_CTX)
                coords = tuple(int(c) for c in ray.coords)
                key = _primitive(coords)
                seen.add(key)
                frontier.append((coords, -1, (), (support[a], support[b])))
        nodes = 0
        while frontier:
            next_frontier = []
            for coords, last, word, pair_id in frontier:
                nodes += 1
                d = compare(coords)
                if match_thr is None:
                    if d == 0:
                        scale = total / sum(coords)
                        return (word, pair_id, scale)
                else:
                    if d <= match_thr:
                        scale = total / q.ctx.make(sum(coords))
                        return (word, pair_id, scale)
                    if min_diff is None or d < min_diff:
                        min_diff = d
                if len(word) >= depth or nodes > budget:
                    continue
                for t in support:
                    if t == last:
                        continue
                    xt = coords[t]
                    twice = xt + xt
                    ys = tuple(
                        -xt if s == t else x + twice
                        for s, x in enumerate(coords)
                    )
                    key = _primitive(ys)
                    if key in seen:
                        continue
                    seen.add(key)
                    next_frontier.append((ys, t, (t,) + word, pair_id))
            frontier = next_frontier
        if match_thr is not None and min_diff is not None and min_diff <= ambig_thr:
            raise AmbiguousAtDepth(
                f"closest scanned parabolic ray at projective distance "
                f"{mpmath.nstr(min_diff, 8)}: cannot certify at depth {depth}"
            )
    return None


# -- decomposition ---------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    p_d: LatticeVector
    p_r: LatticeVector
    s_d: tuple
    s_r: tuple
    coset_word: Word
    certificate: ConvergenceCertificate


def _strip_trailing_fixers(word: Word, q: LatticeVector) -> Word:
    """Remove trailing (first-acting) letters that fix q: they generate
    the stabilizer of the chamber face through q."""
    with q.ctx.work():
        tol = _coord_tol(q)
        fixed = [abs(c) <= tol for c in q.coords]
    segs = [list(s) for s in word.segments]
    while segs:
        letters, count = segs[-1]
        last_letter = letters[-1]
        if not fixed[last_letter]:
            break
        if len(letters) == 1:
            if count == 1:
                segs.pop()
            else:
                segs[-1][1] = count - 1
        else:
            a, b = letters
            if count == 1:
                segs.pop()
            else:
                segs[-1][1] = count - 1
            segs.append([(a,), 1])
    return Word((tuple(ls), c) for ls, c in segs)


def decompose(
    spec: BoundaryPointSpec,
    ctx: Context | None = None,
    truncation_depth: int | None = None,
    scan_depth: int = DEFAULT_SCAN_DEPTH,
    scan_budget: int = DEFAULT_SCAN_BUDGET,
) -> Decomposition:
    """Normal form of the represented boundary point: p = p_d + p_r with
    p_d a word translate of a nef-face vector of maximal support and p_r a
    word translate of a non-parabolic limit vector."""
    ctx = _resolve_ctx(spec, ctx)
    cert = ConvergenceCertificate((), (), None)
    word = spec.word
    divergent = dict(spec.divergent)
    q_r = None
    s_r = ()
    rec = spec.recurrent
    if isinstance(rec, ExplicitIsotropic):
        q_r = to_context(rec.vector, ctx)
        s_r = rec.support
    elif isinstance(rec, ExcursionSchedule):
        q_r, cert = schedule_limit_vector(rec, truncation_depth, ctx)
        s_r = rec.support
    if q_r is not None:
        hit = parabolic_scan(q_r, s_r, scan_depth, scan_budget)
        if hit is not None:
            w0, (i, j), scale = hit
            with ctx.work():
                for t in range(spec.n + 1):
                    if t in (i, j):
                        continue
                    divergent[t] = divergent.get(t, ctx.zero()) + scale
            word = Word(
                tuple(word.segments) + tuple(((t,), 1) for t in w0)
            )
            q_r = None
            s_r = ()
    n = spec.n
    with ctx.work():
        coords = [ctx.make(divergent.get(t, 0)) for t in range(n + 1)]
        if q_r is not None:
            for t in range(n + 1):
                coords[t] = coords[t] + q_r.coords[t]
        q = vector(n, coords, ctx)
        if q_r is not None:
            r_coords = [
                q.coords[t] if t in s_r else ctx.zero() for t in range(n + 1)
            ]
            d_coords = [
                ctx.zero() if t in s_r else q.coords[t] for t in range(n + 1)
            ]
        else:
            r_coords = [ctx.zero()] * (n + 1)
            d_coords = list(q.coords)
        q_r_part = vector(n, r_coords, ctx)
        q_d_part = vector(n, d_coords, ctx)
        tol = _coord_tol(q)
        s_d_out = tuple(
            t for t in range(n + 1) if abs(q_d_part.coords[t]) > tol
        )
    coset = _strip_trailing_fixers(word, q)
    p_d = apply_word(coset, q_d_part)
    p_r = apply_word(coset, q_r_part)
    return Decomposition(p_d, p_r, s_d_out, tuple(s_r), coset, cert)


# -- conformal embeddings --------------------------------------------------


def embed(k: int, n: int, vprime: LatticeVector) -> LatticeVector:
    """Linear extension of omega_i' -> omega_i + (1/(k-1)) * sum_{t>k} omega_t.

    Maps the rank-(k+1) lattice into rank (n+1); the image is orthogonal to
    omega_{k+1}..omega_n and the form scales by (n-1)/(k-1)."""
    if not 2 <= k < n:
        raise DimensionMismatch(f"need 2 <= k < n, got k={k}, n={n}")
    if vprime.n != k:
        raise DimensionMismatch(
            f"embedding source expects rank {k + 1}, got {vprime.n + 1}"
        )
    ctx = vprime.ctx
    with ctx.work():
        total = sum(vprime.coords)
        if ctx.is_exact:
            shift = total / (k - 1)
        else:
            shift = total / ctx.make(k - 1)
        coords = tuple(vprime.coords) + (shift,) * (n - k)
    return LatticeVector(n, coords, ctx)


@dataclass(frozen=True)
class EmbeddingMap:
    k: int
    n: int

    def __post_init__(self):
        if not 2 <= self.k < self.n:
            raise DimensionMismatch("need 2 <= k < n")

    def __call__(self, vprime: LatticeVector) -> LatticeVector:
        return embed(self.k, self.n, vprime)

    @property
    def conformal_factor(self):
        return Fraction(self.n - 1, self.k - 1)


# -- the Figure-1 boundary curve -------------------------------------------


def _materialize_any(p, ctx: Context | None):
    if isinstance(p, BoundaryPointSpec):
        return materialize(p, ctx)
    if isinstance(p, LatticeVector):
        return p if ctx is None else to_context(p, ctx)
    raise InvalidSpec("expected a BoundaryPointSpec or LatticeVector")


def _fallback_directions(n: int, diff_coords, tol):
    """Deterministic spacelike candidates when u is in span{p0, p1}:
    first the sign-alternating vector on the support of p0 - p1 (symmetric
    under any support permutation that swaps p0 and p1), then basis
    differences, then single basis vectors."""
    support = [t for t in range(n + 1) if abs(diff_coords[t]) > tol]
    if len(support) >= 2:
        coords = [0] * (n + 1)
        sign = 1
        for t in support:
            coords[t] = sign
            sign = -sign
        yield coords
    for a in range(n + 1):
        for b in range(a + 1, n + 1):
            coords = [0] * (n + 1)
            coords[a], coords[b] = 1, -1
            yield coords
    for a in range(n + 1):
        coords = [0] * (n + 1)
        coords[a] = 1
        yield coords


def cusp_triangle_arc(n: int, t, ctx: Context | None = None) -> LatticeVector:
    """Point of the isotropic conic through the three cusp rays
    omega_hat(0,1), omega_hat(0,2), omega_hat(1,2).

    The conic lies in the hyperplane of vectors (a, b, c, S, ..., S) with
    S = a + b + c, which the wall crossings of walls 0, 1, 2 preserve and on
    which they act as the ideal triangle reflection group; every point of
    the conic is therefore a volume-zero limit direction.  The map

        (a, b, c) = (t, t(t-1), 1-t) / (t^2 - t + 1)

    is rational over Q in both directions, so rational t give rational
    classes (wall-crossing translates of cusp rays: linear volume decay)
    while irrational t give recurrent directions with the generic N/2 power
    law.  t = 0, 1/2, 1 land on translates of omega_hat(0,1),
    omega_hat(0,2), omega_hat(1,2) in that order.  The result sits on the
    cusp-ray slice <v, u> = 2(N-1) and is exact on the exact backend for
    rational t.
    """
    if n < 3:
        raise InvalidSpec("the cusp triangle needs n >= 3")
    if ctx is None:
        ctx = FLOAT_CTX
    with ctx.work():
        tt = ctx.make(t)
        if not (0 <= tt <= 1):
            raise WehlerError("arc parameter must lie in [0, 1]")
        scale = tt * tt - tt + 1  # >= 3/4 on the reals: never vanishes
        coords = [tt / scale, tt * (tt - 1) / scale, (1 - tt) / scale]
        coords += [ctx.make(1)] * (n - 2)
        return vector(n, coords, ctx)


def boundary_curve(p0_spec, p1_spec, t, ctx: Context | None = None) -> LatticeVector:
    """Isotropic arc from [p0] to [p1] on the slice <v, u> = <p0, u>.

    Lorentzian Gram-Schmidt in span{p0, p1, u} gives an orthonormal frame
    (f0 timelike, f1, f2 spacelike); the curve is
    f0 + cos(pi t) f1 + sin(pi t) f2, rescaled to the slice.  When u is
    spanned by p0 and p1 the third frame vector falls back to a canonical
    spacelike direction determined by supp(p0 - p1)."""
    if ctx is None or ctx.is_exact:
        base = FLOAT_CTX if ctx is None else ctx
        ctx = Context("float", base.prec)
    p0 = _materialize_any(p0_spec, ctx)
    p1 = _materialize_any(p1_spec, ctx)
    if p0.n != p1.n:
        raise DimensionMismatch("curve endpoints have different ranks")
    n = p0.n
    with ctx.work():
        tt = ctx.make(t)
        if not (0 <= tt <= 1):
            raise WehlerError("curve parameter must lie in [0, 1]")
        for p in (p0, p1):
            if not is_isotropic(p):
                raise InvalidSpec("curve endpoints must be isotropic")
            if not pair_with_u(p) > 0:
                raise InvalidSpec("curve endpoints must be future-pointing")
        g = pair(p0, p1)
        scale = ctx.make(2 * (n + 1))
        if not g > ctx.eps() * scale:
            raise DegenerateSpan("endpoints are projectively equal")
        denom = ctx.sqrt(2 * g)
        f0 = (p0 + p1).scale(1 / denom)
        f1 = (p0 - p1).scale(1 / denom)
        uu = u_vector(n, ctx)
        a = pair(uu, f0)
        b = pair(uu, f1)
        resid = uu - f0.scale(a) + f1.scale(b)
        rr = pair(resid, resid)
        if abs(rr) <= ctx.eps() * scale:
            diff = (p0 - p1).coords
            tol = _coord_tol(p0 - p1)
            resid = None
            for cand in _fallback_directions(n, diff, tol):
                z = vector(n, cand, ctx)
                za = pair(z, f0)
                zb = pair(z, f1)
                zp = z - f0.scale(za) + f1.scale(zb)
                rr = pair(zp, zp)
                if rr < -ctx.eps() * scale:
                    resid = zp
                    break
            if resid is None:
                raise DegenerateSpan("no spacelike direction completes the frame")
        f2 = resid.scale(1 / ctx.sqrt(-rr))
        c = f0 + f1.scale(mpmath.cospi(tt)) + f2.scale(mpmath.sinpi(tt))
        target = pair_with_u(p0)
        cur = pair_with_u(c)
        return c.scale(target / cur)
