"""Reflection group action and reduction into the fundamental chamber.

The wall-crossing group W is generated by one reflection per basis index,

    sigma_i(v) = v + (<v, alpha_i> / (N-1)) * alpha_i,

which in coordinates is the integral rule

    x_i -> -x_i,        x_j -> x_j + 2 * x_i   (j != i).

W is the free product of N+1 copies of Z/2: the only relations are
sigma_i^2 = id, so reduced words (no two adjacent equal letters) are unique
normal forms.  The closed fundamental chamber is the nef cone
{all coordinates >= 0}; every vector of the Tits cone reaches it by a
unique reduced gallery.

Reduction is greedy: while some coordinate is negative, reflect at the most
negative one (ties broken by the smallest index).  Each such step crosses a
separating wall, so the number of steps equals the gallery distance.  Near a
cusp the gallery distance grows like exp(2 * depth) while the hyperbolic
distance grows linearly, so the loop also detects two-letter cycling
(i, j, i, j, ...) and fast-forwards through it in closed form: the pair
operator P = sigma_j o sigma_i is parabolic, (P - I)^3 = 0, hence

    P^k = I + k*(P - I) + k*(k-1)/2 * (P - I)^2,

and the number of pairs the greedy rule would traverse is found exactly by
sign analysis of per-coordinate quadratics in k.  The fast-forwarded word is
identical to the one plain greedy would produce; only the running time
changes.  Long words are therefore stored run-compressed (:class:`Word`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import mpmath

from .errors import (
    DimensionMismatch,
    NonConvergent,
    StepCapExceeded,
    WordTooLong,
)
from .lattice import LatticeVector, norm_sq

DEFAULT_STEP_CAP = 1_000_000
_WORD_EXPAND_LIMIT = 1_000_000
_DITHER_WINDOW = 256  # iterations tolerated at the sign threshold


def reflect(i: int, v: LatticeVector) -> LatticeVector:
    """Apply sigma_i; preserves the bilinear form."""
    if not 0 <= i <= v.n:
        raise DimensionMismatch(f"generator {i} out of range 0..{v.n}")
    with v.ctx.work():
        return LatticeVector(
            v.n, tuple(_reflect_list(i, list(v.coords))), v.ctx
        )


def _reflect_list(i: int, xs: list) -> list:
    xi = xs[i]
    twice = xi + xi
    out = [x + twice for x in xs]
    out[i] = -xi
    return out


class Word:
    """Run-compressed reduced word.

    ``segments`` is a tuple of ``(letters, count)`` with ``letters`` a tuple
    of one or two generator indices.  Letters read in storage order act on a
    vector from the right: the LAST letter of the flattened sequence is
    applied first.  A two-letter segment ``((a, b), k)`` therefore denotes
    the operator (sigma_a o sigma_b)^k.
    """

    __slots__ = ("segments",)

    def __init__(self, segments: Iterable = ()):
        segs = []
        for letters, count in segments:
            letters = tuple(int(x) for x in letters)
            count = int(count)
            if count < 0 or not 1 <= len(letters) <= 2:
                raise ValueError("malformed word segment")
            if count == 0:
                continue
            if segs and segs[-1][0] == letters:
                segs[-1] = (letters, segs[-1][1] + count)
            else:
                segs.append((letters, count))
        self.segments = tuple(segs)

    @classmethod
    def from_indices(cls, seq: Sequence[int]) -> "Word":
        return cls(((int(i),), 1) for i in seq)

    @property
    def length(self):
        return sum(len(ls) * c for ls, c in self.segments)

    def to_indices(self, limit: int = _WORD_EXPAND_LIMIT) -> tuple[int, ...]:
        if self.length > limit:
            raise WordTooLong(
                f"word of length {self.length} exceeds expansion limit {limit}"
            )
        out: list[int] = []
        for letters, count in self.segments:
            out.extend(letters * count)
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        if self.segments == other.segments:
            return True
        la, lb = self.length, other.length
        if la != lb:
            return False
        if la <= _WORD_EXPAND_LIMIT:
            return self.to_indices() == other.to_indices()
        return False

    def __hash__(self):
        return hash(self.segments)

    def __repr__(self):
        if self.length <= 24:
            return f"Word{list(self.to_indices())!r}"
        parts = [
            f"({letters[0]},{letters[1]})^{count}"
            if len(letters) == 2
            else f"{letters[0]}"
            for letters, count in self.segments
        ]
        return f"Word<{'.'.join(parts)}; length={self.length}>"


WordLike = Union[Word, Sequence[int]]


def simplify_word(seq: Sequence[int]) -> tuple[int, ...]:
    """Free-product reduction: cancel adjacent equal letters."""
    out: list[int] = []
    for x in seq:
        if out and out[-1] == x:
            out.pop()
        else:
            out.append(int(x))
    return tuple(out)


def apply_word(word: WordLike, v: LatticeVector) -> LatticeVector:
    """Apply a word; the last letter acts first."""
    with v.ctx.work():
        xs = list(v.coords)
        if isinstance(word, Word):
            for letters, count in reversed(word.segments):
                if len(letters) == 1:
                    if count % 2:
                        xs = _reflect_list(letters[0], xs)
                else:
                    a, b = letters
                    xs = _pair_power_list(a, b, count, xs)
        else:
            for i in reversed(tuple(word)):
                xs = _reflect_list(int(i), xs)
        return LatticeVector(v.n, tuple(xs), v.ctx)


def pair_power_apply(i: int, j: int, k, v: LatticeVector) -> LatticeVector:
    """((sigma_i o sigma_j) ** k)(v) in closed form, O(N) for any k >= 0."""
    if i == j:
        raise DimensionMismatch("pair power needs two distinct generators")
    with v.ctx.work():
        return LatticeVector(
            v.n, tuple(_pair_power_list(i, j, int(k), list(v.coords))), v.ctx
        )


def _pair_power_list(i: int, j: int, k: int, xs: list) -> list:
    # P = sigma_i o sigma_j is parabolic: (P - I)^3 = 0, so
    # P^k = I + k B + C(k,2) B^2 with B = P - I.
    if k == 0:
        return xs
    if k < 0:
        # inverse pairs: (sigma_i sigma_j)^-1 = sigma_j sigma_i
        return _pair_power_list(j, i, -k, xs)
    pv = _reflect_list(i, _reflect_list(j, xs))
    bv = [p - x for p, x in zip(pv, xs)]
    pbv = _reflect_list(i, _reflect_list(j, bv))
    b2v = [p - x for p, x in zip(pbv, bv)]
    half = (k * (k - 1)) // 2
    return [x + k * b + half * b2 for x, b, b2 in zip(xs, bv, b2v)]


@dataclass(frozen=True)
class ReductionResult:
    reduced: LatticeVector
    word: Word
    steps: int
    clamped: bool = False


@dataclass(frozen=True)
class ConeLocation:
    nef: bool
    ample: bool
    in_dual_cone: bool
    timelike: bool


def classify_cone(v: LatticeVector) -> ConeLocation:
    """Membership flags for the nef/ample cones, the alpha-dual cone C,
    and the open light cone, with scale-aware thresholds on floats."""
    with v.ctx.work():
        eps = v.ctx.eps()
        scale = max((abs(x) for x in v.coords), default=v.ctx.zero())
        thr = eps * max(scale, v.ctx.make(1))
        nef = all(x >= -thr for x in v.coords)
        ample = all(x > thr for x in v.coords)
        total = sum(v.coords)
        # <v, omega_i> = sum(v) - (N-1) * v_i ; all >= 0 iff v in dual cone C
        pair_thr = eps * max(scale * scale * (v.n + 1), v.ctx.make(1))
        in_dual = all(
            total - (v.n - 1) * x >= -pair_thr for x in v.coords
        )
        timelike = norm_sq(v) > pair_thr
        return ConeLocation(
            nef=nef, ample=ample, in_dual_cone=in_dual, timelike=timelike
        )


def reduce_to_chamber(
    v: LatticeVector,
    max_steps: int | None = DEFAULT_STEP_CAP,
    accelerate: bool = True,
) -> ReductionResult:
    """Greedy reduction into the closed chamber {all coordinates >= 0}.

    Returns the reduced vector together with the reduced word ``w`` such
    that ``apply_word(w, v) == reduced``; ``steps`` equals the word length
    (= gallery distance).  Raises :class:`StepCapExceeded` when the budget
    runs out, which is also what happens for inputs outside the Tits cone.
    On the float backend, coordinates whose magnitude stays below
    ``eps * scale`` are treated as zero; if they end the loop negative they
    are clamped to zero and ``clamped`` is set.
    """
    ctx = v.ctx
    exact = ctx.is_exact
    eps = ctx.eps()
    budget = max_steps if max_steps is not None else None

    with ctx.work():
        return _reduce_loop(v, ctx, exact, eps, budget, accelerate)


def _reduce_loop(v, ctx, exact, eps, budget, accelerate) -> ReductionResult:
    xs = list(v.coords)
    app: list = []  # application-order ops: int pivot or (a, b, k) pair runs
    steps = 0
    recent: list[int] = []
    dither = 0

    while True:
        if exact:
            thr = 0
        else:
            scale = max(abs(x) for x in xs)
            one = ctx.make(1)
            thr = eps * (scale if scale > one else one)
        piv = -1
        best = None
        for idx, x in enumerate(xs):
            if x < -thr and (best is None or x < best):
                best = x
                piv = idx
        if piv < 0:
            break

        if budget is not None and steps >= budget:
            raise StepCapExceeded(budget)

        if not exact:
            if -best <= 64 * thr:
                dither += 1
                if dither > _DITHER_WINDOW:
                    raise NonConvergent(piv)
            else:
                dither = 0

        if (
            accelerate
            and len(recent) >= 4
            and recent[-1] != piv
            and recent[-2] == piv
            and recent[-3] == recent[-1]
            and recent[-4] == piv
        ):
            a, b = piv, recent[-1]
            cap = None if budget is None else (budget - steps) // 2
            k, new_xs = _greedy_pair_run(xs, a, b, cap)
            if k >= 1:
                xs = new_xs
                steps += 2 * k
                app.append((a, b, k))
                recent.clear()
                continue

        xs = _reflect_list(piv, xs)
        steps += 1
        app.append(piv)
        recent.append(piv)
        if len(recent) > 8:
            del recent[0]

    clamped = False
    if not exact:
        zero = ctx.make(0)
        for idx, x in enumerate(xs):
            if x < 0:
                xs[idx] = zero
                clamped = True

    segments = []
    for op in reversed(app):
        if isinstance(op, tuple):
            a, b, k = op
            segments.append(((b, a), k))
        else:
            segments.append(((op,), 1))
    word = Word(segments)
    reduced = LatticeVector(v.n, tuple(xs), ctx)
    return ReductionResult(reduced=reduced, word=word, steps=steps, clamped=clamped)


# -- fast-forward internals ----------------------------------------------


def _greedy_pair_run(xs: list, a: int, b: int, cap: int | None):
    """Largest K such that plain greedy, started at ``xs``, would apply the
    pair (sigma_a then sigma_b) K times in a row; returns (K, state)."""
    pv = _reflect_list(b, _reflect_list(a, xs))  # P = sigma_b o sigma_a
    bv = [p - x for p, x in zip(pv, xs)]
    pbv = _reflect_list(b, _reflect_list(a, bv))
    b2v = [p - x for p, x in zip(pbv, bv)]

    # coordinate m after k pairs: A k^2 + B k + C (division by 2 is exact
    # for Fractions and for binary floats alike)
    polys = [
        (b2 / 2, bvm - b2 / 2, x) for b2, bvm, x in zip(b2v, bv, xs)
    ]

    n1 = len(xs)
    constraints = []  # (A, B, C, rel) with rel in {"lt0", "gt0", "ge0"}
    fa = polys[a]
    constraints.append((*fa, "lt0"))
    for m in range(n1):
        if m == a:
            continue
        diff = _poly_sub(polys[m], fa)
        constraints.append((*diff, "gt0" if m < a else "ge0"))
    # after sigma_a: y_a = -f_a, y_m = f_m + 2 f_a
    ga = _poly_neg(fa)
    gb = _poly_add(polys[b], _poly_scale(fa, 2))
    constraints.append((*gb, "lt0"))
    for m in range(n1):
        if m == b:
            continue
        gm = ga if m == a else _poly_add(polys[m], _poly_scale(fa, 2))
        diff = _poly_sub(gm, gb)
        constraints.append((*diff, "gt0" if m < b else "ge0"))

    unbounded = cap is None
    hi = cap if cap is not None else 1 << 200
    if hi < 1:
        return 0, xs
    k_stop = hi
    bounded = False
    for A, B, C, rel in constraints:
        fv = _first_violation(A, B, C, rel, k_stop)
        if fv is not None and fv <= k_stop:
            k_stop = fv
            bounded = True
        if k_stop == 0:
            return 0, xs
    if unbounded and not bounded:
        # the run never exits: the input sits on a parabolic-fixed direction
        # outside the Tits cone interior
        raise StepCapExceeded(hi, "two-letter reduction run does not terminate")
    k = k_stop
    kk = (k * (k - 1)) // 2
    state = [x + k * bvm + kk * b2 for x, bvm, b2 in zip(xs, bv, b2v)]
    return k, state


def _poly_sub(p, q):
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def _poly_add(p, q):
    return (p[0] + q[0], p[1] + q[1], p[2] + q[2])


def _poly_neg(p):
    return (-p[0], -p[1], -p[2])


def _poly_scale(p, c):
    return (c * p[0], c * p[1], c * p[2])


def _rel_ok(value, rel) -> bool:
    if rel == "lt0":
        return value < 0
    if rel == "gt0":
        return value > 0
    return value >= 0


def _first_violation(A, B, C, rel, hi: int):
    """Smallest integer k in [0, hi] with NOT rel(A k^2 + B k + C), else None.

    The quadratic is monotone on each side of its vertex, so a sign
    condition flips at most once per monotone piece; binary search on each
    piece is exact."""

    def ok(k: int) -> bool:
        return _rel_ok((A * k + B) * k + C, rel)

    if A == 0 and B == 0:
        return None if _rel_ok(C, rel) else 0
    pieces = []
    if A == 0:
        pieces.append((0, hi))
    else:
        # integer vertex bracket: monotone on k <= floor(kv) and k >= ceil(kv)
        kv_num, kv_den = -B, 2 * A
        if kv_den < 0:
            kv_num, kv_den = -kv_num, -kv_den
        floor_kv = _floor_div_scalar(kv_num, kv_den)
        left_end = min(hi, floor_kv)
        if left_end >= 0:
            pieces.append((0, left_end))
        right_start = max(0, floor_kv + 1)
        if right_start <= hi:
            pieces.append((right_start, hi))
        if not pieces:
            pieces.append((0, hi))
    for lo, piece_hi in pieces:
        got = _first_false_monotone(ok, lo, piece_hi)
        if got is not None:
            return got
    return None


def _floor_div_scalar(num, den) -> int:
    """floor(num/den) for int, Fraction or mpf operands."""
    q = num / den
    if isinstance(q, Fraction):
        return q.numerator // q.denominator
    if isinstance(q, int):
        return q
    return int(mpmath.floor(q))


def _first_false_monotone(ok, lo: int, hi: int):
    if lo > hi:
        return None
    if not ok(lo):
        return lo
    if ok(hi):
        return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return hi


# -- convenience ------------------------------------------------------------


def reflection_matrix(n: int, i: int) -> list[list[int]]:
    """Matrix of sigma_i acting on coordinate columns (for cross-checks)."""
    cols = []
    for j in range(n + 1):
        e = [0] * (n + 1)
        e[j] = 1
        cols.append(_reflect_list(i, e))
    # transpose: entry [r][c] = image coordinate r of basis vector c
    return [[cols[c][r] for c in range(n + 1)] for r in range(n + 1)]
