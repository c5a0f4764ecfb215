"""Rank-(N+1) divisor lattice of a generic (2,...,2) hypersurface in (P^1)^(N+1).

Coordinates are taken in the basis ``omega_0 .. omega_N`` given by the
pullbacks of the point classes of the N+1 projective-line factors.  The
intersection-derived bilinear form on this basis is

    <omega_i, omega_i> = -(N-2),      <omega_i, omega_j> = 1   (i != j),

of signature (1, N).  Distinguished vectors:

* ``u``              -- sum of all omega_i, timelike with <u,u> = 2(N+1);
* ``alpha_i``        -- u - 2*omega_i, the reflection normals,
                        <alpha_i, alpha_i> = -2(N-1);
* ``omega_hat(i,j)`` -- u - omega_i - omega_j, isotropic, one per unordered
                        pair; these span the extremal rays of the chamber
                        at infinity.

The pairing of two vectors expands to
``(sum v)(sum w) - (N-1) * sum_i v_i w_i``, which is how :func:`pair`
evaluates it (O(N), no Gram matrix product).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BackendMismatch, DimensionMismatch
from .scalars import EXACT_CTX, Context, scalar_is_integral


def form_constants(n: int) -> tuple[int, int]:
    """(diagonal, off-diagonal) entries of the bilinear form at rank n+1."""
    if n < 2:
        raise DimensionMismatch(f"need n >= 2, got {n}")
    return -(n - 2), 1


def gram_matrix(n: int) -> list[list[int]]:
    diag, off = form_constants(n)
    return [
        [diag if i == j else off for j in range(n + 1)] for i in range(n + 1)
    ]


@dataclass(frozen=True)
class LatticeVector:
    """Coordinate vector over one scalar backend; immutable."""

    n: int
    coords: tuple
    ctx: Context

    def __post_init__(self):
        if len(self.coords) != self.n + 1:
            raise DimensionMismatch(
                f"expected {self.n + 1} coordinates, got {len(self.coords)}"
            )

    # arithmetic stays inside one backend; mixing raises
    def _check(self, other: "LatticeVector"):
        if self.n != other.n:
            raise DimensionMismatch(f"rank mismatch: {self.n} vs {other.n}")
        if self.ctx != other.ctx:
            raise BackendMismatch(f"{self.ctx} vs {other.ctx}")

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        self._check(other)
        with self.ctx.work():
            return LatticeVector(
                self.n,
                tuple(a + b for a, b in zip(self.coords, other.coords)),
                self.ctx,
            )

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        self._check(other)
        with self.ctx.work():
            return LatticeVector(
                self.n,
                tuple(a - b for a, b in zip(self.coords, other.coords)),
                self.ctx,
            )

    def scale(self, c) -> "LatticeVector":
        with self.ctx.work():
            c = self.ctx.make(c)
            return LatticeVector(
                self.n, tuple(c * a for a in self.coords), self.ctx
            )

    def is_integral(self) -> bool:
        return all(scalar_is_integral(c) for c in self.coords)

    def __repr__(self):
        body = ", ".join(self.ctx.to_str(c) for c in self.coords)
        return f"LatticeVector(n={self.n}, [{body}])"


def vector(n: int, coords, ctx: Context = EXACT_CTX) -> LatticeVector:
    if len(coords) != n + 1:
        raise DimensionMismatch(
            f"expected {n + 1} coordinates, got {len(coords)}"
        )
    return LatticeVector(n, tuple(ctx.make(c) for c in coords), ctx)


def zero_vector(n: int, ctx: Context = EXACT_CTX) -> LatticeVector:
    return vector(n, (0,) * (n + 1), ctx)


def omega(n: int, i: int, ctx: Context = EXACT_CTX) -> LatticeVector:
    _check_index(n, i)
    return vector(n, tuple(1 if j == i else 0 for j in range(n + 1)), ctx)


def u_vector(n: int, ctx: Context = EXACT_CTX) -> LatticeVector:
    return vector(n, (1,) * (n + 1), ctx)


def alpha_vector(n: int, i: int, ctx: Context = EXACT_CTX) -> LatticeVector:
    """u - 2*omega_i, the normal of the i-th reflection wall."""
    _check_index(n, i)
    return vector(n, tuple(-1 if j == i else 1 for j in range(n + 1)), ctx)


def omega_hat(n: int, i: int, j: int, ctx: Context = EXACT_CTX) -> LatticeVector:
    """u - omega_i - omega_j: the isotropic ray attached to the pair {i,j}."""
    _check_index(n, i)
    _check_index(n, j)
    if i == j:
        raise DimensionMismatch("omega_hat needs two distinct indices")
    return vector(
        n, tuple(0 if k in (i, j) else 1 for k in range(n + 1)), ctx
    )


def _check_index(n: int, i: int):
    if not 0 <= i <= n:
        raise DimensionMismatch(f"index {i} out of range 0..{n}")


def pair(v: LatticeVector, w: LatticeVector):
    """Bilinear form <v, w> = (sum v)(sum w) - (N-1) * sum_i v_i w_i."""
    v._check(w)
    with v.ctx.work():
        sv = sum(v.coords)
        sw = sum(w.coords)
        dot = sum(a * b for a, b in zip(v.coords, w.coords))
        return sv * sw - (v.n - 1) * dot


def norm_sq(v: LatticeVector):
    return pair(v, v)


def _coord_scale_sq(v: LatticeVector):
    return sum(c * c for c in v.coords)


def is_isotropic(v: LatticeVector) -> bool:
    """<v,v> = 0, up to eps * |coords|^2 on the float backend."""
    q = norm_sq(v)
    if v.ctx.is_exact:
        return q == 0
    with v.ctx.work():
        tol = v.ctx.eps() * max(_coord_scale_sq(v), v.ctx.make(1))
        return abs(q) <= tol


def is_timelike_positive(v: LatticeVector) -> bool:
    """<v,v> > 0 and <v,u> > 0 (future-pointing timelike)."""
    with v.ctx.work():
        thr = v.ctx.eps() * max(_coord_scale_sq(v), v.ctx.make(1))
        return norm_sq(v) > thr and pair_with_u(v) > 0


def pair_with_u(v: LatticeVector):
    """<v, u> = 2 * sum of coordinates."""
    with v.ctx.work():
        return 2 * sum(v.coords)


def to_context(v: LatticeVector, ctx: Context) -> LatticeVector:
    if v.ctx == ctx:
        return v
    return vector(v.n, v.coords, ctx)


def as_int_coords(v: LatticeVector) -> tuple[int, ...]:
    """Integer coordinate tuple; raises NotIntegral on fractional input."""
    from .errors import NotIntegral

    out = []
    for c in v.coords:
        if isinstance(c, int):
            out.append(c)
        elif isinstance(c, Fraction) and c.denominator == 1:
            out.append(c.numerator)
        elif scalar_is_integral(c):
            out.append(int(c))
        else:
            raise NotIntegral(f"coordinate {c!r} is not an integer")
    return tuple(out)
