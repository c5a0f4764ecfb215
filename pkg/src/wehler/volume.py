"""Chamber-reduced volume functions and the section-count closed form.

For a reduced (nef) coordinate vector the k-volume is the k-th elementary
symmetric function tau_k of the coordinates; for arbitrary Tits-cone input
``vol_k`` first reduces, which makes every vol_k invariant under the wall
crossing group.  vol_0 = 1, vol_1 is the coordinate sum, and the top
self-intersection of a nef class G is (G^N) = 2 * N! * tau_N(G).

For nef and big integral G (at most one zero coordinate) the space of
global sections has dimension

    h0(G) = 2 * sum_{j >= 0, N-2j >= 0} tau_{N-2j}(G),

and consequently

    (G^N) / N!  <=  h0(G)  <=  C_N * (G^N) / N!,

where ``C_N = 1 + sum_{j>=1} binom(N+1, 2j+1)`` (:func:`sandwich_constant`).
Both facts are cross-checked against an independent square-free-ring Euler
characteristic in the test suite; see :mod:`wehler.oracle`.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

from .chamber import reduce_to_chamber
from .errors import NotBig, NotIntegral, NotNef
from .lattice import LatticeVector, as_int_coords

__all__ = [
    "symmetric_profile",
    "vol_k",
    "top_intersection",
    "volume",
    "h0_nef_big",
    "sandwich_constant",
]


def symmetric_profile(v: LatticeVector) -> tuple:
    """All elementary symmetric functions (tau_0, ..., tau_{N+1}) of the
    raw coordinates, by the stable one-pass product recurrence."""
    with v.ctx.work():
        coords = v.coords
        m = len(coords)
        taus = [v.ctx.make(0)] * (m + 1)
        taus[0] = v.ctx.make(1)
        for i, x in enumerate(coords):
            for j in range(min(i + 1, m), 0, -1):
                taus[j] = taus[j] + x * taus[j - 1]
        return tuple(taus)


def _tau(coords, k, ctx):
    taus = [ctx.make(0)] * (k + 1)
    taus[0] = ctx.make(1)
    for x in coords:
        for j in range(k, 0, -1):
            taus[j] = taus[j] + x * taus[j - 1]
    return taus[k]


def vol_k(
    v: LatticeVector,
    k: int,
    max_steps: int | None = None,
    accelerate: bool = True,
):
    """tau_k of the chamber reduction of v; W-invariant, degree-k
    homogeneous, and vol_0 == 1 identically."""
    if not 0 <= k <= v.n + 1:
        raise NotNef(f"k must lie in 0..{v.n + 1}")
    kwargs = {} if max_steps is None else {"max_steps": max_steps}
    reduced = reduce_to_chamber(v, accelerate=accelerate, **kwargs).reduced
    with v.ctx.work():
        return _tau(reduced.coords, k, v.ctx)


def top_intersection(g: LatticeVector):
    """(G^N) = 2 * N! * tau_N(G) for nef G (raises NotNef otherwise)."""
    with g.ctx.work():
        scale = max((abs(c) for c in g.coords), default=g.ctx.zero())
        thr = g.ctx.eps() * max(scale, g.ctx.make(1))
        if any(c < -thr for c in g.coords):
            raise NotNef("top_intersection needs a nef (reduced) class")
        return 2 * factorial(g.n) * _tau(g.coords, g.n, g.ctx)


def volume(
    v: LatticeVector,
    max_steps: int | None = None,
    accelerate: bool = True,
):
    """Volume of a Tits-cone class: reduce, then (G^N); zero iff not big."""
    kwargs = {} if max_steps is None else {"max_steps": max_steps}
    reduced = reduce_to_chamber(v, accelerate=accelerate, **kwargs).reduced
    return top_intersection(reduced)


def h0_nef_big(g: LatticeVector) -> int:
    """Global-section count 2 * sum_j tau_{N-2j} for nef and big integral G.

    Requires integer coordinates (NotIntegral), none negative (NotNef), and
    at most one zero (NotBig: two zeros kill the top symmetric function).
    """
    coords = as_int_coords(g)  # NotIntegral on fractional input
    if any(c < 0 for c in coords):
        raise NotNef("h0 closed form needs a nef (reduced) class")
    if sum(1 for c in coords if c == 0) > 1:
        raise NotBig("two or more zero coordinates: class is not big")
    n = g.n
    taus = [0] * (n + 2)
    taus[0] = 1
    for x in coords:
        for j in range(n + 1, 0, -1):
            taus[j] = taus[j] + x * taus[j - 1]
    total = 0
    d = n
    while d >= 0:
        total += taus[d]
        d -= 2
    return 2 * total


def sandwich_constant(n: int) -> int:
    """C_N = 1 + sum_{j >= 1} binom(N+1, 2j+1); C_3 = 5, C_4 = 12, C_5 = 27."""
    total = 1
    j = 1
    while 2 * j <= n:
        total += comb(n + 1, 2 * j + 1)
        j += 1
    return total
