"""Independent cross-checks for the closed-form section count and reduction.

Two oracles live here, deliberately sharing no code with the modules they
arbitrate:

* an Euler-characteristic computation in the square-free quotient ring
  Z[omega_0..omega_N]/(omega_i^2).  Chern data of the ambient N-fold enters
  only through the total Todd class sinh(sigma_1)/sigma_1 (sigma_p denotes
  the p-th elementary symmetric polynomial in the omega_i) and through the
  integration rule: a product of N distinct omega_i integrates to 2, every
  other square-free monomial to 0.  chi(G) = integral of exp(G) * Td; for
  nef and big G this equals the section count by vanishing.

* a breadth-first search over all reduced words up to a given length,
  giving shortest reduction words with no reliance on the greedy pivot rule.

Polynomials are dense tables indexed by subset bitmask; the ring dimension
is 2^(N+1), guarded at N <= 12.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .errors import RingGuard, StepCapExceeded, WehlerError
from .lattice import LatticeVector, as_int_coords

RANK_GUARD = 12


@dataclass(frozen=True)
class SquareFreePoly:
    """Element of Z[omega_0..omega_N]/(omega_i^2): bitmask -> coefficient."""

    n: int
    coeffs: tuple  # dense tuple of length 2^(n+1), Fraction or int entries

    def __post_init__(self):
        if self.n > RANK_GUARD:
            raise RingGuard(
                f"square-free ring at n={self.n} exceeds guard {RANK_GUARD}"
            )
        if len(self.coeffs) != 1 << (self.n + 1):
            raise WehlerError("coefficient table has wrong size")

    def coefficient(self, mask: int):
        return self.coeffs[mask]

    def degree_slice(self, d: int) -> dict[int, Fraction]:
        return {
            m: c
            for m, c in enumerate(self.coeffs)
            if c != 0 and bin(m).count("1") == d
        }


def poly_zero(n: int) -> SquareFreePoly:
    return SquareFreePoly(n, (Fraction(0),) * (1 << (n + 1)))


def poly_const(n: int, c) -> SquareFreePoly:
    tab = [Fraction(0)] * (1 << (n + 1))
    tab[0] = Fraction(c)
    return SquareFreePoly(n, tuple(tab))


def poly_linear(n: int, coords) -> SquareFreePoly:
    """sum_i coords[i] * omega_i."""
    tab = [Fraction(0)] * (1 << (n + 1))
    for i, c in enumerate(coords):
        tab[1 << i] = Fraction(c)
    return SquareFreePoly(n, tuple(tab))


def poly_add(p: SquareFreePoly, q: SquareFreePoly) -> SquareFreePoly:
    _same_ring(p, q)
    return SquareFreePoly(p.n, tuple(a + b for a, b in zip(p.coeffs, q.coeffs)))


def poly_scale(p: SquareFreePoly, c) -> SquareFreePoly:
    c = Fraction(c)
    return SquareFreePoly(p.n, tuple(c * a for a in p.coeffs))


def poly_mul(p: SquareFreePoly, q: SquareFreePoly) -> SquareFreePoly:
    """Ring product; omega_i^2 = 0 kills any subset overlap."""
    _same_ring(p, q)
    size = 1 << (p.n + 1)
    out = [Fraction(0)] * size
    q_items = [(m, c) for m, c in enumerate(q.coeffs) if c != 0]
    for mp, cp in enumerate(p.coeffs):
        if cp == 0:
            continue
        for mq, cq in q_items:
            if mp & mq:
                continue
            out[mp | mq] += cp * cq
    return SquareFreePoly(p.n, tuple(out))


def poly_exp_truncated(p: SquareFreePoly, max_degree: int | None = None) -> SquareFreePoly:
    """exp(p) = sum_k p^k / k!; terminates because p has no constant term
    and the ring is nilpotent in degree N+2."""
    if p.coeffs[0] != 0:
        raise WehlerError("exp oracle expects a polynomial without constant term")
    cap = p.n + 1 if max_degree is None else min(max_degree, p.n + 1)
    acc = poly_const(p.n, 1)
    power = poly_const(p.n, 1)
    for k in range(1, cap + 1):
        power = poly_mul(power, p)
        if all(c == 0 for c in power.coeffs):
            break
        acc = poly_add(acc, poly_scale(power, Fraction(1, factorial(k))))
    return acc


def _same_ring(p: SquareFreePoly, q: SquareFreePoly):
    if p.n != q.n:
        raise WehlerError(f"ring rank mismatch: {p.n} vs {q.n}")


@lru_cache(maxsize=None)
def todd_class(n: int) -> SquareFreePoly:
    """Td = sinh(sigma_1)/sigma_1 = sum_p sigma_1^(2p) / (2p+1)!."""
    sigma1 = poly_linear(n, [1] * (n + 1))
    acc = poly_const(n, 1)
    power = poly_const(n, 1)
    p = 0
    while True:
        p += 1
        power = poly_mul(poly_mul(power, sigma1), sigma1)
        if all(c == 0 for c in power.coeffs):
            break
        acc = poly_add(acc, poly_scale(power, Fraction(1, factorial(2 * p + 1))))
    return acc


def integrate(p: SquareFreePoly):
    """Integration over the N-fold: each degree-N square-free monomial
    (product of N distinct omega_i) has integral 2; all others vanish."""
    n = p.n
    total = Fraction(0)
    full = (1 << (n + 1)) - 1
    for i in range(n + 1):
        mask = full ^ (1 << i)  # the N-subset omitting i
        total += p.coeffs[mask]
    return 2 * total


def chi_oracle(g: LatticeVector | tuple, n: int | None = None) -> int:
    """Euler characteristic of the line bundle with class G, by
    integrate(exp(G) * Td).  Asserts integrality of the result."""
    if isinstance(g, LatticeVector):
        coords = as_int_coords(g)
        n = g.n
    else:
        coords = tuple(int(c) for c in g)
        if n is None:
            n = len(coords) - 1
    if len(coords) != n + 1:
        raise WehlerError("coordinate count does not match n")
    # exp(sum x_i omega_i) = prod_i (1 + x_i omega_i): nilpotent exponential
    expg = _exp_linear_dense(n, coords)
    td = todd_class(n)
    total = _integrate_product(n, expg, td)
    if total.denominator != 1:
        raise AssertionError(
            f"Euler characteristic came out non-integral: {total}"
        )
    return total.numerator


def _exp_linear_dense(n: int, coords) -> list:
    """Dense integer table of prod_i (1 + x_i omega_i)."""
    size = 1 << (n + 1)
    tab = [0] * size
    tab[0] = 1
    for i, x in enumerate(coords):
        bit = 1 << i
        for m in range(size):
            if m & bit:
                tab[m] = tab[m ^ bit] * x + tab[m]
    return tab


def _integrate_product(n: int, dense_tab: list, q: SquareFreePoly):
    """integral of (dense polynomial) * q without forming the full product:
    only degree-N coefficients of the product contribute."""
    total = Fraction(0)
    full = (1 << (n + 1)) - 1
    for i in range(n + 1):
        mask = full ^ (1 << i)
        # coefficient of omega_mask in the product
        sub = mask
        while True:
            cq = q.coeffs[sub]
            if cq != 0:
                cp = dense_tab[mask ^ sub]
                if cp != 0:
                    total += cp * cq
            if sub == 0:
                break
            sub = (sub - 1) & mask
    return 2 * total


def poly_from_exp_linear(n: int, coords) -> SquareFreePoly:
    """exp of a linear class as a SquareFreePoly (for ring identity tests)."""
    return SquareFreePoly(
        n, tuple(Fraction(c) for c in _exp_linear_dense(n, coords))
    )


def brute_force_reduce(
    v: LatticeVector | tuple, depth: int, n: int | None = None
):
    """Shortest reduction word by breadth-first search over reduced words.

    Input must have integer coordinates (the oracle is exact).  Returns
    ``(reduced_coords, word)`` with the word in last-letter-acts-first
    order; raises StepCapExceeded when no word of length <= depth lands
    in the closed chamber.
    """
    if isinstance(v, LatticeVector):
        coords = as_int_coords(v)
        n = v.n
    else:
        coords = tuple(int(c) for c in v)
        if n is None:
            n = len(coords) - 1
    start = coords
    if min(start) >= 0:
        return start, ()
    # queue entries: (coords, last_letter, word)
    queue = deque([(start, -1, ())])
    seen = {start}
    for _ in range(depth):
        next_queue = deque()
        while queue:
            xs, last, word = queue.popleft()
            for i in range(n + 1):
                if i == last:
                    continue  # sigma_i^2 = id: skip immediate backtracking
                xi = xs[i]
                twice = xi + xi
                ys = tuple(
                    -xi if j == i else x + twice for j, x in enumerate(xs)
                )
                if min(ys) >= 0:
                    return ys, tuple(reversed(word + (i,)))
                if ys not in seen:
                    seen.add(ys)
                    next_queue.append((ys, i, word + (i,)))
        queue = next_queue
        if not queue:
            break
    raise StepCapExceeded(depth, f"no reduction word of length <= {depth}")
