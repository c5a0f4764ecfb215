"""Scalar backends: exact rationals and arbitrary-precision binary floats.

Every lattice computation runs over one of two interchangeable scalar
backends:

* ``exact``   -- ``fractions.Fraction`` with arbitrary-precision integers.
* ``float``   -- mpmath ``mpf`` values at a fixed mantissa size (default 256
  bits).

A :class:`Context` pins the backend plus the working precision, and every
derived table records the precision it was computed at.  Transcendental
outputs (``log``, ``exp``, ``sqrt``) are always mpf, even on the exact
backend; they are evaluated at the context precision.

Comparison tolerance on the float backend follows a single rule: a quantity
is treated as zero when it is smaller than ``2**(-prec/2)`` times the natural
scale of the surrounding coordinates.  The factory :func:`Context.eps`
exposes that threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

EXACT = "exact"
FLOAT = "float"

DEFAULT_PREC = 256


def _dps_for(prec: int) -> int:
    # decimal digits that round-trip a binary mantissa of `prec` bits
    return int(prec * 0.30103) + 5


@dataclass(frozen=True)
class Context:
    """Scalar backend selector plus working precision in mantissa bits."""

    backend: str = EXACT
    prec: int = DEFAULT_PREC

    def __post_init__(self):
        if self.backend not in (EXACT, FLOAT):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.prec < 16:
            raise ValueError("precision below 16 bits is not supported")

    # -- conversions -----------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.backend == EXACT

    def make(self, x):
        """Coerce ``x`` (int, str, Fraction, float, mpf) into this backend."""
        if self.backend == EXACT:
            if isinstance(x, Fraction):
                return x
            if isinstance(x, int):
                return Fraction(x)
            if isinstance(x, str):
                return Fraction(x)
            if isinstance(x, float):
                return Fraction(x).limit_denominator(10**18)
            if isinstance(x, mpmath.mpf):
                if not mpmath.isfinite(x):
                    raise ValueError(f"cannot coerce {x} to Fraction")
                sign, man, exp, _ = x._mpf_
                fr = Fraction(int(man)) * Fraction(2) ** exp
                return -fr if sign else fr
            raise TypeError(f"cannot coerce {type(x).__name__} to Fraction")
        with mpmath.workprec(self.prec):
            if isinstance(x, Fraction):
                return mpmath.mpf(x.numerator) / x.denominator
            if isinstance(x, str):
                if "/" in x:
                    f = Fraction(x)
                    return mpmath.mpf(f.numerator) / f.denominator
                return mpmath.mpf(x)
            return mpmath.mpf(x)

    def zero(self):
        return Fraction(0) if self.is_exact else self.make(0)

    def work(self):
        """Context manager pinning mpmath's working precision.

        Every public operation that does float-backend arithmetic runs its
        body under this, so results never depend on the caller's global
        mpmath state.  Harmless (and cheap) on the exact backend.
        """
        return mpmath.workprec(self.prec)

    def eps(self):
        """Sign-test threshold: 2^(-prec/2); exact backend compares against 0."""
        if self.is_exact:
            return Fraction(0)
        return mpmath.mpf(2) ** (-(self.prec // 2))

    # -- transcendental helpers (always mpf output) ----------------------

    def log(self, x):
        with mpmath.workprec(self.prec):
            return mpmath.log(self._to_mpf(x))

    def exp(self, x):
        with mpmath.workprec(self.prec):
            return mpmath.exp(self._to_mpf(x))

    def sqrt(self, x):
        with mpmath.workprec(self.prec):
            return mpmath.sqrt(self._to_mpf(x))

    def _to_mpf(self, x):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)

    # -- serialization ---------------------------------------------------

    def to_str(self, x) -> str:
        """Decimal/rational string that round-trips at this precision."""
        if isinstance(x, Fraction):
            return str(x)
        if isinstance(x, int):
            return str(x)
        return mpmath.nstr(
            mpmath.mpf(x), _dps_for(self.prec), strip_zeros=False
        )


EXACT_CTX = Context(EXACT)
FLOAT_CTX = Context(FLOAT, DEFAULT_PREC)


def float_ctx(prec: int = DEFAULT_PREC) -> Context:
    return Context(FLOAT, prec)


def scalar_is_integral(x) -> bool:
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    return mpmath.isint(x)
