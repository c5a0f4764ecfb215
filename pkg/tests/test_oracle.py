from fractions import Fraction
from math import factorial

import pytest

from wehler import (
    RingGuard,
    StepCapExceeded,
    chi_oracle,
    h0_nef_big,
    reduce_to_chamber,
    todd_class,
    u_vector,
    vector,
)
from wehler.oracle import (
    brute_force_reduce,
    integrate,
    poly_from_exp_linear,
    poly_linear,
    poly_mul,
    SquareFreePoly,
)

from conftest import make_rng, random_nef


def test_square_free_relation():
    n = 3
    x = poly_linear(n, (1, 0, 0, 0))
    sq = poly_mul(x, x)
    assert all(c == 0 for c in sq.coeffs)
    a = poly_linear(n, (1, 2, 0, 0))
    b = poly_linear(n, (0, 0, 3, 4))
    ab = poly_mul(a, b)
    ba = poly_mul(b, a)
    assert ab.coeffs == ba.coeffs
    # coefficient of omega_0 omega_2 is 1 * 3
    assert ab.coefficient((1 << 0) | (1 << 2)) == 3


def test_exp_of_linear_class():
    coords = (2, -1, 3, 5)
    e = poly_from_exp_linear(3, coords)
    # coefficient of omega_S is the product of coords over S
    assert e.coefficient(0) == 1
    assert e.coefficient(0b0011) == 2 * -1
    assert e.coefficient(0b1111) == 2 * -1 * 3 * 5
    assert e.degree_slice(1) == {
        1 << i: Fraction(c) for i, c in enumerate(coords) if c
    }


@pytest.mark.parametrize("n", range(2, 7))
def test_todd_class_slices(n):
    td = todd_class(n)
    assert td.coefficient(0) == 1
    for d in range(1, n + 1, 2):
        assert td.degree_slice(d) == {}
    two = td.degree_slice(2)
    masks = [m for m in range(1 << (n + 1)) if bin(m).count("1") == 2]
    assert set(two) == set(masks)
    assert all(c == Fraction(1, 3) for c in two.values())
    if n >= 4:
        four = td.degree_slice(4)
        assert all(c == Fraction(1, 5) for c in four.values())


@pytest.mark.parametrize("n", range(2, 7))
def test_integration_rule(n):
    # sigma_N integrates to 2(N+1): one N-subset per omitted index
    sigma_n = [Fraction(0)] * (1 << (n + 1))
    full = (1 << (n + 1)) - 1
    for i in range(n + 1):
        sigma_n[full ^ (1 << i)] = Fraction(1)
    assert integrate(SquareFreePoly(n, tuple(sigma_n))) == 2 * (n + 1)
    # sigma_1^N = N! sigma_N in the square-free ring
    sigma1 = poly_linear(n, [1] * (n + 1))
    power = sigma1
    for _ in range(n - 1):
        power = poly_mul(power, sigma1)
    assert integrate(power) == 2 * (n + 1) * factorial(n)


def test_chi_anchors():
    assert chi_oracle(u_vector(3)) == 16
    assert chi_oracle((1, 1, 1, 1)) == 16
    assert chi_oracle((0, 0, 0, 0)) == 0  # odd-dimensional structure sheaf
    assert chi_oracle((0, 0, 0, 0, 0)) == 2  # even-dimensional
    assert chi_oracle((0, 0, 0, 0, 0, 0)) == 0
    assert chi_oracle(vector(3, (1, 2, 3, 4))) == 120


def test_chi_matches_closed_form_spot():
    rng = make_rng(29)
    for _ in range(60):
        n = rng.randint(2, 6)
        g = random_nef(rng, n, lo=0, hi=3)
        assert chi_oracle(g) == h0_nef_big(g)


def test_ring_guard():
    with pytest.raises(RingGuard):
        todd_class(13)


def test_brute_force_reduce_basics():
    coords, word = brute_force_reduce((1, 1, 1, 1), depth=2, n=3)
    assert coords == (1, 1, 1, 1) and word == ()
    coords, word = brute_force_reduce(vector(3, (-1, 3, 3, 3)), depth=3)
    assert coords == (1, 1, 1, 1)
    assert word == (0,)
    deep = reduce_to_chamber(vector(3, (-1, 4, 4, 4)))
    assert deep.steps >= 1
    with pytest.raises(StepCapExceeded):
        brute_force_reduce(vector(3, (-11, 17, 23, 60)), depth=1)
