from fractions import Fraction
from math import comb, factorial

import pytest

from wehler import (
    Context,
    NotBig,
    NotIntegral,
    NotNef,
    apply_word,
    h0_nef_big,
    sandwich_constant,
    symmetric_profile,
    top_intersection,
    u_vector,
    vector,
    vol_k,
    volume,
)

from conftest import make_rng, random_nef, random_reduced_word


def test_symmetric_profile_anchor():
    taus = symmetric_profile(vector(3, (1, 2, 3, 4)))
    assert taus == (1, 10, 35, 50, 24)


def test_vol_k_anchors():
    v = vector(3, (1, 2, 3, 4))
    assert vol_k(v, 0) == 1
    assert vol_k(v, 1) == 10
    assert vol_k(v, 3) == 50
    assert vol_k(v, 4) == 24
    with pytest.raises(NotNef):
        vol_k(v, 5)
    with pytest.raises(NotNef):
        vol_k(v, -1)


def test_vol_k_invariant_under_wall_crossings():
    rng = make_rng(11)
    for _ in range(40):
        n = rng.randint(2, 5)
        v = random_nef(rng, n, lo=1)
        word = random_reduced_word(rng, n, rng.randint(1, 8))
        moved = apply_word(word, v)
        for k in range(n + 2):
            assert vol_k(moved, k) == vol_k(v, k)


def test_top_intersection_anchors():
    assert top_intersection(u_vector(3)) == 48
    assert top_intersection(vector(3, (1, 2, 3, 4))) == 2 * 6 * 50
    for n in range(2, 7):
        assert top_intersection(u_vector(n)) == 2 * factorial(n) * comb(n + 1, n)
    with pytest.raises(NotNef):
        top_intersection(vector(3, (-1, 2, 2, 2)))


def test_volume_reduces_first():
    rng = make_rng(13)
    for _ in range(30):
        n = rng.randint(2, 5)
        v = random_nef(rng, n, lo=1)
        word = random_reduced_word(rng, n, rng.randint(1, 8))
        assert volume(apply_word(word, v)) == top_intersection(v)
    # scaling degree N on an already reduced class
    v = vector(3, (1, 1, 2, 2))
    assert volume(v.scale(3)) == 3**3 * volume(v)


def test_h0_anchors():
    assert h0_nef_big(u_vector(3)) == 16
    assert h0_nef_big(vector(3, (1, 2, 3, 4))) == 2 * (50 + 10)
    assert h0_nef_big(vector(3, (0, 1, 1, 1))) == 8
    assert h0_nef_big(vector(3, (2, 2, 2, 2))) == 80
    # even rank keeps the tau_0 term (chi of the zero class is 2)
    assert h0_nef_big(u_vector(4)) == 2 * (comb(5, 4) + comb(5, 2) + 1)


def test_h0_domain_guards():
    with pytest.raises(NotIntegral):
        h0_nef_big(vector(3, (Fraction(1, 2), 1, 1, 1)))
    with pytest.raises(NotNef):
        h0_nef_big(vector(3, (-1, 1, 1, 1)))
    with pytest.raises(NotBig):
        h0_nef_big(vector(3, (0, 0, 1, 1)))


def test_sandwich_constants():
    assert sandwich_constant(2) == 2
    assert sandwich_constant(3) == 5
    assert sandwich_constant(4) == 12
    assert sandwich_constant(5) == 27
    assert sandwich_constant(6) == 58


def test_sandwich_inequality_samples():
    rng = make_rng(17)
    for _ in range(200):
        n = rng.randint(3, 6)
        g = random_nef(rng, n, lo=0, hi=9)
        h0 = h0_nef_big(g)
        low = top_intersection(g) // factorial(n)
        assert low <= h0 <= sandwich_constant(n) * low


def test_float_backend_tracks_exact():
    ctx = Context("float", 128)
    v_exact = vector(3, (1, 2, 3, 4))
    v_float = vector(3, (1, 2, 3, 4), ctx)
    assert float(vol_k(v_float, 3)) == pytest.approx(float(vol_k(v_exact, 3)))
    assert float(top_intersection(v_float)) == pytest.approx(600.0)
