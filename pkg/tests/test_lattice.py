from fractions import Fraction

import pytest

from wehler import (
    BackendMismatch,
    Context,
    DimensionMismatch,
    EXACT_CTX,
    NotIntegral,
    alpha_vector,
    as_int_coords,
    form_constants,
    gram_matrix,
    is_isotropic,
    is_timelike_positive,
    norm_sq,
    omega,
    omega_hat,
    pair,
    pair_with_u,
    to_context,
    u_vector,
    vector,
    zero_vector,
)

from conftest import make_rng


def test_form_constants_anchors():
    assert form_constants(2) == (0, 1)
    assert form_constants(3) == (-1, 1)
    assert form_constants(6) == (-4, 1)
    with pytest.raises(DimensionMismatch):
        form_constants(1)


@pytest.mark.parametrize("n", range(2, 7))
def test_gram_matrix_matches_pair_on_basis(n):
    g = gram_matrix(n)
    for i in range(n + 1):
        for j in range(n + 1):
            assert g[i][j] == pair(omega(n, i), omega(n, j))
    assert g == [list(row) for row in zip(*g)]  # symmetric


@pytest.mark.parametrize("n", range(2, 7))
def test_distinguished_vectors(n):
    u = u_vector(n)
    assert norm_sq(u) == 2 * (n + 1)
    assert pair_with_u(u) == 2 * (n + 1)
    for i in range(n + 1):
        a = alpha_vector(n, i)
        assert norm_sq(a) == -2 * (n - 1)
        assert (u - omega(n, i).scale(2)).coords == a.coords
    h = omega_hat(n, 0, 1)
    assert norm_sq(h) == 0
    assert is_isotropic(h)
    assert pair_with_u(h) == 2 * (n - 1)
    assert (u - omega(n, 0) - omega(n, 1)).coords == h.coords


def test_omega_hat_needs_distinct_indices():
    with pytest.raises(DimensionMismatch):
        omega_hat(3, 2, 2)
    with pytest.raises(DimensionMismatch):
        omega_hat(3, 0, 4)


def test_pair_expansion_against_gram():
    rng = make_rng(101)
    for _ in range(50):
        n = rng.randint(2, 6)
        v = vector(n, [rng.randint(-9, 9) for _ in range(n + 1)])
        w = vector(n, [rng.randint(-9, 9) for _ in range(n + 1)])
        g = gram_matrix(n)
        brute = sum(
            v.coords[i] * g[i][j] * w.coords[j]
            for i in range(n + 1)
            for j in range(n + 1)
        )
        assert pair(v, w) == brute
        assert pair(v, w) == pair(w, v)
        assert pair_with_u(v) == 2 * sum(v.coords)


def test_vector_shape_and_backend_guards():
    with pytest.raises(DimensionMismatch):
        vector(3, (1, 2, 3))
    v = vector(3, (1, 2, 3, 4))
    w = vector(3, (1, 2, 3, 4), Context("float", 64))
    with pytest.raises(BackendMismatch):
        _ = v + w
    with pytest.raises(DimensionMismatch):
        _ = v + vector(4, (1, 2, 3, 4, 5))


def test_vector_arithmetic_exact():
    v = vector(3, (1, -2, 3, 0))
    w = vector(3, (2, 2, 2, 2))
    assert (v + w).coords == (3, 0, 5, 2)
    assert (w - v).coords == (1, 4, -1, 2)
    assert v.scale(Fraction(1, 2)).coords == (
        Fraction(1, 2),
        Fraction(-1),
        Fraction(3, 2),
        Fraction(0),
    )
    assert zero_vector(3).coords == (0, 0, 0, 0)


def test_as_int_coords_and_contexts():
    v = vector(3, ("1/2", 1, 2, 3))
    with pytest.raises(NotIntegral):
        as_int_coords(v)
    w = vector(3, (1, 2, 3, 4))
    assert as_int_coords(w) == (1, 2, 3, 4)
    f = to_context(w, Context("float", 128))
    assert as_int_coords(f) == (1, 2, 3, 4)
    assert f.is_integral()
    assert not v.is_integral()
    back = to_context(f, EXACT_CTX)
    assert back.coords == (Fraction(1), Fraction(2), Fraction(3), Fraction(4))


def test_cone_predicates_on_float_backend():
    ctx = Context("float", 128)
    u = u_vector(3, ctx)
    assert is_timelike_positive(u)
    h = omega_hat(3, 0, 1, ctx)
    assert is_isotropic(h)
    assert not is_timelike_positive(h)
    past = u.scale(-1)
    assert not is_timelike_positive(past)
