from fractions import Fraction

import pytest

from math import lcm

from wehler import (
    BoundaryPointSpec,
    Context,
    DegenerateSpan,
    DimensionMismatch,
    EXACT_CTX,
    EmbeddingMap,
    ExplicitIsotropic,
    InvalidSpec,
    WehlerError,
    Word,
    apply_word,
    boundary_curve,
    cusp_triangle_arc,
    decompose,
    embed,
    fitted_slope,
    geometric_schedule,
    is_isotropic,
    materialize,
    materialize_with_certificate,
    norm_sq,
    omega_hat,
    pair,
    pair_with_u,
    parabolic_scan,
    ray_scan,
    reduce_to_chamber,
    reflect,
    u_vector,
    vector,
)


def test_explicit_isotropic_validation():
    ray = omega_hat(3, 0, 1)
    ok = ExplicitIsotropic(ray, (0, 1, 2))
    assert ok.support == (0, 1, 2)
    with pytest.raises(InvalidSpec):
        ExplicitIsotropic(ray, (1, 2, 3))  # pairs nontrivially with omega_0
    with pytest.raises(InvalidSpec):
        ExplicitIsotropic(ray, (0, 1))  # support too small
    with pytest.raises(InvalidSpec):
        ExplicitIsotropic(u_vector(3), (0, 1, 2))  # not isotropic
    with pytest.raises(InvalidSpec):
        ExplicitIsotropic(ray.scale(-1), (0, 1, 2))  # past-pointing


def test_spec_validation():
    with pytest.raises(InvalidSpec):
        BoundaryPointSpec(3, Word(()), {})  # needs some content
    with pytest.raises(InvalidSpec):
        BoundaryPointSpec(3, Word(()), {0: -1})
    with pytest.raises(InvalidSpec):
        BoundaryPointSpec(3, Word(()), {0: 1, 5: 1})
    with pytest.raises(InvalidSpec):
        BoundaryPointSpec(3, Word(()), {0: 1, 1: 1, 2: 1})  # |S_d| > N-1
    sched = geometric_schedule(3, 3, count=2)
    with pytest.raises(InvalidSpec):
        BoundaryPointSpec(3, Word(()), {0: 1}, sched)  # overlapping supports
    spec = BoundaryPointSpec(3, (0,), {3: Fraction(1, 2)}, sched)
    assert spec.s_d == (3,)
    assert spec.s_r == (0, 1, 2)
    assert spec.word.to_indices() == (0,)


def test_materialize_divergent_and_word():
    spec = BoundaryPointSpec(3, Word(()), {0: 2, 2: Fraction(1, 2)})
    vec, cert = materialize_with_certificate(spec)
    assert vec.coords == (2, 0, Fraction(1, 2), 0)
    assert cert.final_increment is None

    moved = BoundaryPointSpec(3, (1,), {0: 2, 2: Fraction(1, 2)})
    assert materialize(moved).coords == reflect(1, vec).coords


def test_materialize_schedule_truncation():
    sched = geometric_schedule(3, 3, count=3)
    spec = BoundaryPointSpec(3, Word(()), {}, sched)
    ctx = Context("float", 256)
    full, cert_full = materialize_with_certificate(spec, ctx)
    shallow, cert_shallow = materialize_with_certificate(
        spec, ctx, truncation_depth=2
    )
    assert len(cert_full.increments) == 2
    assert len(cert_shallow.increments) == 1
    # truncating earlier moves the point by roughly the dropped increment
    gap = max(abs(a - b) for a, b in zip(full.coords, shallow.coords))
    assert gap < 1e-6
    assert gap > 0
    with pytest.raises(InvalidSpec):
        materialize(spec, ctx, truncation_depth=0)


def test_parabolic_scan_exact_orbit():
    ray = omega_hat(3, 0, 1)
    hit = parabolic_scan(ray, (0, 1, 2))
    assert hit is not None
    word, ids, scale = hit
    assert word == () and set(ids) == {0, 1} and scale == 1

    moved = reflect(2, ray.scale(3))
    hit = parabolic_scan(moved, (0, 1, 2))
    assert hit is not None
    word, ids, scale = hit
    assert set(ids) == {0, 1}
    assert scale == 3
    rebuilt = apply_word(word, omega_hat(3, *ids).scale(scale))
    assert rebuilt.coords == moved.coords


def test_parabolic_scan_rejects_true_limit():
    sched = geometric_schedule(3, 3, count=3)
    from wehler import schedule_limit_vector

    vec, _ = schedule_limit_vector(sched, ctx=Context("float", 256))
    assert parabolic_scan(vec, (0, 1, 2)) is None


def test_decompose_folds_parabolic_content():
    moved = reflect(2, omega_hat(3, 0, 1))
    spec = BoundaryPointSpec(
        3, Word(()), {}, ExplicitIsotropic(moved, (0, 1, 2))
    )
    dec = decompose(spec)
    assert dec.s_r == ()
    assert all(c == 0 for c in dec.p_r.coords)
    total = dec.p_d + dec.p_r
    assert total.coords == moved.coords
    assert dec.s_d == (2, 3)  # support of the underlying nef-face vector


def test_decompose_keeps_genuine_recurrent_part():
    sched = geometric_schedule(3, 3, count=3)
    spec = BoundaryPointSpec(3, Word(()), {3: 1}, sched)
    ctx = Context("float", 256)
    dec = decompose(spec, ctx)
    assert dec.s_r == (0, 1, 2)
    assert dec.s_d == (3,)
    vec = materialize(spec, ctx)
    recon = dec.p_d + dec.p_r
    assert max(abs(a - b) for a, b in zip(recon.coords, vec.coords)) < 1e-40


def test_decompose_strips_stabilizer_letters():
    spec = BoundaryPointSpec(3, (2, 0), {2: 1})
    dec = decompose(spec)
    assert dec.coset_word.to_indices() == (2,)
    assert dec.p_d.coords == reflect(2, vector(3, (0, 0, 1, 0))).coords

    fixed = BoundaryPointSpec(3, (1, 0), {2: 1})
    dec = decompose(fixed)
    assert dec.coset_word.length == 0
    assert dec.p_d.coords == (0, 0, 1, 0)


def test_embedding_is_conformal():
    emb = EmbeddingMap(2, 4)
    assert emb.conformal_factor == Fraction(3, 1)
    v = vector(2, (1, 2, 3))
    w = vector(2, (2, 0, 1))
    ev, ew = emb(v), emb(w)
    assert pair(ev, ew) == 3 * pair(v, w)
    assert norm_sq(ev) == 3 * norm_sq(v)
    # image is orthogonal to the added basis directions
    for t in (3, 4):
        basis = vector(4, tuple(1 if s == t else 0 for s in range(5)))
        assert pair(ev, basis) == 0
    with pytest.raises(DimensionMismatch):
        embed(3, 3, vector(3, (1, 1, 1, 1)))
    with pytest.raises(DimensionMismatch):
        embed(2, 4, vector(3, (1, 1, 1, 1)))


def test_boundary_curve_endpoints_and_slice():
    p0 = omega_hat(3, 0, 1)
    p1 = omega_hat(3, 2, 3)
    ctx = Context("float", 256)
    c0 = boundary_curve(p0, p1, 0, ctx)
    c1 = boundary_curve(p0, p1, 1, ctx)
    assert max(abs(a - b) for a, b in zip(c0.coords, p0.coords)) < 1e-60
    assert max(abs(a - b) for a, b in zip(c1.coords, p1.coords)) < 1e-60
    for t in (Fraction(1, 8), Fraction(1, 3), Fraction(7, 9)):
        c = boundary_curve(p0, p1, t, ctx)
        assert abs(norm_sq(c)) < 1e-60
        assert abs(pair_with_u(c) - 4) < 1e-60
    # the arc midpoint lands on another cusp ray of the same slice
    mid = boundary_curve(p0, p1, Fraction(1, 2), ctx)
    ray = omega_hat(3, 1, 3, ctx)
    assert max(abs(a - b) for a, b in zip(mid.coords, ray.coords)) < 1e-60


def test_boundary_curve_guards():
    p0 = omega_hat(3, 0, 1)
    with pytest.raises(DegenerateSpan):
        boundary_curve(p0, p0.scale(2), Fraction(1, 2))
    with pytest.raises(Exception):
        boundary_curve(p0, omega_hat(3, 2, 3), 2)
    with pytest.raises(InvalidSpec):
        boundary_curve(u_vector(3), omega_hat(3, 2, 3), Fraction(1, 2))


def test_curve_points_make_valid_recurrent_programs():
    ctx = Context("float", 256)
    c = boundary_curve(omega_hat(3, 0, 1), omega_hat(3, 2, 3), Fraction(1, 5), ctx)
    assert is_isotropic(c)
    prog = ExplicitIsotropic(c, tuple(range(4)))
    spec = BoundaryPointSpec(3, Word(()), {}, prog)
    assert materialize(spec).coords == c.coords


def test_cusp_triangle_arc_anchors():
    c0 = cusp_triangle_arc(3, Fraction(0), EXACT_CTX)
    assert c0.coords == omega_hat(3, 0, 1, EXACT_CTX).coords
    c1 = cusp_triangle_arc(3, Fraction(1), EXACT_CTX)
    assert c1.coords == omega_hat(3, 1, 2, EXACT_CTX).coords
    # the midpoint is the wall-1 crossing of omega_hat(0,2), one step out
    mid = cusp_triangle_arc(3, Fraction(1, 2), EXACT_CTX).scale(3)
    assert reflect(1, mid).coords == omega_hat(3, 0, 2, EXACT_CTX).coords


def test_cusp_triangle_arc_isotropic_on_the_cusp_slice():
    for t in (Fraction(1, 3), Fraction(5, 32), Fraction(7, 9)):
        c = cusp_triangle_arc(3, t, EXACT_CTX)
        assert norm_sq(c) == 0
        assert pair_with_u(c) == 4
    for n in (4, 5, 6):
        c = cusp_triangle_arc(n, Fraction(2, 7), EXACT_CTX)
        assert norm_sq(c) == 0
        assert pair_with_u(c) == 2 * (n - 1)


def test_cusp_triangle_arc_rational_points_reduce_to_cusp_faces():
    # a rational parameter is a wall-crossing translate of a cusp ray:
    # clearing denominators, the reduction ends on a two-zero face vector
    # with equal nonzero coordinates, a volume-zero class
    for t in (Fraction(1, 3), Fraction(2, 5), Fraction(5, 32)):
        c = cusp_triangle_arc(3, t, EXACT_CTX)
        den = lcm(*(x.denominator for x in (Fraction(y) for y in c.coords)))
        res = reduce_to_chamber(c.scale(den))
        coords = res.reduced.coords
        nonzero = [x for x in coords if x != 0]
        assert len(nonzero) == 2
        assert nonzero[0] == nonzero[1]


def test_cusp_triangle_arc_generic_parameter_reads_half_n():
    ctx = Context("float", 256)
    with ctx.work():
        t = (ctx.sqrt(ctx.make(5)) - 1) / 2
    c = cusp_triangle_arc(3, t, ctx)
    table = ray_scan(c, u_vector(3, ctx), range(10, 31), ctx=ctx)
    slope = fitted_slope(table)
    with ctx.work():
        assert abs(slope - ctx.make(3) / 2) < 0.1


def test_cusp_triangle_arc_guards():
    with pytest.raises(InvalidSpec):
        cusp_triangle_arc(2, Fraction(1, 2))
    with pytest.raises(WehlerError):
        cusp_triangle_arc(3, 2)
