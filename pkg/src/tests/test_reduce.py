from fractions import Fraction

import pytest

from bianchi_height.modules.count import exact_intricacy
from bianchi_height.modules.domain import in_B, in_F, in_P, mu_witness
from bianchi_height.modules.geometry import D_sq, GroupElem, Point, apply, height_sq, is_stabilizer, stabilizer_element
from bianchi_height.modules.reduce import (
    ALREADY_IN_F,
    GENERAL,
    certificate_bound,
    intricacy_upper,
    reduce,
    reduce_to_B,
    sharpness_table,
    sharpness_witness,
    translate_to_P,
    verify_certificate,
)
from bianchi_height.modules.ring import ring_context


def test_reduce_to_B_example():
    ctx = ring_context(1)
    p = Point(ctx.field(Fraction(7, 4)), Fraction(1, 16))
    tau, p1 = reduce_to_B(ctx, p)
    assert p1.s == 4
    assert in_B(ctx, p1)
    assert apply(tau, p) == p1


def test_reduce_to_B_keeps_points_of_B():
    ctx = ring_context(2)
    p = Point(ctx.field(Fraction(5, 2)), 4)
    tau, p1 = reduce_to_B(ctx, p)
    assert tau.is_identity() and p1 == p


def test_reduce_to_B_height_is_s_over_m_star_sq(make_point):
    for d in (1, 2, 3, 5):
        ctx = ring_context(d)
        for _ in range(30):
            p = make_point(ctx)
            m = mu_witness(ctx, p).m_star
            _, p1 = reduce_to_B(ctx, p)
            assert in_B(ctx, p1)
            if m < 1:
                assert p1.s == p.s / (m * m)


def test_translate_to_P_examples():
    d2 = ring_context(2)
    sigma = translate_to_P(d2, d2.field(Fraction(5, 2)))
    assert sigma == GroupElem(d2.one, d2.integer(-2), d2.zero, d2.one)
    assert apply(sigma, Point(d2.field(Fraction(5, 2)), 1)).z == d2.field(Fraction(1, 2))

    d1 = ring_context(1)
    z1 = d1.field(Fraction(1, 4), Fraction(-1, 4))
    sigma = translate_to_P(d1, z1)
    assert sigma == stabilizer_element(d1.integer(0, 1), d1.zero)
    assert in_P(d1, apply(sigma, Point(z1, 1)).z)

    assert translate_to_P(d1, d1.field(0)).is_identity()


def test_translate_to_P_lands_in_P(rng):
    for d in (1, 2, 3, 5, 7, 11, 19):
        ctx = ring_context(d)
        for _ in range(40):
            z = ctx.field(Fraction(rng.randint(-60, 60), 7), Fraction(rng.randint(-60, 60), 11))
            sigma = translate_to_P(ctx, z)
            assert is_stabilizer(sigma)
            assert in_P(ctx, apply(sigma, Point(z, 1)).z)


def test_reduce_identity_certificate():
    ctx = ring_context(2)
    cert = reduce(ctx, Point(ctx.field(0), 4))
    assert cert.branch == ALREADY_IN_F
    assert cert.gamma.is_identity()
    assert cert.height_sq == 1
    assert intricacy_upper(ctx, Point(ctx.field(0), 4)) == 1


def test_reduce_sharpness_point():
    ctx = ring_context(1)
    p = Point(ctx.field(Fraction(7, 4)), Fraction(1, 16))
    cert = reduce(ctx, p)
    assert cert.branch == GENERAL
    assert cert.d_sq == 16
    assert in_F(ctx, cert.image)
    assert cert.bound_ok
    assert all(cert.checks[name] for name in ("bezout_bounds", "mtx", "normzprime", "submultiplicative"))
    assert cert.height_sq <= certificate_bound(ctx, Fraction(16))
    assert verify_certificate(ctx, cert)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 7, 11, 19])
def test_reduce_random_points(d, make_point):
    ctx = ring_context(d)
    for _ in range(500):
        p = make_point(ctx)
        cert = reduce(ctx, p)
        assert apply(cert.gamma, p) == cert.image, f"action mismatch at {p}"
        assert in_F(ctx, cert.image), f"image outside F at {p}"
        assert cert.d_sq == D_sq(p)
        assert cert.height_sq == height_sq(cert.gamma)
        assert cert.bound_ok, f"bound fails at {p}"


def test_reduce_is_idempotent(make_point):
    for d in (1, 2, 3, 5):
        ctx = ring_context(d)
        for _ in range(20):
            image = reduce(ctx, make_point(ctx)).image
            again = reduce(ctx, image)
            assert again.branch == ALREADY_IN_F
            assert again.image == image


def test_reduce_recovers_interior_point_from_its_orbit(make_group_elem):
    for d, z in ((2, (Fraction(1, 3), Fraction(1, 3))), (5, (Fraction(2, 5), Fraction(1, 3))), (7, (Fraction(1, 3), Fraction(1, 5)))):
        ctx = ring_context(d)
        p = Point(ctx.field(*z), 3)
        assert in_F(ctx, p)
        for _ in range(15):
            q = apply(make_group_elem(ctx, 2), p)
            assert reduce(ctx, q).image == p


def test_verify_certificate_rejects_tampering():
    ctx = ring_context(1)
    cert = reduce(ctx, Point(ctx.field(Fraction(7, 4)), Fraction(1, 16)))
    forged = type(cert)(cert.point, cert.gamma, cert.image, cert.d_sq, cert.height_sq + 1,
                        cert.bound_ok, cert.branch, cert.checks)
    assert not verify_certificate(ctx, forged)
    moved = type(cert)(cert.point, cert.gamma, Point(cert.image.z, cert.image.s * 2),
                       cert.d_sq, cert.height_sq, cert.bound_ok, cert.branch, cert.checks)
    assert not verify_certificate(ctx, moved)


def test_exact_intricacy_small_cases():
    ctx = ring_context(1)
    assert exact_intricacy(ctx, Point(ctx.field(0), 4), 1) == 1
    p = Point(ctx.field(0), Fraction(1, 4))
    # z -> -1/z lifts s = 1/4 to s = 4
    assert exact_intricacy(ctx, p, 1) == 1


def _intricacy_against_certificates(rng, ctx, height_cap, wanted):
    checked = 0
    while checked < wanted:
        p = Point(ctx.field(Fraction(rng.randint(-8, 8), 4), Fraction(rng.randint(-8, 8), 4)),
                  Fraction(rng.randint(1, 16), 16))
        cert = reduce(ctx, p)
        if cert.height_sq > height_cap:
            continue
        checked += 1
        best = exact_intricacy(ctx, p, cert.height_sq)
        assert best is not None and best <= cert.height_sq


def test_certificate_bounds_true_intricacy(rng):
    _intricacy_against_certificates(rng, ring_context(1), 25, 20)


def test_exact_intricacy_through_very_low_images():
    ctx = ring_context(1)
    p = Point(ctx.field(2, Fraction(-3, 4)), Fraction(1, 16))
    cert = reduce(ctx, p)
    bound = min(cert.height_sq, 25)
    best = exact_intricacy(ctx, p, bound)
    if cert.height_sq <= bound:
        assert best is not None
    assert best is None or best <= bound


@pytest.mark.slow
@pytest.mark.parametrize("d", [1, 2, 3])
def test_certificate_bounds_true_intricacy_large(rng, d):
    _intricacy_against_certificates(rng, ring_context(d), 100, 30)


def test_sharpness_witness_examples():
    ctx = ring_context(1)
    sigma, p = sharpness_witness(2)
    assert sigma == GroupElem(ctx.integer(2), ctx.integer(-3), ctx.integer(-1), ctx.integer(2))
    assert p == Point(ctx.field(Fraction(7, 4)), Fraction(1, 16))
    sigma, p = sharpness_witness(10)
    assert height_sq(sigma) == 9801
    assert D_sq(p) == 400
    with pytest.raises(ValueError):
        sharpness_witness(1)


def test_sharpness_family():
    rows = sharpness_table(100)
    assert [r.n for r in rows] == list(range(2, 101))
    for r in rows:
        n = r.n
        assert r.height_sq == (n * n - 1) ** 2
        assert r.d_sq == 4 * n * n
        assert Fraction(1, 8) < r.ratio < Fraction(1, 4)
    assert rows[0].ratio == Fraction(3, 16)
    assert rows[8].ratio == Fraction(99, 400)


def test_sharpness_family_other_fields():
    for d in (2, 3, 7):
        ctx = ring_context(d)
        sigma, p = sharpness_witness(5, ctx)
        assert apply(sigma, p) == Point(ctx.field(0), 25)
