from fractions import Fraction

import pytest

from bianchi_height.modules.geometry import (
    S_ELEMENTS,
    D_sq,
    GroupElem,
    Point,
    ProjPoint,
    action_denominator,
    apply,
    apply_boundary,
    compose,
    height_sq,
    identity,
    inverse,
    is_stabilizer,
    proj_height_sq,
    s_action,
    stabilizer_element,
    stabilizer_elements,
    transpose,
)
from bianchi_height.modules.ring import ring_context

from quaternion_oracle import apply_by_quaternions


def test_canonical_representative_modulo_sign():
    ctx = ring_context(1)
    m = GroupElem(ctx.integer(-2), ctx.integer(3), ctx.integer(1), ctx.integer(-2))
    assert m.key() == ((2, 0), (-3, 0), (-1, 0), (2, 0))
    assert GroupElem(ctx.zero, ctx.integer(-1), ctx.one, ctx.zero) == GroupElem(ctx.zero, ctx.one, -ctx.one, ctx.zero)


def test_rejects_wrong_determinant():
    ctx = ring_context(2)
    with pytest.raises(ValueError):
        GroupElem(ctx.integer(2), ctx.zero, ctx.zero, ctx.one)


def test_identity_action():
    ctx = ring_context(3)
    p = Point(ctx.field(Fraction(1, 3), Fraction(2, 5)), Fraction(7, 2))
    assert apply(identity(ctx), p) == p


def test_inversion_example():
    ctx = ring_context(1)
    s = GroupElem(ctx.zero, -ctx.one, ctx.one, ctx.zero)
    # (z, t) -> (-conj(z), t) / (|z|^2 + t^2) for S = [[0, -1], [1, 0]]
    p = Point(ctx.field(1, 1), 2)
    image = apply(s, p)
    assert image == Point(ctx.field(Fraction(-1, 4), Fraction(1, 4)), Fraction(2, 16))


def test_action_is_a_group_action(make_group_elem, make_point):
    for d in (1, 2, 3, 5):
        ctx = ring_context(d)
        for _ in range(500):
            g, h = make_group_elem(ctx), make_group_elem(ctx)
            p = make_point(ctx)
            assert apply(compose(g, h), p) == apply(g, apply(h, p))
            assert apply(inverse(g), apply(g, p)) == p


def test_action_matches_quaternion_formula(make_group_elem, make_point):
    for d in (1, 2, 3, 5):
        ctx = ring_context(d)
        for _ in range(500):
            g, p = make_group_elem(ctx), make_point(ctx)
            assert apply(g, p) == apply_by_quaternions(g, p), f"mismatch for {g} at {p}"


def test_denominator_scales_height(make_group_elem, make_point):
    ctx = ring_context(2)
    for _ in range(30):
        g, p = make_group_elem(ctx), make_point(ctx)
        q = action_denominator(g, p)
        assert apply(g, p).s == p.s / (q * q)


def test_inverse_and_transpose():
    ctx = ring_context(5)
    g = GroupElem(ctx.integer(2), ctx.integer(3), ctx.integer(1), ctx.integer(2))
    assert compose(g, inverse(g)).is_identity()
    assert transpose(transpose(g)) == g
    assert s_action((0, 0), g) == g
    assert s_action((1, 1), g) == transpose(inverse(g))
    assert all(height_sq(s_action(s, g)) == height_sq(g) for s in S_ELEMENTS)


def test_height_examples():
    ctx = ring_context(1)
    g = GroupElem(ctx.integer(2), ctx.integer(-3), ctx.integer(-1), ctx.integer(2))
    assert height_sq(g) == 9
    assert height_sq(identity(ctx)) == 1


def test_submultiplicative_height(make_group_elem):
    for d in (1, 3, 7):
        ctx = ring_context(d)
        for _ in range(30):
            g, h = make_group_elem(ctx), make_group_elem(ctx)
            assert height_sq(compose(g, h)) <= 4 * height_sq(g) * height_sq(h)


def test_D_sq():
    ctx = ring_context(1)
    assert D_sq(Point(ctx.field(Fraction(7, 4)), Fraction(1, 16))) == 16
    assert D_sq(Point(ctx.field(0), 4)) == 1
    assert D_sq(Point(ctx.field(3, 0), 4)) == 9


def test_stabilizer_moves_boundary_plane():
    ctx = ring_context(1)
    i = ctx.integer(0, 1)
    sigma = stabilizer_element(i, ctx.one)
    p = Point(ctx.field(Fraction(1, 4), Fraction(-1, 4)), 3)
    # z -> i^2 z + i * 1 = -z + i
    assert apply(sigma, p) == Point(ctx.field(Fraction(-1, 4), Fraction(5, 4)), 3)
    assert is_stabilizer(sigma)
    elems = list(stabilizer_elements(ctx, [ctx.zero, ctx.one]))
    assert len(elems) == len(set(elems))
    assert all(is_stabilizer(g) for g in elems)


def test_projective_points():
    ctx = ring_context(1)
    two, one = ctx.integer(2), ctx.one
    assert ProjPoint(two, two) == ProjPoint(one, one)
    assert hash(ProjPoint(two, two)) == hash(ProjPoint(one, one))
    assert ProjPoint(two, ctx.zero) == ProjPoint(one, ctx.zero)
    assert proj_height_sq(ProjPoint(ctx.integer(3), ctx.integer(3))) == 1
    assert proj_height_sq(ProjPoint(ctx.integer(3), ctx.integer(2))) == 9
    with pytest.raises(ValueError):
        ProjPoint(ctx.zero, ctx.zero)


def test_boundary_action_is_compatible(make_group_elem):
    ctx = ring_context(2)
    q = ProjPoint(ctx.integer(3), ctx.integer(1, 1))
    for _ in range(20):
        g, h = make_group_elem(ctx), make_group_elem(ctx)
        assert apply_boundary(compose(g, h), q) == apply_boundary(g, apply_boundary(h, q))
