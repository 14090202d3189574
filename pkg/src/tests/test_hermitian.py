from fractions import Fraction

import pytest

from bianchi_height.modules.errors import NotPositiveDefiniteError
from bianchi_height.modules.geometry import D_sq, Point, apply, compose, identity
from bianchi_height.modules.hermitian import (
    HermitianForm,
    act,
    discriminant,
    form_height_sq,
    is_positive_definite,
    is_reduced,
    lemma41_check,
    reduce_form,
    xi,
    xi_inverse,
)
from bianchi_height.modules.ring import ring_context

D1, D2, D5 = ring_context(1), ring_context(2), ring_context(5)

UNIT_FORM = HermitianForm(1, D2.zero, 1)
F1 = HermitianForm(2, D1.integer(0, 1), 1)
F5 = HermitianForm(3, D5.integer(1, 1), 4)


def test_discriminant_examples():
    assert discriminant(UNIT_FORM) == 1
    assert discriminant(F1) == 1
    assert discriminant(F5) == 6


def test_positive_definite_examples():
    assert is_positive_definite(UNIT_FORM)
    assert not is_positive_definite(HermitianForm(-1, D2.zero, -1))
    assert not is_positive_definite(HermitianForm(1, D1.integer(1, 1), 1))


def test_xi_examples():
    assert xi(UNIT_FORM) == Point(D2.field(0), 1)
    assert xi(F1) == Point(D1.field(0, Fraction(-1, 2)), Fraction(1, 4))
    assert xi(F5) == Point(D5.field(Fraction(-1, 3), Fraction(-1, 3)), Fraction(6, 9))
    with pytest.raises(NotPositiveDefiniteError):
        xi(HermitianForm(1, D1.integer(1, 1), 1))


def test_xi_inverse_examples():
    rep = xi_inverse(Point(D1.field(0, Fraction(-1, 2)), Fraction(1, 4)))
    assert (rep.a, rep.b, rep.dd) == (1, D1.field(0, Fraction(1, 2)), Fraction(1, 2))
    assert rep.clear_denominators() == F1
    assert xi_inverse(Point(D2.field(0), 1)).clear_denominators() == UNIT_FORM


def test_xi_inverse_discriminant_is_s(make_point):
    for d in (1, 2, 3, 5):
        ctx = ring_context(d)
        for _ in range(20):
            p = make_point(ctx)
            rep = xi_inverse(p)
            assert rep.a * rep.dd - rep.b.abs_sq() == p.s
            f = rep.clear_denominators()
            assert xi(f) == p


def test_form_height_examples():
    assert form_height_sq(UNIT_FORM) == 1
    assert form_height_sq(F1) == 4
    assert form_height_sq(F5) == 16


def test_is_reduced_examples():
    assert is_reduced(UNIT_FORM)
    assert not is_reduced(F1)
    for d in (1, 2, 3, 7):
        assert is_reduced(HermitianForm(1, ring_context(d).zero, 4))


def test_lemma41_examples():
    assert lemma41_check(UNIT_FORM)
    assert D_sq(xi(F1)) == 4
    assert lemma41_check(F1)


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_lemma41_random_forms(d, make_form):
    ctx = ring_context(d)
    for _ in range(1000):
        f = make_form(ctx)
        assert lemma41_check(f), f"D(xi(f))^2 > H(f)^2/Delta for {f}"
        # height is never attained by |b| alone on a definite form
        assert form_height_sq(f) == max(f.a ** 2, f.dd ** 2)


def test_act_identity(make_form):
    ctx = ring_context(3)
    f = make_form(ctx)
    assert act(identity(ctx), f) == f


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_act_equivariance(d, make_form, make_group_elem):
    ctx = ring_context(d)
    for _ in range(500):
        f, g = make_form(ctx), make_group_elem(ctx)
        moved = act(g, f)
        assert xi(moved) == apply(g, xi(f)), f"equivariance fails for {g}, {f}"
        assert discriminant(moved) == discriminant(f)
        assert is_positive_definite(moved)


def test_act_is_compatible_with_composition(make_form, make_group_elem):
    ctx = ring_context(2)
    for _ in range(30):
        f, g, h = make_form(ctx), make_group_elem(ctx), make_group_elem(ctx)
        assert act(compose(g, h), f) == act(g, act(h, f))


def test_reduce_form_examples():
    result = reduce_form(F1)
    assert is_reduced(result.f_red)
    assert discriminant(result.f_red) == 1
    assert result.point_bound_ok and result.form_bound_ok
    assert result.f_red == act(result.g, F1)

    result = reduce_form(UNIT_FORM)
    assert result.g.is_identity()
    assert result.f_red == UNIT_FORM


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_reduce_form_random(d, make_form):
    ctx = ring_context(d)
    for _ in range(1000):
        f = make_form(ctx)
        result = reduce_form(f)
        assert is_reduced(result.f_red)
        assert discriminant(result.f_red) == discriminant(f)
        assert is_positive_definite(result.f_red)
        assert result.point_bound_ok and result.form_bound_ok
