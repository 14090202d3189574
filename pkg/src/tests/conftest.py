import pathlib
import random
import sys
from fractions import Fraction

import pytest

here = pathlib.Path(__file__).parent.resolve()
sys.path.insert(0, str(here.parent))

from bianchi_height.modules.geometry import GroupElem, Point, compose
from bianchi_height.modules.hermitian import HermitianForm
from bianchi_height.modules.ring import norm, ring_context, units

SEED = 20240917


@pytest.fixture
def rng():
    return random.Random(SEED)


def random_rational(rng, bound, max_den=12):
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(-bound * den, bound * den), den)


def random_point(ctx, rng, z_max=10):
    """K_d-rational point with |z| <= z_max and s in [1/100, 100]."""
    while True:
        z = ctx.field(random_rational(rng, z_max), random_rational(rng, z_max))
        if z.abs_sq() <= z_max * z_max:
            break
    return Point(z, Fraction(rng.randint(1, 10000), 100))


def random_alg(ctx, rng, bound=4):
    return ctx.integer(rng.randint(-bound, bound), rng.randint(-bound, bound))


def random_group_elem(ctx, rng, steps=3, bound=2):
    """Word in translations, S = [[0, -1], [1, 0]] and unit diagonals."""
    zero, one = ctx.zero, ctx.one
    g = GroupElem(one, zero, zero, one)
    s = GroupElem(zero, -one, one, zero)
    us = units(ctx)
    for _ in range(steps):
        g = compose(g, GroupElem(one, random_alg(ctx, rng, bound), zero, one))
        if rng.random() < 0.3:
            u = rng.choice(us)
            g = compose(g, GroupElem(u, zero, zero, u.conj()))
        g = compose(g, s)
    return g


def random_definite_form(ctx, rng, bound=6):
    b = random_alg(ctx, rng, bound)
    a = rng.randint(1, 3 * bound)
    dd = norm(b) // a + rng.randint(1, 3 * bound)
    return HermitianForm(a, b, dd)


@pytest.fixture
def make_point(rng):
    return lambda ctx, z_max=10: random_point(ctx, rng, z_max)


@pytest.fixture
def make_group_elem(rng):
    return lambda ctx, steps=3: random_group_elem(ctx, rng, steps)


@pytest.fixture
def make_form(rng):
    return lambda ctx: random_definite_form(ctx, rng)


@pytest.fixture(params=[1, 2, 3, 5, 7, 11, 19])
def ctx(request):
    return ring_context(request.param)


@pytest.fixture
def config_path(tmp_path):
    return str(tmp_path / "bianchi-height.conf.json")
