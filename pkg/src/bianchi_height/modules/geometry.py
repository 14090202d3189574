r"""Upper half-space $\mathbb{H}^3$ with exact $K_d$-rational points and the action of $PSL(2, O_d)$.

A point $(z, t)$ is stored as $(z, s)$ with $s = t^2$: the action, the function $D$
and membership in the fundamental domain only ever need $t^2$, so everything
stays rational.
"""

import logging
from fractions import Fraction
from typing import Iterator, Tuple

import attrs

from bianchi_height.modules.ring import (
    AlgInt,
    FieldElem,
    RingContext,
    ideal_norm,
    norm,
    units,
)

logger = logging.getLogger(__name__)

# S = Z/2 x Z/2 acting by (inverse, transpose)
S_ELEMENTS = ((0, 0), (1, 0), (0, 1), (1, 1))


def _positive(instance, attribute, value):
    if value <= 0:
        raise ValueError(f"{attribute.name} must be positive, got {value}")


@attrs.frozen
class Point:
    """(z, s) in H^3 with s = t^2 > 0."""

    z: FieldElem
    s: Fraction = attrs.field(converter=Fraction, validator=_positive)

    @property
    def d(self) -> int:
        return self.z.d


@attrs.frozen
class GroupElem:
    """[[alpha, beta], [gamma, delta]] in SL(2, O_d), stored as its canonical representative modulo +-I.

    The canonical representative is the one whose first nonzero entry, read in
    the order alpha, beta, gamma, delta, has lexicographically positive (a, b).
    """

    alpha: AlgInt
    beta: AlgInt
    gamma: AlgInt
    delta: AlgInt

    def __attrs_post_init__(self):
        det = self.alpha * self.delta - self.beta * self.gamma
        if det.key() != (1, 0):
            raise ValueError(f"determinant is {det}, not 1")
        lead = next(x for x in self.entries() if x)
        if not lead.is_lex_positive():
            for name in ("alpha", "beta", "gamma", "delta"):
                object.__setattr__(self, name, -getattr(self, name))

    @property
    def d(self) -> int:
        return self.alpha.d

    def entries(self) -> Tuple[AlgInt, AlgInt, AlgInt, AlgInt]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def key(self) -> tuple:
        return tuple(x.key() for x in self.entries())

    def is_identity(self) -> bool:
        return self.key() == ((1, 0), (0, 0), (0, 0), (1, 0))

    def is_upper_triangular(self) -> bool:
        return not self.gamma


@attrs.frozen(eq=False)
class ProjPoint:
    """(x : y) in P^1(K_d) with x, y in O_d not both zero."""

    x: AlgInt
    y: AlgInt

    def __attrs_post_init__(self):
        if not self.x and not self.y:
            raise ValueError("(0 : 0) is not a projective point")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.x * other.y == other.x * self.y

    def __hash__(self) -> int:
        if not self.y:
            return hash(("inf", self.x.d))
        return hash(self.x.to_field() / self.y.to_field())


# ---------------- MATRICES ---------------- #


def identity(ctx: RingContext) -> GroupElem:
    return GroupElem(ctx.one, ctx.zero, ctx.zero, ctx.one)


def compose(m: GroupElem, n: GroupElem) -> GroupElem:
    return GroupElem(
        m.alpha * n.alpha + m.beta * n.gamma,
        m.alpha * n.beta + m.beta * n.delta,
        m.gamma * n.alpha + m.delta * n.gamma,
        m.gamma * n.beta + m.delta * n.delta,
    )


def inverse(m: GroupElem) -> GroupElem:
    return GroupElem(m.delta, -m.beta, -m.gamma, m.alpha)


def transpose(m: GroupElem) -> GroupElem:
    return GroupElem(m.alpha, m.gamma, m.beta, m.delta)


def s_action(s: Tuple[int, int], m: GroupElem) -> GroupElem:
    """Action of (i, k) in S = Z/2 x Z/2: iota = inverse, kappa = transpose."""
    i, k = s
    if i:
        m = inverse(m)
    if k:
        m = transpose(m)
    return m


def height_sq(m: GroupElem) -> int:
    return max(norm(x) for x in m.entries())


def stabilizer_element(u: AlgInt, mu: AlgInt) -> GroupElem:
    """[[u, mu], [0, u^-1]], acting on the boundary plane by z -> u^2 z + u mu."""
    return GroupElem(u, mu, u - u, u.conj())


def stabilizer_elements(ctx: RingContext, mus) -> Iterator[GroupElem]:
    seen = set()
    for u in units(ctx):
        for mu in mus:
            g = stabilizer_element(u, mu)
            if g not in seen:
                seen.add(g)
                yield g


# ---------------- ACTION ---------------- #


def apply(m: GroupElem, p: Point) -> Point:
    """M(z, t) by the coordinate formula, with denominator |gamma z + delta|^2 + |gamma|^2 t^2."""
    z, s = p.z, p.s
    w = m.gamma * z + m.delta
    q = w.abs_sq() + norm(m.gamma) * s
    num = (m.alpha * z + m.beta) * w.conj() + (m.alpha * m.gamma.conj()).to_field().scale(s)
    return Point(num.scale(1 / q), s / (q * q))


def action_denominator(m: GroupElem, p: Point) -> Fraction:
    return (m.gamma * p.z + m.delta).abs_sq() + norm(m.gamma) * p.s


def apply_boundary(m: GroupElem, q: ProjPoint) -> ProjPoint:
    return ProjPoint(m.alpha * q.x + m.beta * q.y, m.gamma * q.x + m.delta * q.y)


def D_sq(p: Point) -> Fraction:
    """D(z, t)^2 = max{1, |z|^2, 1/t^2}."""
    return max(Fraction(1), p.z.abs_sq(), 1 / p.s)


def proj_height_sq(q: ProjPoint) -> Fraction:
    return Fraction(max(norm(q.x), norm(q.y)), ideal_norm(q.x, q.y))


def is_stabilizer(m: GroupElem) -> bool:
    """Whether m fixes the cusp at infinity, i.e. gamma = 0."""
    return m.is_upper_triangular()
