"""Membership in the fundamental domain F_d = {(z, t) : z in P_d, (z, t) in B_d}.

P_d is a closed fundamental polygon for the stabilizer of infinity acting on
the boundary plane, B_d is the region of points of maximal height in their
orbit. B_d is decided through the quantity

    m*(z, s) = min over coprime (gamma, delta) of |gamma z + delta|^2 + |gamma|^2 s

since (z, t) is in B_d exactly when m* >= 1.
"""

import logging
from fractions import Fraction
from typing import List, Tuple

import attrs

from bianchi_height.modules.geometry import Point
from bianchi_height.modules.ring import (
    AlgInt,
    FieldElem,
    RingContext,
    is_coprime,
    is_unit_normalized,
    lattice_points_in_disk,
    norm,
    round_to_lattice,
)

logger = logging.getLogger(__name__)


@attrs.frozen
class MuWitness:
    """A coprime pair attaining m* together with the value m*."""

    gamma0: AlgInt
    delta0: AlgInt
    m_star: Fraction


def polygon_radius_sq(ctx: RingContext) -> Fraction:
    """Squared radius of a disk about 0 containing P_d."""
    d = ctx.d
    if d == 1:
        return Fraction(1, 2)
    if d == 3:
        return Fraction(1, 3)
    if ctx.omega_mode:
        return 1 + Fraction(d, 4)
    return Fraction(1 + d)


def in_P(ctx: RingContext, z: FieldElem) -> bool:
    """Closed fundamental polygon of the stabilizer of infinity, in the coordinates z = A + B*sqrt(-d).

    d = 1: the rectangle |Re z| <= 1/2, 0 <= Im z <= 1/2.
    d = 3: the two triangles making up the region between Im z = 0 and the
    lines through 0 and (1 + sqrt(-3))/2 scaled to the 6-fold symmetry.
    otherwise: the parallelogram spanned by 1 and omega (halved in the
    omega direction when d = 3 (mod 4)).
    """
    A, B = z.A, z.B
    d = ctx.d
    if d == 1:
        return abs(A) <= Fraction(1, 2) and 0 <= B <= Fraction(1, 2)
    if d == 3:
        upper = A >= 0 and A / 3 <= B <= (1 - A) / 3
        lower = 0 <= A <= Fraction(1, 2) and -A / 3 <= B <= A / 3
        return upper or lower
    if ctx.omega_mode:
        return 0 <= A <= 1 and 0 <= B <= Fraction(1, 2)
    return 0 <= A <= 1 and 0 <= B <= 1


def _pair_value(gz: FieldElem, delta: AlgInt, gamma_part: Fraction) -> Fraction:
    return (gz + delta).abs_sq() + gamma_part


def enumerate_candidates(ctx: RingContext, p: Point) -> List[Tuple[AlgInt, AlgInt]]:
    """Every coprime (gamma, delta) with |gamma|^2 <= 1/s and |gamma z + delta| <= 1.

    Any pair with value at most 1 lies in this finite set, so m* is attained in it.
    """
    out = []
    for gamma in lattice_points_in_disk(ctx, ctx.field(0), 1 / p.s):
        gz = gamma * p.z
        for delta in lattice_points_in_disk(ctx, -gz, 1):
            if not gamma and not delta:
                continue
            if is_coprime(gamma, delta):
                out.append((gamma, delta))
    return out


def _gamma_shells(ctx: RingContext, p: Point, bound):
    """Lattice points gamma in order of increasing norm, while |gamma|^2 s <= bound().

    Disks of radius^2 1, 4, 16, ... are scanned one annulus at a time and each
    annulus is sorted by norm, so the outer radius follows the current best
    value instead of the worst-case 1/s.
    """
    seen = Fraction(-1)
    cap = Fraction(1)
    while seen * p.s < bound():
        outer = min(cap, bound() / p.s)
        shell = [g for g in lattice_points_in_disk(ctx, ctx.field(0), outer) if norm(g) > seen]
        shell.sort(key=norm)
        for gamma in shell:
            if norm(gamma) * p.s > bound():
                return
            yield gamma
        if outer < cap:
            return
        seen, cap = outer, cap * 4


def mu_witness(ctx: RingContext, p: Point) -> MuWitness:
    """The pair attaining m*, taken up to units and tie-broken lexicographically.

    Pairs (u gamma, u delta) for a unit u share their value; the witness is
    chosen among pairs whose first nonzero entry is unit-normalized, minimizing
    (value, |gamma|^2, gamma.a, gamma.b, delta.a, delta.b). The search radius
    shrinks to the best value found so far.
    """
    one = ctx.one
    best_key = (Fraction(1), 0, 0, 0, one.a, one.b)
    best = (ctx.zero, one)
    for gamma in _gamma_shells(ctx, p, lambda: best_key[0]):
        n_gamma = norm(gamma)
        gamma_part = n_gamma * p.s
        gz = gamma * p.z
        for delta in lattice_points_in_disk(ctx, -gz, best_key[0] - gamma_part):
            if not gamma and not delta:
                continue
            if not is_unit_normalized(ctx, gamma if gamma else delta):
                continue
            key = (_pair_value(gz, delta, gamma_part), n_gamma, gamma.a, gamma.b, delta.a, delta.b)
            if key < best_key and is_coprime(gamma, delta):
                best_key, best = key, (gamma, delta)
    logger.debug("m* = %s attained by %s", best_key[0], best)
    return MuWitness(best[0], best[1], best_key[0])


def in_B(ctx: RingContext, p: Point) -> bool:
    # (1, -lambda) with lambda nearest to z already decides most low points
    if (p.z - round_to_lattice(p.z)).abs_sq() + p.s < 1:
        return False
    return mu_witness(ctx, p).m_star >= 1


def in_F(ctx: RingContext, p: Point) -> bool:
    return in_P(ctx, p.z) and in_B(ctx, p)
