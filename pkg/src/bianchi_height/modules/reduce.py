r"""Reduction of $K_d$-rational points of $\mathbb{H}^3$ into $\mathcal{F}_d$ with exact height certificates.

The reduction runs in two steps. First a matrix $\tau$ built from the pair
attaining $m^*$ lifts the point into $\mathcal{B}_d$; then an element $\sigma$ of
the stabilizer of infinity moves it over $\mathcal{P}_d$ without changing its
height. The certificate records $\gamma = \sigma\tau$ and checks

    height_sq(gamma) <= (16 C_d^2)^2 * D_sq(P)^2

exactly, along with the intermediate inequalities of the argument.
"""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import attrs

from bianchi_height.modules.domain import (
    MuWitness,
    in_B,
    in_F,
    in_P,
    mu_witness,
    polygon_radius_sq,
)
from bianchi_height.modules.errors import ReductionError
from bianchi_height.modules.geometry import (
    D_sq,
    GroupElem,
    Point,
    apply,
    compose,
    height_sq,
    identity,
    stabilizer_element,
)
from bianchi_height.modules.ring import (
    FieldElem,
    RingContext,
    SurdValue,
    bezout_bounded,
    lattice_points_in_disk,
    norm,
    ring_context,
    units,
)

logger = logging.getLogger(__name__)

ALREADY_IN_F = "already_in_F"
UNIT_COLUMN = "unit_column"
GENERAL = "general"
BRANCHES = (ALREADY_IN_F, UNIT_COLUMN, GENERAL)

# checks that must hold; a failure raises ReductionError
ASSERTED_CHECKS = ("bezout_bounds", "mtx", "normzprime", "translate_radius", "submultiplicative")


@attrs.frozen
class ReductionCertificate:
    point: Point
    gamma: GroupElem
    image: Point
    d_sq: Fraction
    height_sq: int
    bound_ok: bool
    branch: str = attrs.field(validator=attrs.validators.in_(BRANCHES))
    checks: Dict[str, bool] = attrs.field(factory=dict, hash=False)


@attrs.frozen
class _LiftStep:
    tau: GroupElem
    image: Point
    witness: MuWitness
    branch: str
    checks: Dict[str, bool] = attrs.field(factory=dict, hash=False)


def certificate_bound(ctx: RingContext, d_sq: Fraction) -> SurdValue:
    """(16 C_d^2)^2 * D_sq^2, the squared form of c(d) D^2 with c(d) = 16 C_d^2."""
    c2 = ctx.c_d_sq
    return c2 * c2 * (256 * d_sq * d_sq)


def _sqrt_sum_bound(h: Fraction, x: Fraction, y) -> bool:
    """sqrt(h) <= sqrt(x) + sqrt(y) for rationals h, x >= 0 and y rational or SurdValue, decided exactly."""
    slack = h - x - y
    if slack <= 0:
        return True
    return slack * slack <= 4 * x * y


# ---------------- STEP 1: LIFT INTO B ---------------- #


def _unit_column_tau(ctx: RingContext, witness: MuWitness) -> GroupElem:
    """Least canonical height-1 element with bottom row (gamma0, 0), gamma0 a unit."""
    inv = witness.gamma0.conj()
    options = [GroupElem(alpha, -inv, witness.gamma0, ctx.zero) for alpha in [ctx.zero] + units(ctx)]
    return min(options, key=GroupElem.key)


def _lift_into_B(ctx: RingContext, p: Point, witness: MuWitness) -> _LiftStep:
    if witness.m_star >= 1:
        return _LiftStep(identity(ctx), p, witness, UNIT_COLUMN)

    gamma0, delta0 = witness.gamma0, witness.delta0
    checks = {}
    if not delta0:
        tau = _unit_column_tau(ctx, witness)
        branch = UNIT_COLUMN
    else:
        alpha0, beta0 = bezout_bounded(delta0, -gamma0)
        tau = GroupElem(alpha0, beta0, gamma0, delta0)
        branch = GENERAL
        c2 = ctx.c_d_sq
        n_gamma = norm(gamma0)
        d_sq = D_sq(p)
        h = height_sq(tau)
        checks["bezout_bounds"] = norm(alpha0) <= c2 * n_gamma and norm(beta0) <= c2 * norm(delta0)
        checks["mtx"] = n_gamma <= h and h <= c2 * (4 * n_gamma * d_sq)

    image = apply(tau, p)
    if image.s != p.s / (witness.m_star * witness.m_star):
        raise ReductionError(f"lift of {p} did not reach height s/m*^2")
    if not in_B(ctx, image):
        raise ReductionError(f"lift of {p} is not in B_d: {image}")
    if branch == GENERAL:
        checks["normzprime"] = image.z.abs_sq() <= ctx.c_d_sq * (9 * D_sq(p) / norm(gamma0))
    logger.debug("lift into B via %s branch, tau=%s", branch, tau)
    return _LiftStep(tau, image, witness, branch, checks)


def reduce_to_B(ctx: RingContext, p: Point) -> Tuple[GroupElem, Point]:
    """(tau, tau(P)) with tau(P) in B_d, built from the pair attaining m*."""
    step = _lift_into_B(ctx, p, mu_witness(ctx, p))
    return step.tau, step.image


# ---------------- STEP 2: TRANSLATE OVER P ---------------- #


def _translate_search(ctx: RingContext, z1: FieldElem) -> GroupElem:
    if in_P(ctx, z1):
        return identity(ctx)
    r_sq = polygon_radius_sq(ctx)
    best = None
    # u and -u give the same rotation z -> u^2 z
    for u in units(ctx):
        if not u.is_lex_positive():
            continue
        w = (u * u) * z1
        for mu in lattice_points_in_disk(ctx, -w, r_sq):
            if not in_P(ctx, w + mu):
                continue
            sigma = stabilizer_element(u, u.conj() * mu)
            key = (height_sq(sigma), sigma.key())
            if best is None or key < best[0]:
                best = (key, sigma)
    if best is None:
        raise ReductionError(f"no stabilizer element moves {z1} into P_{ctx.d}")
    return best[1]


def translate_checks(ctx: RingContext, sigma: GroupElem, z1: FieldElem) -> Dict[str, bool]:
    h = height_sq(sigma)
    z_sq = z1.abs_sq()
    return {
        "ineqb": _sqrt_sum_bound(Fraction(h), z_sq, ctx.c_d_sq),
        "translate_radius": h <= 1 or _sqrt_sum_bound(Fraction(h), z_sq, polygon_radius_sq(ctx)),
    }


def translate_to_P(ctx: RingContext, z1: FieldElem) -> GroupElem:
    """Element z -> u^2 z + u mu of the stabilizer of infinity carrying z1 into P_d.

    Among all such elements the one of least height is returned, ties going to
    the lexicographically least canonical matrix.
    """
    sigma = _translate_search(ctx, z1)
    checks = translate_checks(ctx, sigma, z1)
    if not checks["ineqb"]:
        logger.warning("H(sigma) <= |z'| + C_d fails for z'=%s, height_sq=%s", z1, height_sq(sigma))
    if not checks["translate_radius"]:
        raise ReductionError(f"translation for {z1} exceeds the polygon radius bound")
    return sigma


# ---------------- FULL REDUCTION ---------------- #


def reduce(ctx: RingContext, p: Point) -> ReductionCertificate:
    d_sq = D_sq(p)
    witness = mu_witness(ctx, p)
    if witness.m_star >= 1 and in_P(ctx, p.z):
        return ReductionCertificate(
            p, identity(ctx), p, d_sq, 1, 1 <= certificate_bound(ctx, d_sq), ALREADY_IN_F, {}
        )

    step = _lift_into_B(ctx, p, witness)
    sigma = translate_to_P(ctx, step.image.z)
    gamma = compose(sigma, step.tau)
    image = apply(gamma, p)
    if not in_F(ctx, image):
        raise ReductionError(f"reduction of {p} ended outside F_{ctx.d}: {image}")

    h = height_sq(gamma)
    checks = dict(step.checks)
    checks.update(translate_checks(ctx, sigma, step.image.z))
    checks["submultiplicative"] = h <= 4 * height_sq(sigma) * height_sq(step.tau)
    failed = [name for name in ASSERTED_CHECKS if name in checks and not checks[name]]
    if failed:
        raise ReductionError(f"reduction of {p}: checks {failed} failed")

    bound_ok = h <= certificate_bound(ctx, d_sq)
    if not bound_ok:
        logger.warning("certificate bound fails for %s: height_sq=%s", p, h)
    logger.debug("reduced %s via %s, height_sq=%s", p, step.branch, h)
    return ReductionCertificate(p, gamma, image, d_sq, h, bound_ok, step.branch, checks)


def intricacy_upper(ctx: RingContext, p: Point) -> int:
    return reduce(ctx, p).height_sq


def verify_certificate(ctx: RingContext, cert: ReductionCertificate) -> bool:
    """Recompute every claim of a certificate from its point and matrix."""
    p = cert.point
    return (
        apply(cert.gamma, p) == cert.image
        and in_F(ctx, cert.image)
        and D_sq(p) == cert.d_sq
        and height_sq(cert.gamma) == cert.height_sq
        and cert.height_sq <= certificate_bound(ctx, cert.d_sq)
        and cert.bound_ok
    )


# ---------------- SHARPNESS ---------------- #


@attrs.frozen
class SharpnessRow:
    n: int
    height_sq: int
    d_sq: Fraction
    ratio: Fraction


def sharpness_witness(n: int, ctx: Optional[RingContext] = None) -> Tuple[GroupElem, Point]:
    """sigma_n = [[n, 1 - n^2], [-1, n]] and the point it carries to (0, s = n^2)."""
    if n < 2:
        raise ValueError(f"sharpness family starts at n = 2, got {n}")
    ctx = ctx or ring_context(1)
    sigma = GroupElem(ctx.integer(n), ctx.integer(1 - n * n), ctx.integer(-1), ctx.integer(n))
    p = Point(ctx.field(Fraction(2 * n * n - 1, 2 * n)), Fraction(1, 4 * n * n))
    if apply(sigma, p) != Point(ctx.field(0), n * n):
        raise ReductionError(f"sigma_{n} does not carry its point to (0, {n * n})")
    if height_sq(sigma) != (n * n - 1) ** 2 or D_sq(p) != 4 * n * n:
        raise ReductionError(f"sigma_{n} has unexpected height data")
    return sigma, p


def sharpness_table(n_max: int, ctx: Optional[RingContext] = None) -> List[SharpnessRow]:
    rows = []
    for n in range(2, n_max + 1):
        sigma, p = sharpness_witness(n, ctx)
        d_sq = D_sq(p)
        rows.append(SharpnessRow(n, height_sq(sigma), d_sq, Fraction(n * n - 1, 4 * n * n)))
    return rows
