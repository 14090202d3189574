r"""Binary Hermitian forms $f(X, Z) = aX\bar X + 2\Re(bX\bar Z) + d Z\bar Z$ over $O_d$.

A form is stored by its coefficient matrix $[[a, b], [\bar b, d]]$ (the diagonal
entry $d$ is called ``dd`` to keep it apart from the field parameter). Positive
definite forms correspond to points of $\mathbb{H}^3$ through

    xi(f) = (-b/a, Delta/a^2)        (second coordinate is t^2)

and a group element g acts by f -> f o g^{-1}, which makes xi equivariant.
"""

import logging
import math
from fractions import Fraction

import attrs

from bianchi_height.modules.domain import in_F
from bianchi_height.modules.errors import NotPositiveDefiniteError, ReductionError
from bianchi_height.modules.geometry import D_sq, GroupElem, Point, height_sq, inverse
from bianchi_height.modules.reduce import ReductionCertificate, certificate_bound, reduce
from bianchi_height.modules.ring import AlgInt, FieldElem, norm, ring_context

logger = logging.getLogger(__name__)


@attrs.frozen
class HermitianForm:
    """Integral form [[a, b], [conj(b), dd]] with a, dd in Z and b in O_d."""

    a: int
    b: AlgInt
    dd: int

    @property
    def d(self) -> int:
        return self.b.d

    def __str__(self) -> str:
        return f"({self.a}, {self.b}, {self.dd})"


@attrs.frozen
class KdHermitianForm:
    """Form with entries in K_d; the representative (1, -z, |z|^2 + s) of xi^-1(z, s)."""

    a: Fraction
    b: FieldElem
    dd: Fraction

    def clear_denominators(self) -> HermitianForm:
        """Scale by the least positive integer lambda making the form integral."""
        coords = self.b.coords()
        lam = math.lcm(self.a.denominator, self.dd.denominator, *(c.denominator for c in coords))
        b = self.b.scale(lam).to_integer()
        return HermitianForm(int(self.a * lam), b, int(self.dd * lam))


@attrs.frozen
class FormReduction:
    g: GroupElem
    f_red: HermitianForm
    certificate: ReductionCertificate
    point_bound_ok: bool
    form_bound_ok: bool


def discriminant(f: HermitianForm) -> int:
    return f.a * f.dd - norm(f.b)


def is_positive_definite(f: HermitianForm) -> bool:
    return f.a > 0 and discriminant(f) > 0


def _require_definite(f: HermitianForm) -> None:
    if not is_positive_definite(f):
        raise NotPositiveDefiniteError(f"form {f} is not positive definite (Delta = {discriminant(f)})")


def xi(f: HermitianForm) -> Point:
    _require_definite(f)
    return Point(f.b.to_field().scale(Fraction(-1, f.a)), Fraction(discriminant(f), f.a * f.a))


def xi_inverse(p: Point) -> KdHermitianForm:
    return KdHermitianForm(Fraction(1), -p.z, p.z.abs_sq() + p.s)


def act(g: GroupElem, f: HermitianForm) -> HermitianForm:
    """rho(g) f = f o g^-1, i.e. the matrix N^* A N with N = g^-1."""
    _require_definite(f)
    n = inverse(g)
    n11, n12, n21, n22 = n.alpha, n.beta, n.gamma, n.delta
    a, b, dd = f.a, f.b, f.dd
    a11 = a * norm(n11) + (n11.conj() * b * n21).trace() + dd * norm(n21)
    a12 = n11.conj() * (n12 * a + b * n22) + n21.conj() * (b.conj() * n12 + n22 * dd)
    a22 = a * norm(n12) + (n12.conj() * b * n22).trace() + dd * norm(n22)
    return HermitianForm(a11, a12, a22)


def form_height_sq(f: HermitianForm) -> int:
    _require_definite(f)
    return max(f.a * f.a, norm(f.b), f.dd * f.dd)


def is_reduced(f: HermitianForm) -> bool:
    return in_F(ring_context(f.d), xi(f))


def lemma41_check(f: HermitianForm) -> bool:
    """D(xi(f))^2 <= H(f)^2 / Delta(f), in exact rationals."""
    return D_sq(xi(f)) <= Fraction(form_height_sq(f), discriminant(f))


def reduce_form(f: HermitianForm) -> FormReduction:
    """The element carrying xi(f) into F_d, applied to f.

    Both height bounds are checked: against D(xi(f))^2 and against H(f)^2 / Delta.
    """
    ctx = ring_context(f.d)
    cert = reduce(ctx, xi(f))
    g = cert.gamma
    f_red = act(g, f)
    if not is_reduced(f_red):
        raise ReductionError(f"form {f} did not reduce: got {f_red}")
    if discriminant(f_red) != discriminant(f):
        raise ReductionError(f"discriminant changed reducing {f}")
    h = height_sq(g)
    point_ok = h <= certificate_bound(ctx, cert.d_sq)
    form_ok = h <= certificate_bound(ctx, Fraction(form_height_sq(f), discriminant(f)))
    logger.debug("reduced form %s to %s with height_sq %s", f, f_red, h)
    return FormReduction(g, f_red, cert, point_ok, form_ok)
