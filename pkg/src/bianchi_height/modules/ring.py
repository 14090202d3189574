r"""Exact arithmetic in the ring of integers $O_d$ of $K_d = \mathbb{Q}(\sqrt{-d})$.

Elements of $O_d$ are stored as integer coordinates $(a, b)$ with respect to the
basis $\{1, \omega\}$, where $\omega = (-1+\sqrt{-d})/2$ when $d \equiv 3 \pmod 4$
and $\omega = \sqrt{-d}$ otherwise. Elements of $K_d$ are stored as rational
coordinates $(A, B)$ with respect to $\{1, \sqrt{-d}\}$, i.e. the complex number
$A + B\sqrt{d}\,i$. Everything here is exact; no floating point is involved.
"""

import functools
import logging
import math
from fractions import Fraction
from typing import Iterator, Optional, Tuple, Union

import attrs
import gmpy2
from sympy import factorint

from bianchi_height.modules.errors import (
    InvalidFieldError,
    NotCoprimeError,
    ReductionError,
    ZeroIdealError,
)

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


def _sign(x: Rational) -> int:
    return (x > 0) - (x < 0)


def _check_squarefree(instance, attribute, value):
    if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
        raise InvalidFieldError(f"d must be a positive integer, got {value!r}")
    if any(e > 1 for e in factorint(value).values()):
        raise InvalidFieldError(f"d must be squarefree, got {value}")


# ---------------- SURDS ---------------- #


@attrs.frozen
class SurdValue:
    r"""The real number $p + q\sqrt{m}$ with rational $p, q$ and a positive integer $m$.

    Signs are decided with rational comparisons only, so every inequality that
    involves $C_d = 1 + \varepsilon_d$ is evaluated exactly.
    """

    p: Fraction = attrs.field(converter=Fraction)
    q: Fraction = attrs.field(converter=Fraction)
    m: int

    def sign(self) -> int:
        sp, sq = _sign(self.p), _sign(self.q)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        # opposite signs: the larger square wins
        diff = self.p * self.p - self.q * self.q * self.m
        if diff > 0:
            return sp
        if diff < 0:
            return sq
        return 0

    def _coerce(self, other) -> "SurdValue":
        if isinstance(other, SurdValue):
            if other.m != self.m:
                raise ValueError(f"cannot mix sqrt({self.m}) and sqrt({other.m})")
            return other
        if isinstance(other, (int, Fraction)):
            return SurdValue(other, 0, self.m)
        return NotImplemented

    def __add__(self, other) -> "SurdValue":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return SurdValue(self.p + other.p, self.q + other.q, self.m)

    __radd__ = __add__

    def __neg__(self) -> "SurdValue":
        return SurdValue(-self.p, -self.q, self.m)

    def __sub__(self, other) -> "SurdValue":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "SurdValue":
        return (-self) + other

    def __mul__(self, other) -> "SurdValue":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return SurdValue(
            self.p * other.p + self.q * other.q * self.m,
            self.p * other.q + self.q * other.p,
            self.m,
        )

    __rmul__ = __mul__

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - other).sign() >= 0

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * math.sqrt(self.m)


# ---------------- CONTEXT ---------------- #


@attrs.frozen
class RingContext:
    """The ring O_d for a squarefree d > 0; read-only once built."""

    d: int = attrs.field(validator=_check_squarefree)

    @property
    def omega_mode(self) -> bool:
        """True when d = 3 (mod 4), i.e. omega = (-1 + sqrt(-d)) / 2."""
        return self.d % 4 == 3

    @property
    def eps_sq(self) -> Fraction:
        if self.omega_mode:
            return Fraction((1 + self.d) ** 2, 16 * self.d)
        return Fraction(1 + self.d, 4)

    @property
    def surd_m(self) -> int:
        return self.d if self.omega_mode else 1 + self.d

    @property
    def eps(self) -> SurdValue:
        if self.omega_mode:
            return SurdValue(0, Fraction(1 + self.d, 4 * self.d), self.d)
        return SurdValue(0, Fraction(1, 2), 1 + self.d)

    @property
    def c_d(self) -> SurdValue:
        return self.eps + 1

    @property
    def c_d_sq(self) -> SurdValue:
        return self.c_d * self.c_d

    @property
    def unit_count(self) -> int:
        return {1: 4, 3: 6}.get(self.d, 2)

    @property
    def omega_sq_const(self) -> int:
        # omega^2 = -omega - k when d = 3 (mod 4), omega^2 = -d otherwise
        return (1 + self.d) // 4 if self.omega_mode else self.d

    def integer(self, a: int, b: int = 0) -> "AlgInt":
        return AlgInt(a, b, self.d)

    def field(self, A: Rational, B: Rational = 0) -> "FieldElem":
        return FieldElem(Fraction(A), Fraction(B), self.d)

    @property
    def zero(self) -> "AlgInt":
        return AlgInt(0, 0, self.d)

    @property
    def one(self) -> "AlgInt":
        return AlgInt(1, 0, self.d)

    @property
    def omega(self) -> "AlgInt":
        return AlgInt(0, 1, self.d)


@functools.lru_cache(maxsize=None)
def ring_context(d: int) -> RingContext:
    return RingContext(d)


def _ctx_of(x) -> RingContext:
    return ring_context(x.d)


# ---------------- ELEMENTS ---------------- #


@attrs.frozen
class AlgInt:
    """The algebraic integer a + b*omega of O_d."""

    a: int
    b: int
    d: int

    def _lift(self, other) -> "AlgInt":
        if isinstance(other, AlgInt):
            if other.d != self.d:
                raise ValueError(f"elements of O_{self.d} and O_{other.d} do not mix")
            return other
        if isinstance(other, int):
            return AlgInt(other, 0, self.d)
        return NotImplemented

    def __add__(self, other) -> "AlgInt":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return AlgInt(self.a + other.a, self.b + other.b, self.d)

    __radd__ = __add__

    def __neg__(self) -> "AlgInt":
        return AlgInt(-self.a, -self.b, self.d)

    def __sub__(self, other) -> "AlgInt":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return AlgInt(self.a - other.a, self.b - other.b, self.d)

    def __rsub__(self, other) -> "AlgInt":
        return (-self) + other

    def __mul__(self, other) -> "AlgInt":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        if self.d % 4 == 3:
            k = (1 + self.d) // 4
            return AlgInt(a1 * a2 - k * b1 * b2, a1 * b2 + a2 * b1 - b1 * b2, self.d)
        return AlgInt(a1 * a2 - self.d * b1 * b2, a1 * b2 + a2 * b1, self.d)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def conj(self) -> "AlgInt":
        if self.d % 4 == 3:
            return AlgInt(self.a - self.b, -self.b, self.d)
        return AlgInt(self.a, -self.b, self.d)

    def trace(self) -> int:
        """x + conj(x), always a rational integer."""
        if self.d % 4 == 3:
            return 2 * self.a - self.b
        return 2 * self.a

    def to_field(self) -> "FieldElem":
        if self.d % 4 == 3:
            half_b = Fraction(self.b, 2)
            return FieldElem(self.a - half_b, half_b, self.d)
        return FieldElem(Fraction(self.a), Fraction(self.b), self.d)

    def is_lex_positive(self) -> bool:
        return self.a > 0 or (self.a == 0 and self.b > 0)

    def key(self) -> Tuple[int, int]:
        return (self.a, self.b)

    def __str__(self) -> str:
        sym = "w" if self.d % 4 == 3 else f"sqrt(-{self.d})"
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*{sym}"
        return f"{self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}*{sym}"


@attrs.frozen
class FieldElem:
    """The element A + B*sqrt(-d) of K_d, i.e. the complex number A + B*sqrt(d)*i."""

    A: Fraction
    B: Fraction
    d: int

    def _lift(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            return other
        if isinstance(other, AlgInt):
            return other.to_field()
        if isinstance(other, (int, Fraction)):
            return FieldElem(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    def __add__(self, other) -> "FieldElem":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return FieldElem(self.A + other.A, self.B + other.B, self.d)

    __radd__ = __add__

    def __neg__(self) -> "FieldElem":
        return FieldElem(-self.A, -self.B, self.d)

    def __sub__(self, other) -> "FieldElem":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return FieldElem(self.A - other.A, self.B - other.B, self.d)

    def __rsub__(self, other) -> "FieldElem":
        return (-self) + other

    def __mul__(self, other) -> "FieldElem":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return FieldElem(
            self.A * other.A - self.d * self.B * other.B,
            self.A * other.B + self.B * other.A,
            self.d,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "FieldElem":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        n = other.abs_sq()
        if n == 0:
            raise ZeroDivisionError("division by zero in K_d")
        num = self * other.conj()
        return FieldElem(num.A / n, num.B / n, self.d)

    def __bool__(self) -> bool:
        return self.A != 0 or self.B != 0

    def conj(self) -> "FieldElem":
        return FieldElem(self.A, -self.B, self.d)

    def abs_sq(self) -> Fraction:
        return self.A * self.A + self.d * self.B * self.B

    def scale(self, r: Rational) -> "FieldElem":
        return FieldElem(self.A * r, self.B * r, self.d)

    def coords(self) -> Tuple[Fraction, Fraction]:
        """Rational coordinates with respect to {1, omega}."""
        if self.d % 4 == 3:
            return self.A + self.B, 2 * self.B
        return self.A, self.B

    def to_integer(self) -> Optional[AlgInt]:
        a, b = self.coords()
        if a.denominator != 1 or b.denominator != 1:
            return None
        return AlgInt(int(a), int(b), self.d)

    def __complex__(self) -> complex:
        return complex(float(self.A), float(self.B) * math.sqrt(self.d))


# ---------------- NORMS AND UNITS ---------------- #


def norm(x: AlgInt) -> int:
    if x.d % 4 == 3:
        return x.a * x.a - x.a * x.b + (1 + x.d) // 4 * x.b * x.b
    return x.a * x.a + x.d * x.b * x.b


@functools.lru_cache(maxsize=None)
def _units_of(d: int) -> Tuple[AlgInt, ...]:
    ctx = ring_context(d)
    found = [u for u in lattice_points_in_disk(ctx, ctx.field(0), Fraction(1)) if norm(u) == 1]
    return tuple(sorted(found, key=AlgInt.key))


def units(ctx: RingContext) -> list:
    return list(_units_of(ctx.d))


def is_unit_normalized(ctx: RingContext, x: AlgInt) -> bool:
    f = x.to_field()
    if ctx.unit_count == 4:
        return f.A > 0 and f.B >= 0
    if ctx.unit_count == 6:
        return f.A > 0 and 0 <= f.B < f.A
    return f.A > 0 or (f.A == 0 and f.B > 0)


def unit_normalize(ctx: RingContext, x: AlgInt) -> Tuple[AlgInt, AlgInt]:
    """Return (u*x, u) for the unit u putting x in the sector of arguments [0, 2*pi/#units).

    Every nonzero unit orbit meets the sector exactly once; 1 is always normalized.
    """
    if not x:
        return x, ctx.one
    for u in _units_of(ctx.d):
        y = u * x
        if is_unit_normalized(ctx, y):
            return y, u
    raise ReductionError(f"no unit moves {x} into the unit sector")


def exact_div(x: AlgInt, y: AlgInt) -> Optional[AlgInt]:
    """x / y when it lies in O_d, otherwise None."""
    n = norm(y)
    if n == 0:
        raise ZeroDivisionError("division by zero in O_d")
    q = x * y.conj()
    if q.a % n or q.b % n:
        return None
    return AlgInt(q.a // n, q.b // n, x.d)


def divides(y: AlgInt, x: AlgInt) -> bool:
    return exact_div(x, y) is not None


# ---------------- LATTICE GEOMETRY ---------------- #


def _isqrt_fraction(q: Fraction) -> int:
    """floor(sqrt(q)) for q >= 0."""
    return math.isqrt(q.numerator * q.denominator) // q.denominator


def _integer_window(center: Fraction, half_width_sq: Fraction) -> range:
    """The integers k with (k - center)^2 <= half_width_sq."""
    if half_width_sq < 0:
        return range(0)
    w = _isqrt_fraction(half_width_sq) + 1
    lo, hi = math.floor(center) - w, math.ceil(center) + w
    while lo <= hi and (lo - center) ** 2 > half_width_sq:
        lo += 1
    while hi >= lo and (hi - center) ** 2 > half_width_sq:
        hi -= 1
    return range(lo, hi + 1)


def lattice_points_in_disk(ctx: RingContext, center: FieldElem, radius_sq: Rational) -> Iterator[AlgInt]:
    """All lambda in O_d with |lambda - center|^2 <= radius_sq, rows of constant b in increasing order."""
    radius_sq = Fraction(radius_sq)
    d = ctx.d
    if ctx.omega_mode:
        b_range = _integer_window(2 * center.B, 4 * radius_sq / d)
    else:
        b_range = _integer_window(center.B, radius_sq / d)
    for b in b_range:
        imag = Fraction(b, 2) if ctx.omega_mode else Fraction(b)
        rest = radius_sq - d * (imag - center.B) ** 2
        shift = Fraction(b, 2) if ctx.omega_mode else 0
        for a in _integer_window(center.A + shift, rest):
            yield AlgInt(a, b, d)


def covering_radius_sq(ctx: RingContext) -> Fraction:
    return ctx.eps_sq


def round_to_lattice(z: FieldElem) -> AlgInt:
    """The lattice point nearest to z; ties go to the lexicographically smallest (a, b)."""
    ctx = _ctx_of(z)
    best = None
    for lam in lattice_points_in_disk(ctx, z, ctx.eps_sq):
        key = ((z - lam).abs_sq(), lam.a, lam.b)
        if best is None or key < best[0]:
            best = (key, lam)
    if best is None:
        raise ReductionError(f"no lattice point within the covering radius of {z}")
    return best[1]


# ---------------- IDEALS ---------------- #


@attrs.define
class _Column:
    a: int
    b: int
    coeffs: list

    def combine(self, s: int, other: "_Column", t: int) -> "_Column":
        return _Column(
            s * self.a + t * other.a,
            s * self.b + t * other.b,
            [s * x + t * y for x, y in zip(self.coeffs, other.coeffs)],
        )


def _gcd_into(pivot: _Column, col: _Column, coord: str) -> Tuple[_Column, _Column]:
    """Unimodular column step leaving gcd in pivot.<coord> and 0 in col.<coord>."""
    p, c = getattr(pivot, coord), getattr(col, coord)
    if c == 0:
        return pivot, col
    if p == 0:
        return col, pivot
    g, s, t = (int(v) for v in gmpy2.gcdext(p, c))
    return pivot.combine(s, col, t), pivot.combine(c // g, col, -(p // g))


def _hermite_basis(alpha: AlgInt, beta: AlgInt) -> Tuple[int, int, list]:
    """Triangular basis {(g1, 0), (x, g2)} of the Z-module <alpha, alpha*w, beta, beta*w>.

    Returns g1, g2 and the integer coefficients expressing (g1, 0) in the four
    generators, so that the ideal norm is g1*g2.
    """
    w = AlgInt(0, 1, alpha.d)
    gens = [alpha, alpha * w, beta, beta * w]
    cols = [_Column(x.a, x.b, [int(i == j) for j in range(4)]) for i, x in enumerate(gens)]

    pivot, rest = cols[0], []
    for col in cols[1:]:
        pivot, col = _gcd_into(pivot, col, "b")
        rest.append(col)
    if pivot.b < 0:
        pivot = pivot.combine(-1, pivot, 0)

    first, zeros = rest[0], []
    for col in rest[1:]:
        first, col = _gcd_into(first, col, "a")
        zeros.append(col)
    if first.a < 0:
        first = first.combine(-1, first, 0)
    return first.a, pivot.b, first.coeffs


def ideal_norm(alpha: AlgInt, beta: AlgInt) -> int:
    """Absolute norm of the ideal <alpha, beta> of O_d."""
    if not alpha and not beta:
        raise ZeroIdealError("the pair (0, 0) generates the zero ideal")
    if not alpha:
        alpha, beta = beta, alpha
    g1, g2, _ = _hermite_basis(alpha, beta)
    return g1 * g2


def is_coprime(alpha: AlgInt, beta: AlgInt) -> bool:
    return ideal_norm(alpha, beta) == 1


def try_bezout(alpha: AlgInt, beta: AlgInt) -> Optional[Tuple[AlgInt, AlgInt]]:
    """Bezout coefficients when <alpha, beta> = O_d, None otherwise."""
    if not alpha and not beta:
        raise ZeroIdealError("the pair (0, 0) generates the zero ideal")
    swapped = not alpha
    if swapped:
        alpha, beta = beta, alpha
    g1, g2, c = _hermite_basis(alpha, beta)
    if g1 * g2 != 1:
        return None
    d = alpha.d
    x0, y0 = AlgInt(c[0], c[1], d), AlgInt(c[2], c[3], d)
    if swapped:
        x0, y0 = y0, x0
    return x0, y0


def any_bezout(alpha: AlgInt, beta: AlgInt) -> Tuple[AlgInt, AlgInt]:
    """Some (x0, y0) in O_d^2 with alpha*x0 + beta*y0 = 1."""
    found = try_bezout(alpha, beta)
    if found is None:
        raise NotCoprimeError(f"<{alpha}, {beta}> is not the unit ideal")
    return found


def bezout_bounded(alpha: AlgInt, beta: AlgInt) -> Tuple[AlgInt, AlgInt]:
    """(x, y) with alpha*x + beta*y = 1, |x| <= C_d |beta| and |y| <= C_d |alpha|."""
    if not alpha or not beta:
        raise NotCoprimeError("bounded Bezout needs two nonzero entries")
    ctx = _ctx_of(alpha)
    x0, y0 = any_bezout(alpha, beta)
    lam = round_to_lattice(x0.to_field() / beta.to_field())
    x, y = x0 - lam * beta, y0 + lam * alpha
    if alpha * x + beta * y != ctx.one:
        raise ReductionError(f"Bezout identity failed for ({alpha}, {beta})")
    if not (norm(x) <= ctx.c_d_sq * norm(beta) and norm(y) <= ctx.c_d_sq * norm(alpha)):
        raise ReductionError(f"Bezout bounds failed for ({alpha}, {beta}): x={x}, y={y}")
    return x, y


def is_principal(alpha: AlgInt, beta: AlgInt) -> Tuple[bool, Optional[AlgInt]]:
    """Whether <alpha, beta> = g O_d, with the generator g making (alpha/g, beta/g) unit-normalized."""
    ctx = _ctx_of(alpha)
    n = ideal_norm(alpha, beta)
    for g in lattice_points_in_disk(ctx, ctx.field(0), n):
        if norm(g) != n:
            continue
        qa, qb = exact_div(alpha, g), exact_div(beta, g)
        if qa is None or qb is None or not is_coprime(qa, qb):
            continue
        lead = qa if qa else qb
        _, u = unit_normalize(ctx, lead)
        return True, g * u.conj()
    return False, None
