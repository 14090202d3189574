r"""Counting elements of $\Gamma_d$ and principal points of $\mathbb{P}^1(K_d)$ of bounded height.

    W_d(T)  = {A in Gamma_d : H(A) <= T}                  N_d(T) = #W_d(T)
    W~_d(T) = {tau in W_d(T) : H(tau) = H(phi(tau))}      phi(tau) = (alpha : gamma)
    X_d(T)  = {P in P^1(K_d) : [P] = [(1 : 0)], H(P) <= T}

All bounds are squared (T_sq = T^2). A matrix is reached from its first
column (alpha, gamma), a coprime pair, and a completion (beta0, delta0); every
other completion is (beta0 + lambda*alpha, delta0 + lambda*gamma). One pass
over first columns yields height histograms for W, W~ and X at once, so a
whole table of bounds costs a single enumeration at the largest bound.
"""

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

import attrs
import numpy as np

from bianchi_height.modules.domain import in_F
from bianchi_height.modules.errors import CountingError, NonPrincipalError
from bianchi_height.modules.geometry import (
    GroupElem,
    Point,
    ProjPoint,
    apply,
    compose,
    height_sq,
    inverse,
    proj_height_sq,
)
from bianchi_height.modules.ring import (
    AlgInt,
    RingContext,
    bezout_bounded,
    exact_div,
    is_coprime,
    is_principal,
    is_unit_normalized,
    lattice_points_in_disk,
    norm,
    ring_context,
    try_bezout,
)

logger = logging.getLogger(__name__)


@attrs.frozen
class CountRow:
    T_sq: Fraction
    N: int
    N_tilde: int
    X: int
    # X at the bound T/C_d
    X_lower: int


@attrs.frozen
class CountTable:
    d: int
    rows: Tuple[CountRow, ...]
    fitted_exponent: Optional[float] = None


@attrs.frozen
class GrowthFit:
    slope_N: float
    slope_X: float
    rows: int


@attrs.frozen
class SandwichReport:
    T_sq: Fraction
    X_lower: int
    N: int
    N_tilde: int
    X: int
    ok: bool
    # empirical N~/X, bounded by 3 c_1 for a universal c_1
    tilde_ratio: Fraction


@attrs.frozen
class _Histograms:
    W: Counter
    W_tilde: Counter
    pairs: Counter


def _check_bound(T_sq) -> Fraction:
    T_sq = Fraction(T_sq)
    if T_sq < 1:
        raise CountingError(f"T_sq must be at least 1, got {T_sq}")
    return T_sq


# ---------------- COMPLETIONS ---------------- #


def _completions(ctx: RingContext, alpha: AlgInt, gamma: AlgInt, T_sq: Fraction, base) -> Iterator[Tuple[AlgInt, AlgInt]]:
    """All (beta, delta) with alpha*delta - beta*gamma = 1 and norms <= T_sq."""
    x0, y0 = base
    beta0, delta0 = -y0, x0
    n_alpha, n_gamma = norm(alpha), norm(gamma)
    if n_alpha >= n_gamma:
        center = -(beta0.to_field() / alpha.to_field())
        radius_sq, other, other0 = T_sq / n_alpha, gamma, delta0
    else:
        center = -(delta0.to_field() / gamma.to_field())
        radius_sq, other, other0 = T_sq / n_gamma, alpha, beta0
    for lam in lattice_points_in_disk(ctx, center, radius_sq):
        if norm(other0 + lam * other) > T_sq:
            continue
        yield beta0 + lam * alpha, delta0 + lam * gamma


def _first_columns(ctx: RingContext, alphas: Sequence[AlgInt], disk: Sequence[AlgInt]):
    """Coprime (alpha, gamma) with alpha in alphas, gamma in disk, first nonzero entry lex-positive."""
    for alpha in alphas:
        for gamma in disk:
            if not alpha and not gamma:
                continue
            lead = alpha if alpha else gamma
            if not lead.is_lex_positive():
                continue
            base = try_bezout(alpha, gamma)
            if base is not None:
                yield alpha, gamma, base


def _disk(ctx: RingContext, T_sq: Fraction) -> List[AlgInt]:
    return list(lattice_points_in_disk(ctx, ctx.field(0), T_sq))


def _histogram_chunk(d: int, T_sq: Fraction, alpha_keys: Sequence[Tuple[int, int]]) -> _Histograms:
    ctx = ring_context(d)
    disk = _disk(ctx, T_sq)
    alphas = [AlgInt(a, b, d) for a, b in alpha_keys]
    W, W_tilde, pairs = Counter(), Counter(), Counter()
    for alpha, gamma, base in _first_columns(ctx, alphas, disk):
        col = max(norm(alpha), norm(gamma))
        pairs[col] += 1
        for beta, delta in _completions(ctx, alpha, gamma, T_sq, base):
            h = max(col, norm(beta), norm(delta))
            W[h] += 1
            if h == col:
                W_tilde[h] += 1
    return _Histograms(W, W_tilde, pairs)


def _partition(items: list, parts: int) -> List[list]:
    return [items[i::parts] for i in range(parts) if items[i::parts]]


def histograms(ctx: RingContext, T_sq, workers: int = 1) -> _Histograms:
    """Height histograms of W, W~ and of coprime first columns up to T_sq.

    With workers > 1 the first-column alphas are dealt round-robin to a process
    pool; Counter merging makes the totals independent of the partition.
    """
    T_sq = _check_bound(T_sq)
    keys = [x.key() for x in _disk(ctx, T_sq)]
    if workers <= 1:
        return _histogram_chunk(ctx.d, T_sq, keys)

    chunks = _partition(keys, workers)
    logger.debug("counting d=%s T_sq=%s over %s chunks of ~%s alphas", ctx.d, T_sq, len(chunks), len(keys) // workers)
    W, W_tilde, pairs = Counter(), Counter(), Counter()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_histogram_chunk, ctx.d, T_sq, chunk) for chunk in chunks]
        for fut in futures:
            part = fut.result()
            W.update(part.W)
            W_tilde.update(part.W_tilde)
            pairs.update(part.pairs)
    return _Histograms(W, W_tilde, pairs)


def _cumulative(hist: Counter, T_sq: Fraction) -> int:
    return sum(c for h, c in hist.items() if h <= T_sq)


# ---------------- COUNTS ---------------- #


def iter_W(ctx: RingContext, T_sq) -> Iterator[GroupElem]:
    """Canonical elements of W_d(T), one per class modulo +-I."""
    T_sq = _check_bound(T_sq)
    disk = _disk(ctx, T_sq)
    for alpha, gamma, base in _first_columns(ctx, disk, disk):
        for beta, delta in _completions(ctx, alpha, gamma, T_sq, base):
            yield GroupElem(alpha, beta, gamma, delta)


def enumerate_W(ctx: RingContext, T_sq, workers: int = 1) -> int:
    return sum(histograms(ctx, T_sq, workers).W.values())


def enumerate_N_tilde(ctx: RingContext, T_sq, workers: int = 1) -> int:
    return sum(histograms(ctx, T_sq, workers).W_tilde.values())


def iter_X(ctx: RingContext, T_sq) -> Iterator[ProjPoint]:
    """Principal-class points of height <= T: coprime (x, y), first nonzero coordinate unit-normalized."""
    T_sq = _check_bound(T_sq)
    disk = _disk(ctx, T_sq)
    for x in disk:
        for y in disk:
            if not x and not y:
                continue
            if is_unit_normalized(ctx, x if x else y) and is_coprime(x, y):
                yield ProjPoint(x, y)


def enumerate_X(ctx: RingContext, T_sq) -> int:
    return sum(1 for _ in iter_X(ctx, T_sq))


def _x_from_pairs(ctx: RingContext, pairs: Counter, T_sq: Fraction) -> int:
    # pairs counts coprime columns up to sign; a point is a column up to units
    return 2 * _cumulative(pairs, T_sq) // ctx.unit_count


def _x_lower_from_pairs(ctx: RingContext, pairs: Counter, T_sq: Fraction) -> int:
    """X at T/C_d: heights h with h * C_d^2 <= T_sq, decided exactly."""
    c2 = ctx.c_d_sq
    kept = sum(c for h, c in pairs.items() if c2 * h <= T_sq)
    return 2 * kept // ctx.unit_count


def sl_count(ctx: RingContext, T_sq, workers: int = 1) -> int:
    """#{A in SL(2, O_d) : H(A) <= T}, twice the count modulo +-I."""
    return 2 * enumerate_W(ctx, T_sq, workers)


def exact_intricacy(ctx: RingContext, p: Point, height_bound: int) -> Optional[int]:
    """Least height_sq of an element of W_d(height_bound) carrying p into F_d, or None.

    Exhaustive over W_d; only meant for small bounds. Elements no lower than
    the current best are skipped before their image is computed.
    """
    best = None
    for g in iter_W(ctx, height_bound):
        h = height_sq(g)
        if best is not None and h >= best:
            continue
        if in_F(ctx, apply(g, p)):
            best = h
    return best


# ---------------- PHI AND PSI ---------------- #


def phi(tau: GroupElem) -> ProjPoint:
    return ProjPoint(tau.alpha, tau.gamma)


def psi(ctx: RingContext, q: ProjPoint) -> GroupElem:
    """A right inverse of phi with H(psi(Q)) <= C_d H(Q)."""
    principal, g = is_principal(q.x, q.y)
    if not principal:
        raise NonPrincipalError(f"{q.x}, {q.y} generate a non-principal ideal")
    x, y = exact_div(q.x, g), exact_div(q.y, g)
    if not y:
        result = GroupElem(x, ctx.zero, ctx.zero, x.conj())
    elif not x:
        result = GroupElem(ctx.zero, -y.conj(), y, ctx.zero)
    else:
        s, t = bezout_bounded(x, y)
        result = GroupElem(x, -t, y, s)
    if phi(result) != q:
        raise CountingError(f"psi({q}) has the wrong first column")
    if not height_sq(result) <= ctx.c_d_sq * proj_height_sq(q):
        raise CountingError(f"psi({q}) breaks the height bound")
    return result


def stabilizer_connector(tau: GroupElem, tau2: GroupElem) -> GroupElem:
    """tau^-1 tau2, upper triangular whenever phi(tau) = phi(tau2)."""
    if phi(tau) != phi(tau2):
        raise CountingError("elements with different first columns are not connected by the stabilizer")
    conn = compose(inverse(tau), tau2)
    if conn.gamma:
        raise CountingError(f"connector of {tau} and {tau2} is not upper triangular")
    return conn


# ---------------- TABLES ---------------- #


def count_table(ctx: RingContext, grid: Sequence, workers: int = 1) -> CountTable:
    """Rows (T_sq, N, N~, X) for every bound in grid from one enumeration at max(grid)."""
    if not grid:
        raise CountingError("empty T_sq grid")
    bounds = sorted({_check_bound(t) for t in grid})
    logger.info("counting d=%s up to T_sq=%s", ctx.d, bounds[-1])
    hist = histograms(ctx, bounds[-1], workers)
    rows = []
    for t in bounds:
        rows.append(
            CountRow(
                t,
                _cumulative(hist.W, t),
                _cumulative(hist.W_tilde, t),
                _x_from_pairs(ctx, hist.pairs, t),
                _x_lower_from_pairs(ctx, hist.pairs, t),
            )
        )
        logger.info("d=%s T_sq=%s N=%s", ctx.d, t, rows[-1].N)
    table = CountTable(ctx.d, tuple(rows))
    if len(rows) >= 4:
        table = attrs.evolve(table, fitted_exponent=fit_growth(table).slope_N)
    return table


def _report(row: CountRow) -> SandwichReport:
    ok = row.X_lower <= row.N <= 4 * row.N_tilde
    return SandwichReport(row.T_sq, row.X_lower, row.N, row.N_tilde, row.X, ok, Fraction(row.N_tilde, row.X))


def sandwich_check(ctx: RingContext, T_sq, workers: int = 1) -> SandwichReport:
    """#X(T/C_d) <= N(T) <= 4 N~(T), exactly."""
    return _report(count_table(ctx, [T_sq], workers).rows[0])


def sandwich_reports(table: CountTable) -> List[SandwichReport]:
    return [_report(row) for row in table.rows]


def fit_growth(table: CountTable) -> GrowthFit:
    """Least-squares slopes of log N and log X against log T."""
    rows = table.rows
    if len(rows) < 4:
        raise CountingError(f"need at least 4 rows to fit a growth exponent, got {len(rows)}")
    log_t = 0.5 * np.log(np.array([float(r.T_sq) for r in rows]))
    if np.any(np.diff(log_t) <= 0):
        raise CountingError("T must be strictly increasing")
    slope_n = np.polyfit(log_t, np.log(np.array([r.N for r in rows], dtype=float)), 1)[0]
    slope_x = np.polyfit(log_t, np.log(np.array([r.X for r in rows], dtype=float)), 1)[0]
    return GrowthFit(float(slope_n), float(slope_x), len(rows))


def growth_ratio(row: CountRow) -> float:
    """N(T)/T^4, the quantity whose limit the growth law is about."""
    return row.N / math.pow(float(row.T_sq), 2)
