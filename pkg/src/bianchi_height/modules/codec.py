"""JSON and CSV encodings.

Every rational crosses the boundary as an exact string "p/q" (or "n" for an
integer); decimals are rejected. Algebraic integers are [a, b] pairs in the
basis {1, omega}.
"""

import csv
import io
import json
import re
from fractions import Fraction
from typing import Iterable

from bianchi_height.modules.count import CountTable, GrowthFit
from bianchi_height.modules.errors import CodecError
from bianchi_height.modules.geometry import GroupElem, Point
from bianchi_height.modules.hermitian import FormReduction, HermitianForm
from bianchi_height.modules.reduce import BRANCHES, ReductionCertificate, SharpnessRow
from bianchi_height.modules.ring import AlgInt, RingContext

_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")

COUNT_HEADER = ("T_sq", "N", "N_tilde", "X")
SHARPNESS_HEADER = ("n", "height_sq", "D_sq", "ratio")


def parse_rational(text) -> Fraction:
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise CodecError(f"expected a rational string, got {text!r}")
    m = _RATIONAL.match(text)
    if m is None:
        raise CodecError(f"malformed rational {text!r} (expected p/q)")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise CodecError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(x) -> str:
    return str(Fraction(x))


# ---------------- ENCODE ---------------- #


def alg_to_json(x: AlgInt) -> list:
    return [x.a, x.b]


def point_to_json(p: Point) -> dict:
    return {"z": {"A": format_rational(p.z.A), "B": format_rational(p.z.B)}, "s": format_rational(p.s)}


def group_to_json(g: GroupElem) -> dict:
    return {name: alg_to_json(getattr(g, name)) for name in ("alpha", "beta", "gamma", "delta")}


def form_to_json(f: HermitianForm) -> dict:
    return {"a": f.a, "b": alg_to_json(f.b), "dd": f.dd}


def certificate_to_json(cert: ReductionCertificate) -> dict:
    return {
        "d": cert.point.d,
        "point": point_to_json(cert.point),
        "gamma": group_to_json(cert.gamma),
        "image": point_to_json(cert.image),
        "D_sq": format_rational(cert.d_sq),
        "height_sq": str(cert.height_sq),
        "bound_ok": cert.bound_ok,
        "branch": cert.branch,
        "checks": dict(sorted(cert.checks.items())),
    }


def form_reduction_to_json(result: FormReduction) -> dict:
    out = certificate_to_json(result.certificate)
    out["f_red"] = form_to_json(result.f_red)
    out["point_bound_ok"] = result.point_bound_ok
    out["form_bound_ok"] = result.form_bound_ok
    return out


def fit_to_json(fit: GrowthFit) -> dict:
    return {"slope_N": fit.slope_N, "slope_X": fit.slope_X, "rows": fit.rows}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=False, separators=(", ", ": "))


# ---------------- DECODE ---------------- #


def _alg(ctx: RingContext, value) -> AlgInt:
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) for v in value)):
        raise CodecError(f"expected [a, b] integer pair, got {value!r}")
    return ctx.integer(value[0], value[1])


def point_from_json(ctx: RingContext, obj) -> Point:
    try:
        A, B = parse_rational(obj["z"]["A"]), parse_rational(obj["z"]["B"])
        s = parse_rational(obj["s"])
    except (KeyError, TypeError, ValueError) as e:
        raise CodecError(f"malformed point {obj!r}") from e
    if s <= 0:
        raise CodecError(f"point needs s > 0, got {s}")
    return Point(ctx.field(A, B), s)


def group_from_json(ctx: RingContext, obj) -> GroupElem:
    try:
        entries = [_alg(ctx, obj[name]) for name in ("alpha", "beta", "gamma", "delta")]
        return GroupElem(*entries)
    except (KeyError, TypeError) as e:
        raise CodecError(f"malformed matrix {obj!r}") from e
    except ValueError as e:
        raise CodecError(str(e)) from e


def certificate_from_json(ctx: RingContext, obj) -> ReductionCertificate:
    try:
        branch = obj["branch"]
        if branch not in BRANCHES:
            raise CodecError(f"unknown branch {branch!r}")
        return ReductionCertificate(
            point=point_from_json(ctx, obj["point"]),
            gamma=group_from_json(ctx, obj["gamma"]),
            image=point_from_json(ctx, obj["image"]),
            d_sq=parse_rational(obj["D_sq"]),
            height_sq=int(parse_rational(obj["height_sq"])),
            bound_ok=bool(obj["bound_ok"]),
            branch=branch,
            checks=dict(obj.get("checks", {})),
        )
    except (KeyError, TypeError, AttributeError) as e:
        raise CodecError(f"malformed certificate: {e}") from e


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise CodecError(f"invalid JSON: {e}") from e


# ---------------- CSV ---------------- #


def _csv(header: tuple, rows: Iterable[tuple]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def count_table_to_csv(table: CountTable) -> str:
    return _csv(COUNT_HEADER, ((format_rational(r.T_sq), r.N, r.N_tilde, r.X) for r in table.rows))


def sharpness_to_csv(rows: Iterable[SharpnessRow]) -> str:
    return _csv(
        SHARPNESS_HEADER,
        ((r.n, r.height_sq, format_rational(r.d_sq), format_rational(r.ratio)) for r in rows),
    )
