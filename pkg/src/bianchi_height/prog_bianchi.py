#!/usr/bin/python3

import os
import sys
import signal
import logging
import argparse
import re

from bianchi_height.modules.ring import ring_context
from bianchi_height.modules.geometry import Point
from bianchi_height.modules.domain import in_B, in_F, in_P, mu_witness
from bianchi_height.modules.reduce import reduce, sharpness_table, verify_certificate
from bianchi_height.modules.hermitian import (
    HermitianForm,
    discriminant,
    is_positive_definite,
    reduce_form,
)
from bianchi_height.modules.count import count_table, fit_growth, sandwich_reports
from bianchi_height.modules.errors import (
    BianchiError,
    CodecError,
    CountingError,
    InvalidFieldError,
    NotPositiveDefiniteError,
)
import bianchi_height.modules.codec as codec
import bianchi_height.about as about
import bianchi_height.modules.configure as configure

logger = logging.getLogger(__name__)


PROGRAM_CONFIG_PATH = os.path.join( os.path.expanduser("~"),
                                    ".config",
                                    about.__package__,
                                    about.__program_name__+".conf.json")

DEFAULT_PROGRAM_CONTENT = {
    "d": 1,
    "workers": 1,
    "output_format": "csv",
    "log_level": "WARNING",
    "count_grid": [16, 36, 64, 100, 144],
    "sharpness_n_max": 20,
}

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID_D = 2
EXIT_MALFORMED = 3
EXIT_NOT_DEFINITE = 4
EXIT_COUNT_VIOLATION = 5

Z_HELP = "z as two rationals A B meaning A + B*sqrt(d)*i, e.g. --z 7/4 0"


class _Parser(argparse.ArgumentParser):
    """Reads -p/q as a negative rational, not as an option."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")


def _grid(text):
    try:
        grid = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise CodecError(f"malformed T_sq grid {text!r}") from e
    if not grid:
        raise CodecError("empty T_sq grid")
    return grid


# -------------------------------
# Arguments
# -------------------------------
def _add_point_args(parser):
    parser.add_argument("--z", nargs=2, metavar=("A", "B"), required=True, help=Z_HELP)
    height = parser.add_mutually_exclusive_group(required=True)
    height.add_argument("--t", help="height t as a rational p/q (s = t^2 is used)")
    height.add_argument("--t2", help="squared height s = t^2 as a rational p/q")


def build_parser():
    parser = _Parser(prog=about.__program_name__, description=about.__description__)
    parser.add_argument("--version", action="version", version=about.__version__)
    parser.add_argument("--config", default=PROGRAM_CONFIG_PATH, help="JSON configuration file")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce a point into F_d and print its height certificate")
    p.add_argument("--d", type=int)
    _add_point_args(p)

    p = sub.add_parser("membership", help="print in_P, in_B, in_F and the pair attaining m*")
    p.add_argument("--d", type=int)
    _add_point_args(p)

    p = sub.add_parser("reduce-form", help="reduce a positive definite Hermitian form")
    p.add_argument("--d", type=int)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, nargs=2, metavar=("B0", "B1"), required=True,
                   help="b in the basis {1, omega}")
    p.add_argument("--dd", type=int, required=True)

    p = sub.add_parser("count", help="count W, W~ and X up to each T_sq of a grid")
    p.add_argument("--d", type=int)
    p.add_argument("--tsq", type=_grid, help="comma separated integer T_sq values, e.g. 16,36,64")
    p.add_argument("--workers", type=int)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--sl", action="store_true", help="also report SL(2, O_d) counts")

    p = sub.add_parser("sharpness", help="table of the sharpness family sigma_n")
    p.add_argument("--n-max", type=int)
    p.add_argument("--format", choices=("csv", "json"))

    p = sub.add_parser("verify", help="re-verify a certificate JSON")
    p.add_argument("input", nargs="?", default="-", help="certificate file, - for stdin")

    return parser


def _point(ctx, args):
    A, B = (codec.parse_rational(v) for v in args.z)
    if args.t is not None:
        t = codec.parse_rational(args.t)
        if t <= 0:
            raise CodecError(f"t must be positive, got {t}")
        s = t * t
    else:
        s = codec.parse_rational(args.t2)
        if s <= 0:
            raise CodecError(f"s must be positive, got {s}")
    return Point(ctx.field(A, B), s)


# -------------------------------
# Subcommands
# -------------------------------
def cmd_reduce(ctx, args, config):
    cert = reduce(ctx, _point(ctx, args))
    print(codec.dumps(codec.certificate_to_json(cert)))
    return EXIT_OK if cert.bound_ok else EXIT_FAILED


def cmd_membership(ctx, args, config):
    p = _point(ctx, args)
    w = mu_witness(ctx, p)
    out = {
        "in_P": in_P(ctx, p.z),
        "in_B": in_B(ctx, p),
        "in_F": in_F(ctx, p),
        "witness": {
            "gamma0": codec.alg_to_json(w.gamma0),
            "delta0": codec.alg_to_json(w.delta0),
            "m_star": codec.format_rational(w.m_star),
        },
    }
    print(codec.dumps(out))
    return EXIT_OK


def cmd_reduce_form(ctx, args, config):
    f = HermitianForm(args.a, ctx.integer(*args.b), args.dd)
    if not is_positive_definite(f):
        raise NotPositiveDefiniteError(f"form {f} is not positive definite (Delta = {discriminant(f)})")
    result = reduce_form(f)
    print(codec.dumps(codec.form_reduction_to_json(result)))
    ok = result.certificate.bound_ok and result.point_bound_ok and result.form_bound_ok
    return EXIT_OK if ok else EXIT_FAILED


def cmd_count(ctx, args, config):
    grid = args.tsq or list(config["count_grid"])
    workers = args.workers or config["workers"]
    fmt = args.format or config["output_format"]
    table = count_table(ctx, grid, workers)
    reports = sandwich_reports(table)

    if fmt == "csv":
        sys.stdout.write(codec.count_table_to_csv(table))
    else:
        rows = [
            {"T_sq": codec.format_rational(r.T_sq), "N": r.N, "N_tilde": r.N_tilde, "X": r.X}
            for r in table.rows
        ]
        print(codec.dumps({"d": ctx.d, "rows": rows}))
    if len(table.rows) >= 4:
        print(codec.dumps(codec.fit_to_json(fit_growth(table))))
    if args.sl:
        print(codec.dumps({"sl_count": {codec.format_rational(r.T_sq): 2 * r.N for r in table.rows}}))

    bad = [r for r in reports if not r.ok]
    for r in bad:
        logger.error("sandwich inequality violated at T_sq=%s: X_lower=%s N=%s N_tilde=%s",
                     r.T_sq, r.X_lower, r.N, r.N_tilde)
    if bad:
        raise CountingError(f"{len(bad)} grid values violate X(T/C_d) <= N(T) <= 4 N~(T)")
    return EXIT_OK


def cmd_sharpness(ctx, args, config):
    n_max = args.n_max or config["sharpness_n_max"]
    if n_max < 2:
        raise CodecError(f"--n-max must be at least 2, got {n_max}")
    rows = sharpness_table(n_max, ctx)
    fmt = args.format or config["output_format"]
    if fmt == "csv":
        sys.stdout.write(codec.sharpness_to_csv(rows))
    else:
        print(codec.dumps([
            {"n": r.n, "height_sq": r.height_sq, "D_sq": codec.format_rational(r.d_sq),
             "ratio": codec.format_rational(r.ratio)}
            for r in rows
        ]))
    return EXIT_OK


def cmd_verify(args):
    if args.input == "-":
        text = sys.stdin.read()
    else:
        with open(args.input, encoding="utf-8") as f:
            text = f.read()
    obj = codec.loads(text)
    if not isinstance(obj, dict) or not isinstance(obj.get("d"), int):
        raise CodecError("certificate JSON needs a field 'd'")
    ctx = ring_context(obj["d"])
    cert = codec.certificate_from_json(ctx, obj)
    verified = verify_certificate(ctx, cert)
    print(codec.dumps({"verified": verified, "bound_ok": cert.bound_ok}))
    return EXIT_OK if verified else EXIT_FAILED


COMMANDS = {
    "reduce": cmd_reduce,
    "membership": cmd_membership,
    "reduce-form": cmd_reduce_form,
    "count": cmd_count,
    "sharpness": cmd_sharpness,
}


# -------------------------------
# Main
# -------------------------------
def main(argv=None):
    signal.signal(signal.SIGINT, signal.SIG_DFL)

    args = build_parser().parse_args(argv)

    configure.verify_default_config(args.config, default_content=DEFAULT_PROGRAM_CONTENT)
    config = configure.load_config(args.config, default_content=DEFAULT_PROGRAM_CONTENT)

    logging.basicConfig(
        level=(args.log_level or config["log_level"]).upper(),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logger.info("configuration %s", args.config)

    try:
        if args.command == "verify":
            return cmd_verify(args)
        d = getattr(args, "d", None)
        ctx = ring_context(d if d is not None else config["d"])
        return COMMANDS[args.command](ctx, args, config)
    except InvalidFieldError as e:
        logger.error("%s", e)
        return EXIT_INVALID_D
    except CodecError as e:
        logger.error("%s", e)
        return EXIT_MALFORMED
    except NotPositiveDefiniteError as e:
        logger.error("%s", e)
        return EXIT_NOT_DEFINITE
    except CountingError as e:
        logger.error("%s", e)
        return EXIT_COUNT_VIOLATION
    except BianchiError as e:
        logger.error("%s", e)
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
