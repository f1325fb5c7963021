"""Experiment runner.

Usage:  cubesff <subcommand> [--q-p INT --q-e INT --A FLOAT --alpha INT
        --d INT --M INT --d-max INT --threads INT --seed INT --out PATH
        --format json|csv --config FILE.toml]

Exit codes: 0 success, 2 config error, 3 cap exceeded, 4 identity-check
failure.  Reports are bit-stable: exact rationals as "num/den" strings,
polynomials as coefficient strings, floats only in explicitly approximate
fields (Gauss-sum diagnostics).  Files are written atomically.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import tempfile
from fractions import Fraction

from . import charsums, globalcount, localdens
from .archdens import WeightParams, sigma_infty, sigma_infty_A
from .errors import CapExceeded, ConfigInvalid, CubesError, TooLarge
from .gf import cubic_character, field_build
from .polyring import Poly, polys_up_to_degree


def _fmt(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, Poly):
        return x.serialize()
    if isinstance(x, dict):
        return {k: _fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_fmt(v) for v in x]
    return x


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".cubesff-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report_emit(report, fmt: str, out: str | None) -> None:
    """Serialize a report deterministically and write it atomically."""
    if fmt == "json":
        text = json.dumps(_fmt(report), indent=2) + "\n"
    else:
        rows = report if isinstance(report, list) else [report]
        rows = [_fmt(r) for r in rows]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for r in rows:
            writer.writerow(r)
        text = buf.getvalue()
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------


def _ctx(args):
    return field_build(args.q_p, args.q_e)


def cmd_gauss(args) -> object:
    rows = []
    grid = [(args.q_p, args.q_e)] if args.q_e else _gauss_grid(args.q_p)
    for p, e in grid:
        ctx = field_build(p, e)
        if ctx.q % 3 != 1:
            continue
        chi = cubic_character(ctx)
        g = charsums.gauss_sum(chi)
        J = charsums.jacobi_sum(chi)
        rows.append({
            "q": ctx.q, "p": p, "e": e,
            "g_re_approx": g.complex.real, "g_im_approx": g.complex.imag,
            "mod_residual_approx": g.modulus_residual(),
            "J_a": J.a, "J_b": J.b, "J_norm": J.norm(),
            "two_re_J": J.two_re(),
        })
    return rows


def _gauss_grid(q_p: int | None):
    ps = [q_p] if q_p else [2, 5, 7, 13]
    out = []
    for p in ps:
        e = 1
        while p**e <= 1 << 10:
            out.append((p, e))
            e += 1
    return out


def cmd_certificate(args) -> object:
    cert = charsums.theorem12_certificate(args.q_p**args.q_e, args.A,
                                          d_override=args.d, d_max=args.d_max)
    return cert.to_report()


def cmd_localdensity(args) -> object:
    ctx = _ctx(args)
    N = localdens.modulus_N(ctx, args.M)
    if N.abs_q() > 1 << 16:
        raise CapExceeded("residues of N", N.abs_q(), 1 << 16)
    rows = []
    for k in polys_up_to_degree(ctx, N.deg() - 1) if N.deg() else [Poly.zero(ctx)]:
        rt = localdens.rho_tilde(N, k)
        rows.append({"N": N.value.serialize(), "k": k.serialize(),
                     "rho": int(rt * N.abs_q() ** 2),
                     "rho_tilde_num": rt.numerator,
                     "rho_tilde_den": rt.denominator})
    return rows


def cmd_sigma(args) -> object:
    ctx = _ctx(args)
    params = WeightParams(ctx, args.A, args.alpha, args.d)
    k = Poly.parse(ctx, args.k) if args.k else Poly.t_pow(ctx, params.B)
    s = sigma_infty_A(params, k)
    return {"q": ctx.q, "A": args.A, "alpha": args.alpha, "d": args.d,
            "k": k.serialize(), "sigma_num": s.numerator,
            "sigma_den": s.denominator}


def cmd_scan(args) -> object:
    ctx = _ctx(args)
    B_lo, B_hi = args.B_range
    A_values = args.A_list or [args.A]
    rows = globalcount.density_scan(ctx, A_values, range(B_lo, B_hi + 1))
    return [{k: v for k, v in r.items()} for r in rows]


def cmd_variance(args) -> object:
    ctx = _ctx(args)
    params = WeightParams(ctx, args.A, args.alpha, args.d)
    rep = globalcount.variance(params, args.M)
    out = rep.to_report()
    out["char_gt3"] = ctx.p > 3  # the section-4 standing assumption, recorded
    if not (rep.sigma2_identity and rep.sigma3_identity and rep.var >= 0):
        raise IdentityFailure(out)
    return out


def cmd_manin(args) -> object:
    ctx = _ctx(args)
    params = WeightParams(ctx, args.A, args.alpha, args.d)
    rep = globalcount.manin_report(params, args.M)
    rep["char_gt3"] = ctx.p > 3
    return rep


class IdentityFailure(CubesError):
    def __init__(self, report):
        self.report = report
        super().__init__("exact identity check failed")


def cmd_selftest(args) -> object:
    """Run every exact-identity suite at a small deterministic grid."""
    ctx = _ctx(args)
    q = ctx.q
    results = []

    def check(name, fn):
        try:
            ok = bool(fn())
        except CubesError as exc:
            results.append({"check": name, "pass": False, "error": str(exc)})
            return
        results.append({"check": name, "pass": ok})

    if q % 3 == 1:
        chi = cubic_character(ctx)
        check("gauss_modulus", lambda: charsums.gauss_sum(chi).modulus_residual() <= 1e-9 * q)
        check("jacobi_norm", lambda: charsums.jacobi_sum(chi).norm() == q)
    check("hasse_davenport_d2",
          lambda: charsums.hasse_davenport_check(q, 2) <= 1e-8)
    check("eq_tap_d1", lambda: _eq_tap_holds(q, 1))
    check("s_r0_dual_route", lambda: _s_r0_dual(ctx))
    check("sigma_worked_value", lambda: _sigma_worked(ctx))
    check("variance_identities", lambda: _variance_ok(ctx))
    failed = [r for r in results if not r["pass"]]
    if failed:
        raise IdentityFailure(results)
    return results


def _eq_tap_holds(q, d):
    c = charsums.c_varpi(q, d)
    r = q ** (2 * d)
    p, e = charsums.split_prime_power(q)
    big = field_build(p, 2 * d * e)
    brute = charsums.diagonal_cubic_count(big, 0)
    return brute == r * r + c * (r - 1)


def _s_r0_dual(ctx):
    t = Poly.t(ctx)
    for r in (t, t * t, t * (t + Poly.one(ctx))):
        if localdens.s_r0(r) != localdens.s_r0_character(r)[0]:
            return False
    return True


def _sigma_worked(ctx):
    params = WeightParams(ctx, 0.0, 0, 2)
    s = sigma_infty_A(params, Poly.t_pow(ctx, params.B))
    if ctx.q == 2 and s != 1:
        return False
    return s == sigma_infty_A(params, Poly.t_pow(ctx, params.B), route="histogram")


def _variance_ok(ctx):
    params = WeightParams(ctx, 0.5, 0, 3 if ctx.q == 2 else 1)
    rep = globalcount.variance(params, 0)
    return rep.sigma2_identity and rep.sigma3_identity and rep.var >= 0


# -- argument plumbing -----------------------------------------------------------


def _load_config(path: str) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:  # python 3.10
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cubesff", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "gauss": cmd_gauss, "certificate": cmd_certificate,
        "localdensity": cmd_localdensity, "sigma": cmd_sigma,
        "scan": cmd_scan, "variance": cmd_variance, "manin": cmd_manin,
        "selftest": cmd_selftest,
    }
    for name, fn in commands.items():
        sp = sub.add_parser(name)
        sp.set_defaults(fn=fn)
        sp.add_argument("--q-p", type=int, default=2, help="characteristic p")
        sp.add_argument("--q-e", type=int, default=None if name == "gauss" else 1,
                        help="extension degree e (q = p^e)")
        sp.add_argument("--A", type=float, default=0.0)
        sp.add_argument("--alpha", type=int, default=0)
        sp.add_argument("--d", type=int, default=None if name == "certificate" else 2)
        sp.add_argument("--M", type=int, default=1)
        sp.add_argument("--d-max", type=int, default=64)
        sp.add_argument("--threads", type=int, default=1,
                        help="worker pool size (reserved; runs serially)")
        sp.add_argument("--seed", type=int, default=0,
                        help="controls sampling only; all exact values are seed-free")
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--config", type=str, default=None, help="TOML config; flags win")
        if name == "sigma":
            sp.add_argument("--k", type=str, default=None,
                            help="target polynomial, coefficients low-to-high")
        if name == "scan":
            sp.add_argument("--B-range", type=int, nargs=2, default=(3, 5))
            sp.add_argument("--A-list", type=float, nargs="*", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        file_cfg = _load_config(args.config)
        defaults = parser.parse_args([args.command])  # per-command defaults
        for key, val in file_cfg.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr) and getattr(args, attr) == getattr(defaults, attr, None):
                setattr(args, attr, val)
    if args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return 2
    random.seed(args.seed)
    try:
        report = args.fn(args)
    except (ConfigInvalid,) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (TooLarge, CapExceeded) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    except IdentityFailure as exc:
        report_emit(_fmt(exc.report), "json", args.out)
        print("identity check failed", file=sys.stderr)
        return 4
    except CubesError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report_emit(report, args.format, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
