"""Command-line front end.

Exit codes: 0 pass, 1 statistical failure or no witness found, 2 usage,
configuration or precision error. The human summary goes to stdout; machine
output (JSON with ``"schema": 1`` or CSV) goes to ``--out`` (``-`` for
stdout, in which case the summary moves to stderr).
"""

from __future__ import annotations

import argparse
import io
import sys
from dataclasses import dataclass

from . import equidist
from .errors import FWError
from .fwcriterion import integer_alphas, odd_exponents, scan_criterion, stickelberger_element
from .padic import PadicInt, check_prime, random_padic, teichmuller
from .solenoid import format_decimal, orbit_rows
from .symbolic import check_interval, default_intervals, measure_check

SCHEMA = 1


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    prime: int
    precision: int
    seed: int | None
    length: int
    depth: int
    z_threshold: float
    dstar_threshold: float
    fmt: str
    out: str | None


def _config(args, need_precision=True):
    try:
        p = check_prime(args.prime)
    except ValueError as e:
        raise ConfigError(f"--prime: {e}") from None
    if args.length < 1:
        raise ConfigError("--length must be >= 1")
    if args.depth < 0:
        raise ConfigError("--depth must be >= 0")
    precision = args.precision
    if precision is None:
        precision = args.length + args.depth
    if need_precision and precision < args.length + args.depth:
        raise ConfigError(
            f"precision >= length + depth violated: {precision} < {args.length} + {args.depth}"
        )
    return RunConfig(p, precision, args.seed, args.length, args.depth, args.z_threshold,
                     args.dstar_threshold, args.format, args.out)


def _alpha(args, cfg):
    if args.alpha_digits is not None and args.alpha_seed:
        raise ConfigError("give only one of --alpha-digits / --alpha-seed")
    if args.alpha_digits is not None:
        try:
            digits = [int(v) for v in args.alpha_digits.split(",") if v.strip()]
        except ValueError:
            raise ConfigError("--alpha-digits must be a comma-separated digit list") from None
        if args.precision is None:
            cfg.precision = max(cfg.precision, len(digits))
        if len(digits) > cfg.precision:
            raise ConfigError(f"{len(digits)} digits given but precision is {cfg.precision}")
        if any(not 0 <= d < cfg.prime for d in digits):
            raise ConfigError(f"alpha digits must lie in [0, {cfg.prime})")
        digits += [0] * (cfg.precision - len(digits))
        return PadicInt(cfg.prime, digits), {"digits": args.alpha_digits}
    if args.alpha_seed:
        if cfg.seed is None:
            raise ConfigError("seed mandatory for stochastic commands: --alpha-seed needs --seed")
        return random_padic(cfg.seed, cfg.prime, cfg.precision), {"seed": cfg.seed}
    raise ConfigError("alpha source missing: give --alpha-digits or --alpha-seed")


def _require_seed(cfg):
    if cfg.seed is None:
        raise ConfigError("seed mandatory for stochastic commands: give --seed")


def _emit(cfg, payload, csv_header, csv_rows, summary):
    if cfg.fmt == "json":
        buf = io.StringIO()
        equidist.dump_json({"schema": SCHEMA, **payload}, buf)
        text = buf.getvalue()
    else:
        buf = io.StringIO()
        equidist.write_rows_csv(csv_header, csv_rows, buf)
        text = buf.getvalue()
    if cfg.out == "-":
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
        return
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    print(summary)


# -- commands -------------------------------------------------------------


def cmd_orbit(args):
    cfg = _config(args)
    alpha, source = _alpha(args, cfg)
    rows = list(orbit_rows(alpha, cfg.length))
    payload = {
        "command": "orbit",
        "p": cfg.prime,
        "precision": cfg.precision,
        "length": cfg.length,
        "alpha_source": source,
        "rows": [
            {"step": n, "real_exact": f"{x.numerator}/{x.denominator}", "real_value": format_decimal(x),
             "padic_leading_digits": ahead}
            for n, x, ahead in rows
        ],
    }
    csv_rows = [[n, format_decimal(x), f"{x.numerator}/{x.denominator}", " ".join(map(str, a))] for n, x, a in rows]
    _emit(cfg, payload, ["step", "real_value", "real_exact", "padic_leading_digits"], csv_rows,
          f"orbit: p={cfg.prime} steps={cfg.length}")
    return 0


def cmd_genericity(args):
    cfg = _config(args)
    alpha, source = _alpha(args, cfg)
    rep = equidist.genericity_test(alpha, cfg.length, cfg.depth, cfg.z_threshold, cfg.dstar_threshold)
    payload = {"command": "genericity", "p": cfg.prime, "precision": cfg.precision, "seed": cfg.seed,
               "alpha_source": source, "report": rep.to_dict()}
    _emit(cfg, payload, ["test", "label", "hits", "value", "z"], list(rep.csv_rows()),
          f"genericity: {'PASS' if rep.verdict else 'FAIL'} max|z|={rep.max_abs_z:.3f} "
          f"(<= {rep.z_threshold}) D*={rep.star_discrepancy:.5f} (<= {rep.dstar_threshold})")
    return 0 if rep.verdict else 1


def _parse_intervals(spec, p):
    out = []
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            a, n = (int(v) for v in item.split(":"))
        except ValueError:
            raise ConfigError(f"interval {item!r} must look like a:n") from None
        try:
            out.append(check_interval(a, n, p))
        except ValueError as e:
            raise ConfigError(str(e)) from None
    return out


def cmd_measure_check(args):
    cfg = _config(args, need_precision=False)
    _require_seed(cfg)
    intervals = _parse_intervals(args.intervals, cfg.prime) if args.intervals else default_intervals(cfg.prime)
    tests = measure_check(cfg.prime, cfg.length, cfg.seed, cfg.depth, intervals, cfg.z_threshold)
    ok = all(t["pass"] for t in tests)
    payload = {"command": "measure-check", "p": cfg.prime, "seed": cfg.seed, "samples": cfg.length,
               "depth": cfg.depth, "z_threshold": cfg.z_threshold, "tests": tests, "pass": ok}
    csv_rows = [[t["test"], t["hits"], t["samples"], repr(t["frequency"]), repr(t["expected"]), repr(t["z"])]
                for t in tests]
    worst = max((abs(t["z"]) for t in tests), default=0.0)
    _emit(cfg, payload, ["test", "hits", "samples", "frequency", "expected", "z"], csv_rows,
          f"measure-check: {'PASS' if ok else 'FAIL'} {len(tests)} tests, max|z|={worst:.3f}")
    return 0 if ok else 1


def cmd_criterion(args):
    try:
        p = check_prime(args.prime)
    except ValueError as e:
        raise ConfigError(f"--prime: {e}") from None
    if args.all_d:
        ds = odd_exponents(p)
    elif args.d is not None:
        ds = [args.d]
        if args.d % 2 == 0 or not 3 <= args.d <= p - 2:
            raise ConfigError(f"--d must be odd with 3 <= d <= p-2 (p={p})")
    else:
        raise ConfigError("give --d or --all-d")
    if args.n_max < 0:
        raise ConfigError("--n-max must be >= 0")
    alphas = integer_alphas(p, args.alpha_min, args.alpha_max, args.n_max)
    results = [scan_criterion(p, d, alphas, args.n_max, workers=args.workers) for d in ds]
    found = all(r.witness is not None for r in results)
    cfg = RunConfig(p, args.n_max + 1, None, 0, 0, 0, 0, args.format, args.out)
    payload = {"command": "criterion", "p": p, "alpha_range": [args.alpha_min, args.alpha_max],
               "n_max": args.n_max, "results": [r.to_dict() for r in results]}
    csv_rows = []
    for r in results:
        w = r.to_dict()["witness"]
        csv_rows.append([p, r.d, " ".join(map(str, w[0])) if w else "", w[1] if w else "", r.scanned])
    summary = "; ".join(
        f"d={r.d}: " + (f"witness alpha={r.witness[0].value} n={r.witness[1]}" if r.witness else "NoneFound")
        for r in results
    )
    _emit(cfg, payload, ["p", "d", "alpha_digits", "n", "pairs_scanned"], csv_rows, f"criterion p={p}: {summary}")
    return 0 if found and results else 1


def default_betas(p, r, n):
    """``(1, eta_2, eta_3, ...)``: one and the Teichmuller lifts of 2, 3, ..."""
    if r > p - 1:
        raise ConfigError(f"--r at most p-1 = {p - 1} with the default betas")
    return [teichmuller(1 if j == 0 else j + 1, p, n) for j in range(r)]


def cmd_reduction(args):
    cfg = _config(args)
    alpha, source = _alpha(args, cfg)
    if args.r < 1 or args.v_bound < 1:
        raise ConfigError("--r and --v-bound must be >= 1")
    betas = default_betas(cfg.prime, args.r, cfg.precision)
    rep = equidist.reduction_check(alpha, betas, args.v_bound, cfg.length, cfg.depth, cfg.z_threshold,
                                   cfg.dstar_threshold, joint_depth=args.joint_depth, workers=args.workers)
    payload = {"command": "reduction", "p": cfg.prime, "precision": cfg.precision, "seed": cfg.seed,
               "alpha_source": source, "betas": [b.digits[:8].tolist() for b in betas],
               "thresholds": {"z": cfg.z_threshold, "dstar": cfg.dstar_threshold},
               "report": rep.to_dict()}
    csv_rows = [["joint", "", rep.joint_pass, "", ""]]
    csv_rows += [["sigma", " ".join(map(str, s["m"])), s["verdict"], repr(s["max_abs_z"]), repr(s["star_discrepancy"])]
                 for s in rep.sigmas]
    _emit(cfg, payload, ["test", "m", "verdict", "max_abs_z", "star_discrepancy"], csv_rows,
          f"reduction: joint={'pass' if rep.joint_pass else 'fail'} "
          f"all-sigma={'pass' if rep.all_sigma_pass else 'fail'} agree={rep.agree}")
    return 0 if rep.agree else 1


def cmd_character(args):
    cfg = _config(args, need_precision=False)
    _require_seed(cfg)
    m = [int(v) for v in args.m.split(",")]
    if len(m) != args.r:
        raise ConfigError(f"--m has {len(m)} entries, --r is {args.r}")
    if not any(m):
        raise ConfigError("--m must be non-zero")
    if args.precision is None:
        cfg.precision = cfg.length + args.t
    if cfg.precision < cfg.length + args.t:
        raise ConfigError(f"precision >= length + t violated: {cfg.precision} < {cfg.length} + {args.t}")
    from .solenoid import ProductPoint, SolenoidPoint

    gammas = ProductPoint(tuple(SolenoidPoint.at_zero(random_padic(cfg.seed, cfg.prime, cfg.precision, stream=j))
                                for j in range(args.r)))
    avg = equidist.character_average(gammas, m, args.t, cfg.length)
    alt = equidist.character_average(gammas, m, args.t, cfg.length, route="componentwise")
    ok = abs(avg) <= args.weyl_threshold
    payload = {"command": "character", "p": cfg.prime, "seed": cfg.seed, "m": m, "t": args.t, "M": cfg.length,
               "average": [avg.real, avg.imag], "abs": abs(avg), "route_difference": abs(avg - alt),
               "threshold": args.weyl_threshold, "pass": ok}
    _emit(cfg, payload, ["re", "im", "abs", "route_difference"], [[repr(avg.real), repr(avg.imag), repr(abs(avg)),
                                                                  repr(abs(avg - alt))]],
          f"character: |avg|={abs(avg):.5f} ({'pass' if ok else 'fail'} at {args.weyl_threshold})")
    return 0 if ok else 1


def cmd_stickelberger(args):
    try:
        p = check_prime(args.prime)
    except ValueError as e:
        raise ConfigError(f"--prime: {e}") from None
    elem = stickelberger_element(p, args.n)
    cfg = RunConfig(p, args.n + 1, None, 0, 0, 0, 0, args.format, args.out)
    payload = {"command": "stickelberger", "p": p, "n": args.n,
               "rows": [{"u": u, "a": a, "numerator": num, "denominator": den} for u, a, num, den in elem.rows()]}
    _emit(cfg, payload, ["u", "a", "numerator", "denominator"], list(elem.rows()),
          f"stickelberger: p={p} n={args.n} {len(elem.coefficients)} coefficients")
    return 0


# -- parser ---------------------------------------------------------------


def _common(sp, stochastic=True):
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--precision", type=int, default=None, help="digits per p-adic value (default: length + depth)")
    sp.add_argument("--length", type=int, default=100_000, help="orbit length / sample count M")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--depth", type=int, default=equidist.DEFAULT_DEPTH)
    sp.add_argument("--z-threshold", type=float, default=equidist.DEFAULT_Z)
    sp.add_argument("--dstar-threshold", type=float, default=equidist.DEFAULT_DSTAR)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--out", default=None)


def _alpha_flags(sp):
    sp.add_argument("--alpha-digits", default=None, help="comma-separated digits t_0,t_1,... (zero-padded)")
    sp.add_argument("--alpha-seed", action="store_true", help="draw alpha from --seed")


def build_parser():
    ap = argparse.ArgumentParser(prog="fwergodic", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("orbit", help="dump the skew-product orbit of (alpha, 0)")
    _common(sp)
    _alpha_flags(sp)
    sp.set_defaults(func=cmd_orbit, depth=0)

    sp = sub.add_parser("genericity", help="cylinder/discrepancy genericity verdict for alpha")
    _common(sp)
    _alpha_flags(sp)
    sp.set_defaults(func=cmd_genericity)

    sp = sub.add_parser("measure-check", help="Monte Carlo pushforward checks of the Bernoulli measure")
    _common(sp)
    sp.add_argument("--intervals", default=None, help="a:n list for the intervals (a/p^n, (a+1)/p^n)")
    sp.set_defaults(func=cmd_measure_check)

    sp = sub.add_parser("criterion", help="scan for non-vanishing criterion sums")
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--all-d", action="store_true")
    sp.add_argument("--alpha-min", type=int, default=1)
    sp.add_argument("--alpha-max", type=int, default=20)
    sp.add_argument("--n-max", type=int, default=20)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_criterion)

    sp = sub.add_parser("reduction", help="joint test vs all sigma in V")
    _common(sp)
    _alpha_flags(sp)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--v-bound", type=int, default=2)
    sp.add_argument("--joint-depth", type=int, default=2)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_reduction)

    sp = sub.add_parser("character", help="ergodic average of a solenoid character")
    _common(sp)
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--m", default="1")
    sp.add_argument("--t", type=int, default=1)
    sp.add_argument("--weyl-threshold", type=float, default=0.02)
    sp.set_defaults(func=cmd_character, depth=0)

    sp = sub.add_parser("stickelberger", help="coefficient table of the Stickelberger element")
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--format", choices=["json", "csv"], default="csv")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_stickelberger)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FWError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
