"""Command line front end: reproducible experiments with CSV/JSON output.

Every output file starts with comment lines embedding the resolved
configuration and its digest, so identical configurations produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import cmv, dynamics, fibonacci, measure, qwalk, subordinacy
from .banded import State
from .errors import CmvdynError, ResourceBudgetError


def _config_lines(args: argparse.Namespace) -> list[str]:
    skip = {"func", "out"}
    items = sorted(
        (k, v) for k, v in vars(args).items() if k not in skip and v is not None
    )
    lines = [f"{k}={v}" for k, v in items]
    digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()[:16]
    return [f"# config {line}" for line in lines] + [f"# config-digest {digest}"]


def _emit(args, header_lines, body_lines):
    text = "\n".join(_config_lines(args) + header_lines + body_lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_config_defaults(parser, argv):
    """Merge key=value lines from --config under the command-line flags."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    extra = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        flag = "--" + key.strip().replace("_", "-")
        if flag not in argv:
            extra.extend([flag, value.strip()])
    return argv + extra


def _add_operator_flags(p):
    p.add_argument(
        "--preset",
        choices=["free", "identity", "rotation", "fibonacci", "random"],
        help="named operator preset (walk coins unless --verblunsky is used)",
    )
    p.add_argument("--verblunsky", help="Verblunsky coefficient file (n re im)")
    p.add_argument("--coins", help="coin file (n + 8 reals)")
    p.add_argument("--half-line", action="store_true", help="half-line CMV operator")
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.add_argument("--theta-a", type=float, default=math.pi / 6)
    p.add_argument("--theta-b", type=float, default=math.pi / 3)
    p.add_argument("--seed", type=int, default=1)


def _operator(args, width: int):
    """Build the requested banded unitary on a window of the given width."""
    if args.verblunsky:
        alphas = cmv.VerblunskySequence.from_file(
            args.verblunsky, half_line=args.half_line
        )
        if args.half_line:
            return cmv.build_half_line_cmv(alphas, width)
        half = (width // 2 + 3) & ~1
        return cmv.build_extended_cmv(alphas, (-half, half))
    if args.coins:
        coins = qwalk.CoinSequence.from_file(args.coins)
    elif args.preset == "free" or args.preset == "identity":
        coins = qwalk.CoinSequence.constant(qwalk.Coin.identity())
    elif args.preset == "rotation":
        coins = qwalk.CoinSequence.rotation(args.theta)
    elif args.preset == "fibonacci":
        coins = fibonacci.fibonacci_coins(
            fibonacci.FibonacciParams(args.theta_a, args.theta_b)
        )
    elif args.preset == "random":
        coins = qwalk.CoinSequence.random(args.seed)
    else:
        raise ValueError("no operator specified: use --preset, --verblunsky or --coins")
    half = (width // 2 + 3) & ~1
    return qwalk.build_walk_operator(coins, (-half, half))


def cmd_simulate(args):
    U = _operator(args, 4 * args.K + 16)
    psi = State.delta(args.site)
    rows = ["k,norm,p_in_front,p_out_front"]
    state = psi
    from .banded import apply

    U = dynamics._pregrow(U, psi, args.K)
    for k in range(args.K):
        lo, probs = state.probabilities()
        sites = np.arange(lo, lo + len(probs))
        pin = float(np.sum(probs[np.abs(sites) <= k]))
        rows.append(f"{k},{state.norm():.12g},{pin:.12g},{1.0 - pin:.12g}")
        state = apply(U, state)
    _emit(args, [], rows)
    return 0


def cmd_exponents(args):
    U = _operator(args, 4 * args.K_max + 16)
    psi = State.delta(args.site)
    Ks = [2**j for j in range(4, args.K_max.bit_length())]
    if 2 ** (args.K_max.bit_length() - 1) != args.K_max:
        Ks.append(args.K_max)
    body = ["p,K,moment"]
    footer = []
    for p in args.p:
        curve = dynamics.moment_curve(U, psi, Ks, p)
        for K in sorted(curve):
            body.append(f"{p},{K},{curve[K]:.12g}")
        est = dynamics.transport_exponent(curve, p)
        footer.append(
            f"# exponent p={p} slope={est.slope:.6g} "
            f"beta_lower={est.beta_lower:.6g} beta_upper={est.beta_upper:.6g}"
        )
    _emit(args, footer, body)
    return 0


def cmd_parseval(args):
    body = ["K,lhs,rhs,reldiff"]
    for K in args.K:
        U = _operator(args, 16)
        lhs, rhs, rd = dynamics.parseval_check(U, State.delta(args.site), args.site, K)
        body.append(f"{K},{lhs:.12g},{rhs:.12g},{rd:.6g}")
    _emit(args, [], body)
    return 0


def cmd_subordinacy(args):
    if args.verblunsky:
        alphas = cmv.VerblunskySequence.from_file(args.verblunsky, half_line=False)
    elif args.preset == "fibonacci":
        alphas = fibonacci.fibonacci_alphas(
            fibonacci.FibonacciParams(args.theta_a, args.theta_b)
        )
    else:
        alphas = cmv.VerblunskySequence.constant(0.0, half_line=False)
    Ls = [2.0**j for j in range(4, 4 + args.L_count)]
    body = ["re_z,im_z,gamma1,gamma2,alpha"]
    for j in range(args.z_count):
        z = np.exp(2j * np.pi * (j + 0.5) / args.z_count)
        norms = [
            subordinacy.whole_line_solution(alphas, z, xi0, zeta0, Ls)
            for xi0, zeta0 in subordinacy.standard_boundary_conditions(args.boundary_count)
        ]
        g1, g2, alpha = subordinacy.power_law_fit(norms)
        body.append(f"{z.real:.12g},{z.imag:.12g},{g1:.6g},{g2:.6g},{alpha:.6g}")
    _emit(args, [], body)
    return 0


def cmd_fib_bound(args):
    params = fibonacci.FibonacciParams(args.theta_a, args.theta_b, args.K_const)
    body = ["re_z,im_z,I,C,gamma1,gamma2,beta"]
    for j in range(args.z_grid):
        z = complex(np.exp(2j * np.pi * j / args.z_grid))
        body.append(
            f"{z.real:.12g},{z.imag:.12g},"
            f"{fibonacci.invariant_I(z, params):.10g},"
            f"{fibonacci.constant_C(z, params):.10g},"
            f"{fibonacci.gamma1(z, params):.10g},"
            f"{fibonacci.gamma2(z, params):.10g},"
            f"{fibonacci.beta_lower_bound(z, params):.10g}"
        )
    best, at = fibonacci.max_beta(params, args.trunc_N)
    header = [
        f"# K_of_z {args.K_const}",
        f"# max_beta_over_spectrum {best:.10g} at_z {at.real:.10g}{at.imag:+.10g}i",
    ]
    _emit(args, header, body)
    return 0


def cmd_measure_diag(args):
    if args.measure:
        mu = measure.DiscreteMeasure.from_file(args.measure)
    elif args.verblunsky:
        alphas = cmv.VerblunskySequence.from_file(args.verblunsky, half_line=True)
        mu = cmv.paraorthogonal_spectrum(alphas, args.trunc_N)
    else:
        mu = measure.DiscreteMeasure.uniform(args.uniform)
    z0 = complex(np.exp(1j * args.probe_angle))
    Ks = [2**j for j in range(4, 11)]
    probe = measure.alpha_derivative_probe(
        mu, z0, args.alpha, [1.0 - 2.0**-j for j in range(2, 9)]
    )
    _, b = measure.dyadic_quantities(mu, args.level, args.alpha)
    out = {
        "atoms": len(mu),
        "total_mass": mu.total_mass(),
        "fejer": {K: measure.fejer_integral(mu, z0, K) for K in Ks},
        "uah_constant": measure.uah_constant(
            mu, args.alpha, [math.pi / 2**j for j in range(1, 7)]
        ),
        "probe_slope": probe.slope,
        "probe_warnings": list(probe.warnings),
        "dyadic_b": b,
    }
    _emit(args, [], [json.dumps(out, sort_keys=True)])
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cmvdyn",
        description="Banded unitary dynamics: CMV matrices, quantum walks, "
        "transport exponents, subordinacy and Fibonacci bounds",
    )
    ap.add_argument("--config", help="key=value file merged under the flags")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="exact evolution with front statistics")
    _add_operator_flags(p)
    p.add_argument("--K", type=int, default=64)
    p.add_argument("--site", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("exponents", help="transport-exponent estimation")
    _add_operator_flags(p)
    p.add_argument("--K-max", type=int, default=1024)
    p.add_argument("--site", type=int, default=0)
    p.add_argument("--p", type=float, nargs="+", default=[1.0, 2.0])
    p.add_argument("--out")
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("parseval-check", help="exponential average vs resolvent")
    _add_operator_flags(p)
    p.add_argument("--K", type=int, nargs="+", default=[16, 64])
    p.add_argument("--site", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_parseval)

    p = sub.add_parser("subordinacy", help="power-law exponents on a z grid")
    _add_operator_flags(p)
    p.add_argument("--z-count", type=int, default=8)
    p.add_argument("--L-count", type=int, default=8)
    p.add_argument("--boundary-count", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_subordinacy)

    p = sub.add_parser("fib-bound", help="Fibonacci walk lower-bound constants")
    p.add_argument("--theta-a", type=float, default=math.pi / 6)
    p.add_argument("--theta-b", type=float, default=math.pi / 3)
    p.add_argument("--K-const", type=float, default=16.0)
    p.add_argument("--z-grid", type=int, default=16)
    p.add_argument("--trunc-N", type=int, default=1024)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fib_bound)

    p = sub.add_parser("measure-diag", help="spectral-measure diagnostics")
    p.add_argument("--measure", help="measure file (re im w)")
    p.add_argument("--verblunsky")
    p.add_argument("--uniform", type=int, default=4096)
    p.add_argument("--trunc-N", type=int, default=256)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--level", type=int, default=6)
    p.add_argument("--probe-angle", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_measure_diag)

    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _load_config_defaults(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except ResourceBudgetError as exc:
        record = {"error": "resource", "message": str(exc), "admissible": exc.admissible}
        print(json.dumps(record), file=sys.stderr)
        return 3
    except (CmvdynError, ValueError, OSError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
