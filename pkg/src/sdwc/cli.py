"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 resource cap exceeded.

Every command that writes a file (``--out``) also writes
``<out>.manifest.json`` holding the resolved arguments; ``sdwc rerun``
replays a manifest and reproduces the output byte for byte.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from . import binning, discrete, gaussian, optimize
from .errors import SDWCError, SizeError, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_CAP = 0, 2, 3


def _fmt(x):
    return f"{x:.6f}"


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _emit(args, text):
    """Write ``text`` to --out (plus manifest) or stdout."""
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        manifest = {
            "command": args.command,
            "argv": args.resolved_argv,
            "params": {
                k: v for k, v in sorted(vars(args).items())
                if k not in ("func", "resolved_argv", "out")
            },
            "version": __version__,
            "seed": getattr(args, "seed", None),
        }
        with open(args.out + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        sys.stdout.write(text)


# capacity ---------------------------------------------------------------------


def cmd_capacity(args):
    lines = []
    if args.kind == "binary":
        cap = optimize.binary_capacity(args.n1, args.n2)
        ch = discrete.binary_sdwc(
            optimize.canonical_crossover(args.n1), optimize.canonical_crossover(args.n2), args.q
        )
        pol = discrete.AuxiliaryPolicy.from_x_given_s([[0.5, 0.5]] * 2)
        t_spc, t_gpc = optimize.binary_regime_thresholds(ch, pol)
        lines += [
            f"capacity {_fmt(cap)}",
            f"input_bias {_fmt(0.5)}",
            f"spc_threshold {_fmt(t_spc)}",
            f"gpc_threshold {_fmt(t_gpc)}",
        ]
    else:
        ch = gaussian.GaussianSDWC(args.p, args.q, args.n1, args.n2)
        cap = gaussian.gsdwc_capacity(ch)
        if ch.n1 < ch.n2:
            alpha, beta = 1.0, 0.0
        else:
            alpha, beta = 0.0, 0.0
        lam = gaussian.optimal_lambdas(ch, alpha, beta)
        lines += [
            f"capacity {_fmt(cap)}",
            f"alpha {_fmt(alpha)}",
            f"beta {_fmt(beta)}",
            f"lambda1 {_fmt(lam.lambda1)}",
            f"lambda2 {_fmt(lam.lambda2)}",
            f"regime_boundary {_fmt(gaussian.regime_boundary(ch))}",
        ]
    _emit(args, "\n".join(lines) + "\n")


# region -----------------------------------------------------------------------


def cmd_region(args):
    ch = discrete.channel_from_dict(discrete.load_json(args.channel))
    policies = discrete.load_policies(discrete.load_json(args.policy), ch)
    if args.scheme == "gpc":
        header = ("policy", "r1_bound", "r_bound", "re_bound", "perfect_secrecy")
        rows = []
        for i, pol in enumerate(policies):
            b = discrete.gpc_region(ch, pol)
            rows.append((i, b.r1, b.r, b.r_e, min(b.r, b.r_e)))
    else:
        header = ("policy", "r_bound", "re_bound", "perfect_secrecy")
        rows = []
        for i, pol in enumerate(policies):
            b = discrete.spc_region(ch, pol)
            rows.append((i, b.r, b.r_e, b.r_e))
    _emit(args, _csv_text(header, rows))


# regime-map -------------------------------------------------------------------


def cmd_regime_map(args):
    if args.kind == "gaussian":
        ch = gaussian.GaussianSDWC(args.p, args.q, args.n1, args.n2)
        boundary = gaussian.regime_boundary(ch)
        top = args.rs_max if args.rs_max is not None else 2.0 * boundary + 1.0
        grid = sorted(set(np.linspace(0.0, top, args.points).tolist()) | {boundary})
        rows = [(r, gaussian.classify_state_rate(ch, r).value) for r in grid]
    else:
        if not (args.channel and args.policy):
            raise ValidationError("discrete regime map needs --channel and --policy")
        ch = discrete.channel_from_dict(discrete.load_json(args.channel))
        pol = discrete.load_policies(discrete.load_json(args.policy), ch)[0]
        h_s = discrete.JointTable(("S",), ch.state_prior).entropy("S")
        spc, gpc = discrete.regime_thresholds(ch, pol)
        marks = {t for t in (spc, gpc) if 0.0 <= t <= h_s}
        grid = sorted(set(np.linspace(0.0, h_s, args.points).tolist()) | marks)
        rows = [(r, discrete.regime_check(ch, pol, r).value) for r in grid]
    _emit(args, _csv_text(("r_s", "regime"), rows))


# optimize ---------------------------------------------------------------------


def cmd_optimize(args):
    if args.binary:
        ch = discrete.binary_sdwc(*args.binary)
    elif args.channel:
        ch = discrete.channel_from_dict(discrete.load_json(args.channel))
    else:
        raise ValidationError("optimize needs --channel or --binary N1 N2 Q")
    spec = optimize.SearchSpec(
        card_u=args.card_u,
        card_v=args.card_v,
        grid_steps=args.grid_steps,
        deterministic_x=not args.lattice_x,
        x_equals_v=args.x_equals_v,
    )
    res = optimize.optimize_secrecy(ch, spec, trace=bool(args.trace))
    report = {
        "value": res.value,
        "policy_id": res.policy_id,
        "n_policies": res.n_policies,
        "policy": discrete.policy_to_dict(res.policy),
        "note": "achievable value on the search grid",
    }
    if args.trace:
        text = _csv_text(("policy_id", "value"), enumerate(res.trace.tolist()))
        with open(args.trace, "w") as fh:
            fh.write(text)
    text = f"value {_fmt(res.value)}\npolicy_id {res.policy_id}\n"
    if args.out:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    _emit(args, text)


# simulate ---------------------------------------------------------------------


def cmd_simulate(args):
    rate_rand = args.rate_rand
    if rate_rand is None:
        rate_rand = binning.default_rate_rand(args.n2)
    cfg = binning.SimConfig(
        n=args.n, rate_r=args.rate_r, rate_rand=rate_rand, n1=args.n1, n2=args.n2,
        q=args.q, trials=args.trials, seed=args.seed, injective=args.injective,
    )
    if args.codebooks > 1:
        cfgs = [
            replace(cfg, seed=binning.codebook_seed(cfg.seed, i))
            for i in range(args.codebooks)
        ]
        results = binning.seed_averaged(cfg, args.codebooks, workers=args.workers)[3]
    else:
        cfgs, results = [cfg], [binning.run_experiment(cfg)]
    if args.format == "csv":
        text = _csv_text(
            binning.RESULT_COLUMNS, [binning.result_row(c, r) for c, r in zip(cfgs, results)]
        )
    else:
        records = [
            {**dict(zip(binning.RESULT_COLUMNS, binning.result_row(c, r))),
             "n_bins": r.n_bins, "bin_size": r.bin_size, "rate_effective": r.rate_effective}
            for c, r in zip(cfgs, results)
        ]
        text = json.dumps(records, indent=2) + "\n"
    _emit(args, text)


# gaussian sweep -----------------------------------------------------------------


def cmd_sweep(args):
    chans = [
        gaussian.GaussianSDWC(p, q, n1, n2)
        for p in args.p for q in args.q for n1 in args.n1 for n2 in args.n2
    ]
    rows = gaussian.sweep_rows(chans, tuple(args.alpha), tuple(args.beta))
    _emit(args, _csv_text(gaussian.SWEEP_COLUMNS, rows))


# rerun ------------------------------------------------------------------------


def cmd_rerun(args):
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    argv = list(manifest["argv"])
    if args.out:
        i = argv.index("--out")
        argv[i + 1] = args.out
    return main(argv)


def build_parser():
    parser = argparse.ArgumentParser(prog="sdwc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def with_out(p):
        p.add_argument("--out", help="write output here (plus a .manifest.json)")
        return p

    p = with_out(sub.add_parser("capacity", help="secrecy capacity in closed form"))
    p.add_argument("kind", choices=("binary", "gaussian"))
    p.add_argument("--n1", type=float, required=True)
    p.add_argument("--n2", type=float, required=True)
    p.add_argument("--p", type=float, default=1.0, help="transmit power (gaussian)")
    p.add_argument("--q", type=float, default=0.5, help="state flip prob. / state power")
    p.set_defaults(func=cmd_capacity)

    p = with_out(sub.add_parser("region", help="GPC/SPC region bounds per policy (CSV)"))
    p.add_argument("scheme", choices=("gpc", "spc"))
    p.add_argument("--channel", required=True)
    p.add_argument("--policy", required=True)
    p.set_defaults(func=cmd_region)

    p = with_out(sub.add_parser("regime-map", help="SPC/GPC classification over R_S (CSV)"))
    p.add_argument("kind", choices=("gaussian", "discrete"))
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--n1", type=float, default=1.0)
    p.add_argument("--n2", type=float, default=2.0)
    p.add_argument("--channel")
    p.add_argument("--policy")
    p.add_argument("--rs-max", type=float)
    p.add_argument("--points", type=int, default=21)
    p.set_defaults(func=cmd_regime_map)

    p = with_out(sub.add_parser("optimize", help="grid search of the capacity objective"))
    p.add_argument("--channel")
    p.add_argument("--binary", type=float, nargs=3, metavar=("N1", "N2", "Q"))
    p.add_argument("--card-u", type=int, default=1)
    p.add_argument("--card-v", type=int, default=2)
    p.add_argument("--grid-steps", type=int, default=11)
    p.add_argument("--lattice-x", action="store_true", help="grid P(x|u,v,s) instead of maps")
    p.add_argument("--x-equals-v", action="store_true")
    p.add_argument("--trace", help="CSV file for (policy_id, value) rows")
    p.set_defaults(func=cmd_optimize)

    p = with_out(sub.add_parser("simulate", help="random binning simulation"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rate-r", type=float, required=True)
    p.add_argument("--rate-rand", type=float, help="default 1 - H(n2) - 0.05")
    p.add_argument("--n1", type=float, required=True)
    p.add_argument("--n2", type=float, required=True)
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--codebooks", type=int, default=1)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--injective", action="store_true")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_simulate)

    p = with_out(sub.add_parser("sweep", help="Gaussian DPC sweep (CSV)"))
    for name, default in (("p", [1.0]), ("q", [1.0]), ("n1", [1.0]), ("n2", [2.0]),
                          ("alpha", [1.0]), ("beta", [0.0])):
        p.add_argument(f"--{name}", type=float, nargs="+", default=default)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rerun", help="replay a .manifest.json")
    p.add_argument("manifest")
    p.add_argument("--out", help="write to a different file")
    p.set_defaults(func=cmd_rerun)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.resolved_argv = argv
    try:
        rc = args.func(args)
    except SizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (SDWCError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return rc or EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
