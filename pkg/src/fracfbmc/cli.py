"""``frac-sim``: filter checks, ICI-cancellation certification, BER sweeps and plots.

Exit codes: 0 success, 1 certification failure, 2 usage or configuration
error, 130 interrupted sweep.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import analysis, harness
from .config import ConfigurationError, FracConfig
from .filterbank import design_phydyas, localization_bounds, write_transmux_csv
from .frac_codec import PayloadGrid, payload_shape

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERRUPTED = 0, 1, 2, 130

# Threshold at which the overlap-4 pulse's localization window is certified.
# |F(1, 4)| = 5.4e-3 sits just below 1e-2, so (1, 4) only appears for
# thresholds in (2.3e-3, 5.4e-3].
CERTIFY_THRESHOLD = 5e-3
EXPECTED_WINDOW = {4: (1, 4)}
_SCHEME_ALIASES = {"frac": "frac", "naive": "naive_alamouti", "naive_alamouti": "naive_alamouti",
                   "single": "single_antenna", "single_antenna": "single_antenna"}


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _err(msg: str) -> None:
    print(f"frac-sim: error: {msg}", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_filter_check(args) -> int:
    if args.overlap not in EXPECTED_WINDOW:
        raise UsageError(f"unsupported overlap {args.overlap} (only 4 is available)")
    p = design_phydyas(args.n, args.overlap)
    threshold = CERTIFY_THRESHOLD if args.threshold is None else args.threshold
    if not 0 < threshold < 1:
        raise UsageError("threshold must lie in (0, 1)")
    big_l, big_m = localization_bounds(p, threshold)
    print(f"overlap={args.overlap} N={args.n} taps={len(p)}")
    print(f"energy={p.energy:.15f}")
    print(f"symmetry_residual={p.symmetry_residual:.3e}")
    print(f"threshold={threshold:g} L={big_l} M={big_m}")
    if args.csv:
        write_transmux_csv(args.csv, p, (0.0,))
    if args.threshold is not None:
        return EXIT_OK
    ok = (big_l, big_m) == EXPECTED_WINDOW[args.overlap]
    print("PASS" if ok else f"FAIL: expected (L, M) = {EXPECTED_WINDOW[args.overlap]}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_ici_check(args) -> int:
    scheme = _SCHEME_ALIASES[args.scheme]
    config = FracConfig(N=args.n, N_F=args.nf, L_n=args.ln, M_half=args.m_half)
    rng = np.random.default_rng(args.seed)
    if scheme == "frac":
        shape = payload_shape(config)
    else:
        shape = (config.N // 2, config.M_half)
    payload = PayloadGrid(rng.choice([-1.0, 1.0], size=shape), rng.choice([-1.0, 1.0], size=shape))
    rows = analysis.residual_report(payload, config, args.iafo, scheme=scheme)
    if args.csv:
        analysis.write_residual_csv(args.csv, rows)
    bad = [r for r in rows if not r["ok"]]
    for df in args.iafo:
        sub = [r for r in rows if r["delta_f_norm"] == df]
        worst = max(r["residual"] for r in sub)
        line = f"iafo={df:g} positions={len(sub)} max|W*+V|={worst:.3e}"
        if args.sir_trials:
            sir = analysis.measure_sir(scheme, "flat", df, config, args.sir_trials,
                                       np.random.default_rng(args.seed))
            line += f" SIR={sir:.2f} dB"
        print(line)
    if bad:
        r = max(bad, key=lambda r: r["residual"])
        print(f"FAIL: {len(bad)} positions exceed the bound; worst at k={r['subcarrier']} "
              f"n={r['n']} iafo={r['delta_f_norm']:g} residual={r['residual']:.3e} "
              f"|V|={r['abs_V']:.3e}")
        return EXIT_FAIL
    print("PASS")
    return EXIT_OK


def _sweep_config(args) -> harness.SweepConfig:
    if bool(args.config) == bool(args.preset):
        raise UsageError("give exactly one of --config or --preset")
    if args.config:
        try:
            cfg = harness.load_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
        except ValueError as exc:
            raise UsageError(f"bad config {args.config}: {exc}") from None
    else:
        cfg = harness.preset(args.preset, _SCHEME_ALIASES[args.scheme or "frac"])
    if args.scheme and args.config:
        cfg.scheme = _SCHEME_ALIASES[args.scheme]
    if args.trials is not None:
        cfg.trials = args.trials
    env_seed = os.environ.get("FRAC_SIM_SEED")
    if env_seed is not None:
        try:
            cfg.seed = int(env_seed)
        except ValueError:
            raise UsageError(f"FRAC_SIM_SEED must be an integer, got {env_seed!r}") from None
    elif args.seed is not None:
        cfg.seed = args.seed
    cfg.validate()
    return cfg


def cmd_ber_sweep(args) -> int:
    cfg = _sweep_config(args)
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    points = cfg.points()
    done = []
    try:
        fh = open(args.out, "w", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    with fh:
        try:
            for i, rec in enumerate(harness.iter_sweep(cfg, args.workers), start=1):
                done.append(rec)
                print(f"[{i}/{len(points)}] {rec.scheme} {rec.channel} snr={rec.snr_db:g} "
                      f"iafo={rec.iafo_norm:g} nf_half={rec.nf_half} ber={rec.ber:.3e}",
                      file=sys.stderr)
        except KeyboardInterrupt:
            harness.write_records(fh, done, complete=False)
            print(f"interrupted after {len(done)} of {len(points)} points", file=sys.stderr)
            return EXIT_INTERRUPTED
        harness.write_records(fh, done)
    return EXIT_OK


def cmd_plot(args) -> int:
    from .plot import plot_csv

    try:
        n = plot_csv(args.csv, args.out, args.x)
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv}: {exc.strerror}") from None
    except harness.MalformedCSV as exc:
        raise UsageError(f"{args.csv}: {exc}") from None
    print(f"wrote {args.out} ({n} series)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frac-sim", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    f = sub.add_parser("filter-check", help="prototype filter energy, symmetry and localization")
    f.add_argument("--overlap", type=int, default=4)
    f.add_argument("--n", type=int, default=256, help="samples per symbol")
    f.add_argument("--threshold", type=float, default=None,
                   help="scan threshold; giving it makes the run informational")
    f.add_argument("--csv", help="also dump the F table here")
    f.set_defaults(func=cmd_filter_check)

    c = sub.add_parser("ici-check", help="certify W* = -V at every payload position")
    c.add_argument("--iafo", type=_floats, default=[0.0, 0.1, 0.2, 0.3],
                   help="comma-separated offsets in subcarrier spacings")
    c.add_argument("--nf", type=int, default=16, help="subblock size N_F")
    c.add_argument("--n", type=int, default=256)
    c.add_argument("--ln", type=int, default=1)
    c.add_argument("--m-half", type=int, default=28)
    c.add_argument("--scheme", choices=("frac", "naive", "naive_alamouti"),
                   default="frac")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--sir-trials", type=int, default=0,
                   help="also measure the noiseless SIR over this many bursts (>= 100)")
    c.add_argument("--csv", help="write the residual report here")
    c.set_defaults(func=cmd_ici_check)

    s = sub.add_parser("ber-sweep", help="Monte Carlo BER sweep to CSV")
    s.add_argument("--config", help="JSON sweep configuration")
    s.add_argument("--preset", choices=harness.PRESETS)
    s.add_argument("--scheme", choices=sorted(_SCHEME_ALIASES))
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_ber_sweep)

    pl = sub.add_parser("plot", help="render a sweep CSV as SVG")
    pl.add_argument("csv")
    pl.add_argument("--x", choices=("snr", "iafo", "nf"), default="snr")
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigurationError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
