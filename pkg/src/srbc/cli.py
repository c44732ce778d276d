"""Command-line front end for the simulator and the analytical curves.

Each subcommand builds a SystemConfig from defaults, an optional
key=value config file, and command-line flags (in that precedence),
runs one experiment, prints the resulting points, and optionally writes
them to CSV.  The exit code is nonzero when any requested point failed
numerically or a theory/simulation comparison missed its band.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import analysis
from .harness import (SystemConfig, emit_csv, run_ber_sweep, run_cfo_study,
                      run_compare, run_pmd_sweep, run_retx, run_roc)
from .waveform import ConfigurationError

_CONFIG_FIELDS = ("scheme", "n", "zeta", "gamma_mag", "snr_db", "cfo_eps",
                  "l_direct", "l_forward", "sigma_v", "pfa_target", "trials",
                  "seed", "channel_mode", "crc_preset", "threads")
_INT_FIELDS = {"n", "zeta", "l_direct", "l_forward", "trials", "seed", "threads"}
_FLOAT_FIELDS = {"gamma_mag", "cfo_eps", "sigma_v", "pfa_target"}


def _parse_float_list(text: str):
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def _parse_config_value(key: str, text: str):
    if key in _INT_FIELDS:
        return int(text)
    if key in _FLOAT_FIELDS:
        return float(text)
    if key == "snr_db":
        return _parse_float_list(text)
    if key == "crc_preset":
        return int(text, 0)
    return text


def load_config_file(path: str) -> dict:
    """Read key=value lines ('#' starts a comment) into config kwargs."""
    out = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_FIELDS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            out[key] = _parse_config_value(key, value.strip())
    return out


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help="key=value file supplying config fields")
    parser.add_argument("--scheme", choices=("ook", "fsk1", "fsk2"))
    parser.add_argument("--n", type=int, help="DFT size")
    parser.add_argument("--zeta", type=int, help="data/null spacing parameter")
    parser.add_argument("--gamma", type=float, help="reflection magnitude")
    parser.add_argument("--snr", type=_parse_float_list,
                        help="SNR grid in dB, comma separated")
    parser.add_argument("--cfo", type=float, help="carrier offset (subcarrier fraction)")
    parser.add_argument("--l-direct", type=int, help="direct-link tap count")
    parser.add_argument("--l-forward", type=int, help="forward-link tap count")
    parser.add_argument("--sigma-v", type=float, help="backward-link RMS gain")
    parser.add_argument("--pfa-target", type=float, help="false-alarm design point")
    parser.add_argument("--trials", type=int, help="per-point trial cap")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--channel-mode", choices=("tdl", "iid"))
    parser.add_argument("--crc-preset", type=lambda s: int(s, 0),
                        help="5-bit register preset (0b01001 for the Gen2 variant)")
    parser.add_argument("--threads", type=int, help="worker threads")
    parser.add_argument("--out", metavar="CSV", help="write the curve(s) here")


def build_config(args: argparse.Namespace) -> SystemConfig:
    kwargs = {}
    if args.config:
        kwargs.update(load_config_file(args.config))
    flag_map = (
        ("scheme", args.scheme), ("n", args.n), ("zeta", args.zeta),
        ("gamma_mag", args.gamma), ("snr_db", args.snr), ("cfo_eps", args.cfo),
        ("l_direct", args.l_direct), ("l_forward", args.l_forward),
        ("sigma_v", args.sigma_v), ("pfa_target", args.pfa_target),
        ("trials", args.trials), ("seed", args.seed),
        ("channel_mode", args.channel_mode), ("crc_preset", args.crc_preset),
        ("threads", args.threads),
    )
    for key, value in flag_map:
        if value is not None:
            kwargs[key] = value
    return SystemConfig(**kwargs)


def _print_curve(curve, label: str) -> None:
    print(f"# {label}: scheme={curve.meta['scheme']} N={curve.meta['N']} "
          f"gamma={curve.meta['gamma']} cfo={curve.meta['cfo']}")
    halfwidths = getattr(curve, "confidence_halfwidth", None)
    if halfwidths is None:
        halfwidths = np.zeros(len(curve.values))
    for a, v, c in zip(curve.abscissa, curve.values, halfwidths):
        print(f"abscissa={a:g} value={v:.6g} ci95={c:.3g}")


def _suffixed(path: str, tag: str) -> str:
    stem, dot, ext = path.rpartition(".")
    if dot:
        return f"{stem}_{tag}.{ext}"
    return f"{path}_{tag}"


def _auto_eta_grid(cfg: SystemConfig) -> np.ndarray:
    """Thresholds hitting a spread of design false-alarm points, plus 0."""
    plan = cfg.plan()
    w_bin = analysis.noise_bin_variance(cfg.snr_db[0])
    noise = analysis.ExpMixSpec(np.full(len(plan.kb0), 1.0 / w_bin))
    pfas = np.geomspace(5e-3, 0.9, 12)
    etas = [analysis.optimal_threshold(float(p), noise) for p in pfas]
    return np.array([0.0] + etas)


def _cmd_pmd(args) -> int:
    cfg = build_config(args)
    curve = run_pmd_sweep(cfg)
    _print_curve(curve, "missed-detection probability vs SNR")
    if args.out:
        emit_csv(curve, args.out)
    return 0


def _cmd_roc(args) -> int:
    cfg = build_config(args)
    if args.eta_grid == "auto":
        etas = _auto_eta_grid(cfg)
    else:
        etas = np.asarray(_parse_float_list(args.eta_grid))
    curve = run_roc(cfg, etas)
    _print_curve(curve, "detection vs false-alarm probability")
    if args.out:
        emit_csv(curve, args.out)
    return 0


def _cmd_ber(args) -> int:
    cfg = build_config(args)
    curve = run_ber_sweep(cfg, args.target)
    _print_curve(curve, f"{args.target} bit error rate vs SNR")
    if args.out:
        emit_csv(curve, args.out)
    return 0


def _cmd_cfo(args) -> int:
    cfg = build_config(args)
    eps = np.asarray(_parse_float_list(args.eps_grid))
    curves = run_cfo_study(cfg, eps)
    for e, curve in zip(eps, curves):
        _print_curve(curve, f"tag bit error rate vs SNR at offset {e:g}")
        if args.out:
            emit_csv(curve, _suffixed(args.out, f"eps{e:g}"))
    return 0


def _cmd_retx(args) -> int:
    cfg = build_config(args)
    curve = run_retx(cfg)
    _print_curve(curve, "frame retransmission probability vs SNR")
    if args.out:
        emit_csv(curve, args.out)
    return 0


def _cmd_theory(args) -> int:
    cfg = build_config(args)
    if args.kind == "auto":
        kind = "OOK_PMD" if cfg.scheme == "ook" else "FSK_BER"
    else:
        kind = args.kind
    params = analysis.TheoryParams(cfg.scheme, cfg.n, cfg.gamma_mag, cfg.zeta,
                                   cfg.sigma_v, cfg.pfa_target)
    curve = analysis.theory_sweep(kind, np.asarray(cfg.snr_db), params)
    _print_curve(curve, f"analytical {kind}")
    if args.out:
        emit_csv(curve, args.out)
    failed = curve.meta.get("failed_points")
    if failed:
        print(f"numerical failure at point indices {failed}", file=sys.stderr)
        return 1
    return 0


def _cmd_compare(args) -> int:
    cfg = build_config(args)
    theory, sim, rows, ok = run_compare(cfg)
    print("# analytical vs iid-mode simulation "
          f"(scheme={cfg.scheme} N={cfg.n} gamma={cfg.gamma_mag!r})")
    for row in rows:
        state = "ok" if row["ok"] else "MISS"
        if not row["checked"]:
            state = "below-floor"
        print(f"abscissa={row['abscissa']:g} theory={row['theory']:.6g} "
              f"sim={row['sim']:.6g} ci95={row['ci95']:.3g} "
              f"tol={row['tol']:.3g} {state}")
    if args.out:
        emit_csv(theory, _suffixed(args.out, "theory"))
        emit_csv(sim, _suffixed(args.out, "sim"))
    if not ok:
        print("comparison failed", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="srbc",
        description="Backscatter-over-OFDM link simulator and analytical toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    specs = (
        ("pmd", _cmd_pmd, "missed-detection probability sweep (ook)"),
        ("roc", _cmd_roc, "detection vs false-alarm curve (ook, single SNR)"),
        ("ber", _cmd_ber, "bit error rate sweep"),
        ("cfo", _cmd_cfo, "bit error rate under carrier offsets"),
        ("retx", _cmd_retx, "frame retransmission probability sweep"),
        ("theory", _cmd_theory, "analytical curve without simulation"),
        ("compare", _cmd_compare, "analytical vs iid-mode simulation"),
    )
    for name, func, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
        p.set_defaults(func=func)
        if name == "roc":
            p.add_argument("--eta-grid", default="auto",
                           help="comma-separated thresholds, or 'auto'")
        if name == "ber":
            p.add_argument("--target", choices=("bd", "primary"), default="bd")
        if name == "cfo":
            p.add_argument("--eps-grid", default="0.0,0.05",
                           help="comma-separated carrier offsets")
        if name == "theory":
            p.add_argument("--kind", choices=("auto", "OOK_PMD", "FSK_BER"),
                           default="auto")

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
