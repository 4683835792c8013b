"""Command-line entry point: ``python3 -m modadc <command> ...``."""

import argparse
import dataclasses
import sys

import numpy as np

from . import config as cfgtext
from .capture_io import read_capture, read_signal, write_capture, write_signal
from .harness import (
    ALGORITHMS,
    Acquisition,
    ExperimentConfig,
    recover,
    run_experiment,
    score,
    write_recon,
)
from .siggen import add_noise, gen_signal, to_fine_grid
from .sim import fold_hardware, fold_ideal


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        cfg = cfgtext.load(args.config, cfg)
    pairs = {}
    for item in getattr(args, "set", None) or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise cfgtext.ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        pairs[key.strip()] = value
    return cfgtext.apply(cfg, pairs) if pairs else cfg


def _print_metrics(metrics, out=None):
    for key, value in metrics.items():
        print(f"{key}={cfgtext.format_value(value)}", file=out or sys.stdout)


def cmd_generate(args):
    cfg = _config(args)
    m = args.fine_grid
    n = cfg.n_samples
    clean = gen_signal(cfg.signal, cfg.fs_hz, n, oversample=m)
    noise = add_noise(np.zeros(n), cfg.signal.noise_pct, cfg.noise_ref_v, [cfg.seed, cfg.signal.seed])
    write_signal(args.output, clean + to_fine_grid(noise, m), cfg.fs_hz, m)
    return 0


def cmd_fold(args):
    cfg = _config(args)
    g, fs, m = read_signal(args.input)
    path = args.path or cfg.adc_path
    if path == "ideal":
        cap = fold_ideal(g[::m], cfg.lam, fs)
        cap.meta["path"] = "ideal"
    else:
        adc = dataclasses.replace(cfg.adc, fine_grid_factor=m)
        cap = fold_hardware(g, adc, fs)
    write_capture(args.output, cap)
    return 0


def _recover_config(cfg: ExperimentConfig, args) -> ExperimentConfig:
    kw = {}
    if args.order is not None:
        kw["usalg"] = dataclasses.replace(cfg.usalg, order=args.order)
    if args.taps is not None:
        kw["lp"] = dataclasses.replace(cfg.lp, taps=args.taps)
    us = {
        name: getattr(args, name)
        for name in ("lattice_bound", "markov_order", "rounds", "guard", "band_hz")
        if getattr(args, name) is not None
    }
    if us:
        kw["uslse"] = dataclasses.replace(cfg.uslse, **us)
    return dataclasses.replace(cfg, **kw) if kw else cfg


def cmd_recover(args):
    cfg = _config(args)
    cap = read_capture(args.input)
    adc = cap.adc or cfg.adc
    cfg = dataclasses.replace(
        cfg,
        fs_hz=cap.fs_hz,
        n_samples=max(len(cap), 8),
        adc=dataclasses.replace(adc, lambda_volts=cap.lambda_volts),
    )
    cfg = _recover_config(cfg, args)
    if args.reference:
        g_ref, _, m = read_signal(args.reference)
        g_ref = g_ref[::m]
        if len(g_ref) != len(cap):
            raise ValueError("reference and capture lengths differ")
    else:
        g_ref = None
        if cfg.lp.init == "true":
            cfg = dataclasses.replace(cfg, lp=dataclasses.replace(cfg.lp, init="capture"))
    acq = Acquisition(clean=g_ref, g=g_ref, capture=cap)
    res = recover(args.alg, cfg, acq)
    if g_ref is not None:
        score(res, g_ref, cfg.lam)
        _print_metrics(
            {
                "algorithm": args.alg,
                "success": res.success,
                "nmse_db": res.nmse_db,
                "max_abs_err_v": res.max_abs_err_v,
                "constant_ambiguity_v": res.constant_ambiguity,
            }
        )
    for w in res.warnings:
        print(f"warning: {w}", file=sys.stderr)
    write_recon(args.output, res, g_ref if g_ref is not None else res.g_hat, cap.fs_hz)
    return 0


def cmd_experiment(args):
    cfg = _config(args)
    out = args.output_dir or cfg.output_dir
    res = run_experiment(cfg, output_dir=out)
    _print_metrics(res.metrics())
    return 0


def sweep(cfg: ExperimentConfig, key: str, values, seeds=1):
    """Run ``cfg`` for each textual ``value`` of ``key`` and each seed offset.

    Returns rows of ``(value, seed, algorithm, success, nmse_db, max_abs_err_v)``.
    """
    rows = []
    for value in values:
        base = cfgtext.apply(cfg, {key: value})
        for s in range(seeds):
            run = dataclasses.replace(base, seed=base.seed + s, output_dir=None)
            res = run_experiment(run)
            for alg in run.algorithms:
                r = res.results.get(alg)
                if r is None:
                    rows.append((value, run.seed, alg, False, float("nan"), float("nan")))
                else:
                    rows.append((value, run.seed, alg, r.success, r.nmse_db, r.max_abs_err_v))
    return rows


def cmd_sweep(args):
    cfg = _config(args)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    rows = sweep(cfg, args.param, values, args.seeds)
    lines = [f"{args.param},seed,algorithm,success,nmse_db,max_abs_err_v"]
    lines += [f"{v},{s},{a},{int(ok)},{nm!r},{err!r}" for v, s, a, ok, nm, err in rows]
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    # per value and algorithm success rate
    for value in values:
        summary = []
        for alg in cfg.algorithms:
            hits = [ok for v, _, a, ok, _, _ in rows if v == value and a == alg]
            summary.append(f"{alg} {sum(hits)}/{len(hits)}")
        print(f"# {args.param}={value}: " + ", ".join(summary), file=sys.stderr)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="modadc", description="Modulo ADC simulation and unfolding.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat key=value experiment config")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config field")

    sp = sub.add_parser("generate", help="signal spec -> signal CSV")
    common(sp)
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--fine-grid", type=int, default=1, help="write M points per sample period")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("fold", help="signal CSV -> capture CSV")
    common(sp)
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--path", choices=("ideal", "hardware"))
    sp.set_defaults(func=cmd_fold)

    sp = sub.add_parser("recover", help="capture CSV -> reconstruction CSV")
    common(sp)
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--alg", choices=ALGORITHMS, required=True)
    sp.add_argument("--reference", help="signal CSV of the true input, for metrics and LP start")
    sp.add_argument("--order", type=int)
    sp.add_argument("--taps", type=int)
    sp.add_argument("--lattice-bound", type=int)
    sp.add_argument("--markov-order", type=int)
    sp.add_argument("--rounds", type=int)
    sp.add_argument("--guard", type=float)
    sp.add_argument("--band-hz", type=float)
    sp.set_defaults(func=cmd_recover)

    sp = sub.add_parser("experiment", help="config file -> all artifacts")
    sp.add_argument("config")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE")
    sp.add_argument("--output-dir")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("sweep", help="vary one config field, emit a metrics table")
    sp.add_argument("config", nargs="?")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE")
    sp.add_argument("--param", required=True, help="config key, e.g. signal.noise_pct")
    sp.add_argument("--values", required=True, help="comma-separated values")
    sp.add_argument("--seeds", type=int, default=1)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
