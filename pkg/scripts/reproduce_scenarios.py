"""Run every scenario config under scripts/configs and print a success table.

Noisy scenarios are run under both noise references. With ``--output-dir``
each run also writes its CSV artifacts to ``<dir>/<scenario>[_<ref>]/``.

    python3 scripts/reproduce_scenarios.py --seeds 20
"""

import argparse
import pathlib

from modadc.harness import ExperimentConfig, load_config, run_experiment

HERE = pathlib.Path(__file__).resolve().parent


def run_scenario(cfg: ExperimentConfig, seeds: int, output_dir=None):
    hits = {a: 0 for a in cfg.algorithms}
    worst = {a: 0.0 for a in cfg.algorithms}
    for s in range(seeds):
        out = output_dir if (output_dir is not None and s == 0) else None
        res = run_experiment(cfg.with_(seed=cfg.seed + s), output_dir=out)
        for alg in cfg.algorithms:
            r = res.results.get(alg)
            if r is not None and r.success:
                hits[alg] += 1
            if r is not None:
                worst[alg] = max(worst[alg], r.max_abs_err_v)
            else:
                worst[alg] = float("inf")
    return hits, worst


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--configs", default=str(HERE / "configs"))
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--output-dir")
    ap.add_argument("--path", choices=("ideal", "hardware"), help="override adc_path of every config")
    args = ap.parse_args(argv)

    paths = sorted(pathlib.Path(args.configs).glob("*.cfg"))
    if not paths:
        ap.error(f"no .cfg files in {args.configs}")
    header = f"{'scenario':38s} {'sigma_V':>8s}  " + "  ".join(f"{a:>12s}" for a in ("usalg", "lp", "uslse"))
    print(header)
    print("-" * len(header))
    for path in paths:
        base = load_config(path)
        if args.path:
            base = base.with_(adc_path=args.path)
        refs = ("peak", "adc_range") if base.signal.noise_pct > 0 else ("peak",)
        for ref in refs:
            cfg = base.with_(noise_reference=ref)
            name = path.stem if len(refs) == 1 else f"{path.stem}_{ref}"
            out = pathlib.Path(args.output_dir) / name if args.output_dir else None
            hits, _ = run_scenario(cfg, args.seeds, out)
            cells = "  ".join(f"{hits[a]:>5d}/{args.seeds:<6d}" for a in ("usalg", "lp", "uslse"))
            print(f"{name:38s} {cfg.noise_std:8.3f}  {cells}")


if __name__ == "__main__":
    main()
