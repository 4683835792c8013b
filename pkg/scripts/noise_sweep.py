"""Success rate of each algorithm against noise level for one scenario.

    python3 scripts/noise_sweep.py scripts/configs/sine_2k5_10v_noisy.cfg \
        --sigmas 0,0.05,0.1,0.15,0.2,0.3 --seeds 20 -o sweep.csv

Noise levels are given as absolute standard deviations in volts; each is
converted to ``signal.noise_pct`` against the peak amplitude.
"""

import argparse

from modadc.cli import sweep
from modadc.harness import load_config


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--sigmas", default="0,0.05,0.1,0.15,0.2,0.3,0.5")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("-o", "--output")
    args = ap.parse_args(argv)

    cfg = load_config(args.config).with_(noise_reference="peak")
    peak = cfg.signal.peak_v
    sigmas = [float(s) for s in args.sigmas.split(",") if s.strip()]
    rows = []
    print(f"{'sigma_V':>8s}  " + "  ".join(f"{a:>8s}" for a in cfg.algorithms))
    for sigma in sigmas:
        pct = repr(sigma / peak)
        got = sweep(cfg, "signal.noise_pct", [pct], args.seeds)
        rates = {a: sum(ok for _, _, alg, ok, _, _ in got if alg == a) / args.seeds for a in cfg.algorithms}
        print(f"{sigma:8.3f}  " + "  ".join(f"{rates[a]:8.2f}" for a in cfg.algorithms))
        rows += [(sigma, s, a, ok, nm, err) for _, s, a, ok, nm, err in got]
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("sigma_v,seed,algorithm,success,nmse_db,max_abs_err_v\n")
            for sigma, s, a, ok, nm, err in rows:
                fh.write(f"{sigma!r},{s},{a},{int(ok)},{nm!r},{err!r}\n")


if __name__ == "__main__":
    main()
