"""Best-of-seeds GRAPE fidelity versus gate time at a fixed (coarse) time step.

    python3 scripts/speed_limit_scan.py --dt 1 --t-min 3 --t-max 10 --seeds 5 --out speed_limit.csv
"""

import argparse
import csv

import numpy as np

from crowdgate import GrapeConfig, SystemParams, load_params, multistart


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--params")
    ap.add_argument("--dt", type=float, default=1.0)
    ap.add_argument("--t-min", type=float, default=3.0)
    ap.add_argument("--t-max", type=float, default=10.0)
    ap.add_argument("--t-step", type=float, default=1.0)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--objective", choices=("phi", "phi_avg"), default="phi")
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out", default="speed_limit.csv")
    args = ap.parse_args()

    params = load_params(args.params) if args.params else SystemParams()
    gate_times = np.arange(args.t_min, args.t_max + 1e-9, args.t_step)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["gate_time", "n_slices", "best_phi", "best_phi_avg", "best_seed"])
        for tg in gate_times:
            config = GrapeConfig(gate_time=float(tg), dt=args.dt, objective=args.objective)
            traces = multistart(params, config, range(args.seeds), args.workers)
            k = int(np.argmax([t.report.phi for t in traces]))
            r = traces[k].report
            w.writerow([f"{tg:g}", traces[k].pulse.n_samples, f"{r.phi:.10f}", f"{r.phi_avg:.10f}", k])
            print(f"t_g {tg:5.2f} ns  best phi {r.phi:.8f}  (seed {k})", flush=True)


if __name__ == "__main__":
    main()
