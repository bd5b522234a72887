"""
Command-line driver.

Exit status: 0 on success, 1 on input errors, 2 when the protocol finds no
usable gate time.  Frequencies on the command line are in MHz, times in ns.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import serialize
from .analysis import (
    NoUsableGateTimeError,
    SweepResult,
    dtft,
    gate_time_grid,
    make_spec,
    protocol_run,
    simulate,
    sweep_gate_time,
    symmetric_grid,
    trace_populations,
)
from .grape import GrapeConfig, optimize
from .magnus import fourier_constraints, magnus_theta1_diag01
from .model import MHZ, SystemParams, load_params
from .pulses import FAMILIES, drag_beta_menu, render

log = logging.getLogger("crowdgate")


def _params(args) -> SystemParams:
    return load_params(args.params) if args.params else SystemParams()


def _beta(value: str | None):
    if value is None:
        return None
    try:
        return float(value) * MHZ
    except ValueError:
        return value


def _pulse(args, params):
    if getattr(args, "pulse", None):
        return serialize.read_pulse(args.pulse)
    if args.gate_time is None:
        raise ValueError("give --pulse FILE or --family with --gate-time")
    spec = make_spec(args.family, params, args.gate_time, _beta(args.beta), dt=args.dt)
    return render(spec, args.dt)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_simulate(args):
    params = _params(args)
    pulse = _pulse(args, params)
    report = simulate(params, pulse, frame=args.frame)
    if args.pulse_out:
        serialize.write_pulse(pulse, args.pulse_out)
    _emit(report.to_json(), args.out)


def cmd_sweep(args):
    params = _params(args)
    grid = gate_time_grid(args.t_min, args.t_max, args.t_step)
    if args.family == "drag" and args.beta == "menu":
        curves = {
            name: sweep_gate_time("drag", params, grid, args.dt, beta, frame=args.frame, workers=args.workers)
            for name, beta in drag_beta_menu(params).items()
        }
        cols = np.array([res.column("infid_avg") for res in curves.values()])
        best = np.nanargmin(cols, axis=0)
        names = list(curves)
        curves["min"] = SweepResult("drag", [curves[names[b]].rows[i] for i, b in enumerate(best)])
        serialize.write_sweeps_csv(curves, args.out or "/dev/stdout")
        return
    res = sweep_gate_time(args.family, params, grid, args.dt, _beta(args.beta), frame=args.frame, workers=args.workers)
    serialize.write_sweep_csv(res, args.out or "/dev/stdout")


def cmd_protocol(args):
    params = _params(args)
    res = protocol_run(params, args.family, (args.t_min, args.t_max), args.dt, args.grid_step, _beta(args.beta),
                       frame=args.frame, workers=args.workers)
    if args.pulse_out:
        serialize.write_pulse(render(res.spec, args.dt), args.pulse_out)
    _emit(json.dumps(res.to_dict(), indent=2), args.out)


def cmd_optimize(args):
    params = _params(args)
    base = json.loads(Path(args.config).read_text()) if args.config else {}
    overrides = {
        "gate_time": args.gate_time,
        "dt": args.dt,
        "objective": args.objective,
        "max_iterations": args.max_iter,
        "fidelity_goal": args.goal,
        "penalty_weight": args.penalty,
        "seed": args.seed,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if "gate_time" not in base:
        raise ValueError("optimize needs --gate-time or gate_time in --config")
    config = GrapeConfig.from_dict(base)
    initial = serialize.read_pulse(args.initial) if args.initial else None
    trace = optimize(params, initial, config)
    log.info("stopped after %d iterations (%s), fidelity %.10f", trace.iterations, trace.stop_reason,
             trace.final_fidelity)
    if args.pulse_out:
        serialize.write_pulse(trace.pulse, args.pulse_out)
    _emit(trace.to_json(), args.out)


def cmd_dtft(args):
    params = _params(args)
    pulse = _pulse(args, params)
    freqs = symmetric_grid(args.nu_max_mhz * MHZ, args.points)
    serialize.write_spectrum_csv(dtft(pulse, freqs), args.out or "/dev/stdout")


def cmd_trace(args):
    params = _params(args)
    pulse = _pulse(args, params)
    times, pops = trace_populations(params, pulse, args.initial)
    serialize.write_trajectory_csv(times, pops, args.out or "/dev/stdout")


def cmd_constraints(args):
    params = _params(args)
    pulse = _pulse(args, params)
    res = fourier_constraints(pulse, params)
    data = res.to_dict()
    data["theta1_diag01"] = magnus_theta1_diag01(pulse, params)
    if args.out:
        Path(args.out).write_text(json.dumps(data, indent=2) + "\n")
    print(res.table())
    print(f"{'<01|Theta_1|01>':<22s}{data['theta1_diag01']:.6e}")


def _common(p, pulse_source=True):
    p.add_argument("--params", help="system parameter JSON (delta_mhz, anharm_mhz, lambda)")
    p.add_argument("--dt", type=float, default=0.01, help="time step in ns (default 0.01)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--frame", choices=("qubit", "rotating"), default="qubit")
    if pulse_source:
        p.add_argument("--pulse", help="pulse file (CSV t_ns,omega_x,omega_y or JSON)")
        p.add_argument("--family", choices=FAMILIES, default="sideband")
        p.add_argument("--gate-time", type=float)
        p.add_argument("--beta", help="DRAG beta in MHz or anharm/delta/delta_minus_anharm")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crowdgate", description=__doc__.strip().splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="propagate one pulse and report fidelities")
    _common(p)
    p.add_argument("--pulse-out", help="also write the rendered pulse")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="fidelity errors versus gate time")
    _common(p, pulse_source=False)
    p.add_argument("--family", choices=FAMILIES, default="sideband")
    p.add_argument("--beta", help="DRAG beta in MHz, a menu name, or 'menu' for all three plus their minimum")
    p.add_argument("--t-min", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--t-step", type=float, default=0.5)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("protocol", help="choose gate time and phase corrections for an analytic family")
    _common(p, pulse_source=False)
    p.add_argument("--family", choices=FAMILIES, default="sideband")
    p.add_argument("--beta")
    p.add_argument("--t-min", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--grid-step", type=float, default=0.5)
    p.add_argument("--workers", type=int)
    p.add_argument("--pulse-out")
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("optimize", help="GRAPE optimisation")
    _common(p, pulse_source=False)
    p.set_defaults(dt=None)
    p.add_argument("--config", help="GrapeConfig JSON")
    p.add_argument("--gate-time", type=float)
    p.add_argument("--objective", choices=("phi", "phi_avg"))
    p.add_argument("--max-iter", type=int)
    p.add_argument("--goal", type=float, help="stop once the fidelity reaches this value")
    p.add_argument("--penalty", type=float, help="boundary penalty weight")
    p.add_argument("--seed", type=int)
    p.add_argument("--initial", help="initial pulse file")
    p.add_argument("--pulse-out")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("dtft", help="pulse spectrum on a symmetric frequency grid")
    _common(p)
    p.add_argument("--nu-max-mhz", type=float, default=800.0)
    p.add_argument("--points", type=int, default=2000, help="grid points on the positive side")
    p.set_defaults(func=cmd_dtft)

    p = sub.add_parser("trace", help="basis populations during a pulse")
    _common(p)
    p.add_argument("--initial", default="01", help="basis label j1j2 (default 01)")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("constraints", help="Fourier constraint residuals and <01|Theta_1|01>")
    _common(p)
    p.set_defaults(func=cmd_constraints)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    try:
        args.func(args)
    except NoUsableGateTimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
