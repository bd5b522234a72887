"""
CSV and JSON formats for pulses, sweeps, spectra and population traces.

Floats are written with 17 significant digits so that a round trip through
text reproduces the in-memory values exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .analysis import SWEEP_COLUMNS, Spectrum, SweepResult, SweepRow
from .model import DIM, basis_label
from .propagation import PulseSequence

PULSE_COLUMNS = ("t_ns", "omega_x", "omega_y")


def fmt(x) -> str:
    return format(float(x), ".17g")


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def write_pulse_csv(pulse: PulseSequence, path) -> None:
    rows = ((fmt(t), fmt(x), fmt(y)) for t, x, y in zip(pulse.times, pulse.omega_x, pulse.omega_y))
    _write_rows(path, PULSE_COLUMNS, rows)


def read_pulse_csv(path) -> PulseSequence:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != PULSE_COLUMNS:
            raise ValueError(f"{path}: expected header {','.join(PULSE_COLUMNS)}")
        data = np.array([[float(r[c]) for c in PULSE_COLUMNS] for r in reader])
    if data.size == 0:
        raise ValueError(f"{path}: no samples")
    # first midpoint is dt/2; doubling is exact in binary
    return PulseSequence(2 * data[0, 0], data[:, 1], data[:, 2])


def pulse_to_dict(pulse: PulseSequence) -> dict:
    return {"dt": pulse.dt, "omega_x": pulse.omega_x.tolist(), "omega_y": pulse.omega_y.tolist()}


def pulse_from_dict(data: dict) -> PulseSequence:
    return PulseSequence(float(data["dt"]), data["omega_x"], data["omega_y"])


def write_pulse_json(pulse: PulseSequence, path) -> None:
    Path(path).write_text(json.dumps(pulse_to_dict(pulse)))


def read_pulse_json(path) -> PulseSequence:
    return pulse_from_dict(json.loads(Path(path).read_text()))


def read_pulse(path) -> PulseSequence:
    return read_pulse_json(path) if str(path).endswith(".json") else read_pulse_csv(path)


def write_pulse(pulse: PulseSequence, path) -> None:
    if str(path).endswith(".json"):
        write_pulse_json(pulse, path)
    else:
        write_pulse_csv(pulse, path)


def sweep_rows(result: SweepResult, curve: str | None = None):
    for r in result.rows:
        vals = [fmt(getattr(r, c)) for c in SWEEP_COLUMNS[:-1]] + [r.status]
        yield vals if curve is None else [curve] + vals


def write_sweep_csv(result: SweepResult, path) -> None:
    _write_rows(path, SWEEP_COLUMNS, sweep_rows(result))


def write_sweeps_csv(curves: dict[str, SweepResult], path) -> None:
    """Several sweeps in long format with a leading ``curve`` column."""
    rows = (row for name, res in curves.items() for row in sweep_rows(res, name))
    _write_rows(path, ("curve",) + SWEEP_COLUMNS, rows)


def read_sweep_csv(path, family: str = "") -> SweepResult:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = [
            SweepRow(*(float(r[c]) for c in SWEEP_COLUMNS[:-1]), status=r["status"])
            for r in reader
        ]
    return SweepResult(family, rows)


def write_spectrum_csv(spec: Spectrum, path) -> None:
    header = ("nu_rad_per_ns", "re_x", "im_x", "abs_x", "re_y", "im_y", "abs_y")
    rows = (
        (fmt(f), fmt(x.real), fmt(x.imag), fmt(abs(x)), fmt(y.real), fmt(y.imag), fmt(abs(y)))
        for f, x, y in zip(spec.freqs, spec.x, spec.y)
    )
    _write_rows(path, header, rows)


def write_trajectory_csv(times: np.ndarray, pops: np.ndarray, path) -> None:
    header = ["t_ns"] + [f"p{basis_label(i)}" for i in range(DIM)]
    rows = ([fmt(t)] + [fmt(p) for p in row] for t, row in zip(times, pops))
    _write_rows(path, header, rows)
