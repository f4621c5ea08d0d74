"""Artifact serialization: field snapshots, CSV tables, JSON reports.

Snapshot format: a one-line JSON header ``{"n":..., "L":..., "name":...,
"t":...}`` terminated by a newline, followed by the raw little-endian
float64 grid values in row-major order.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .boussinesq import IterationRecord, MonitorRecord
from .spectral import Grid, SpectralField, make_grid

__all__ = [
    "write_snapshot",
    "read_snapshot",
    "monitor_to_csv",
    "iterations_to_csv",
    "trajectory_to_csv",
    "write_json",
]


def write_snapshot(path, field: SpectralField, name: str, t: float) -> None:
    grid = field.grid
    header = json.dumps({"n": grid.n, "L": grid.length, "name": name, "t": t})
    values = np.ascontiguousarray(field.values(), dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8") + b"\n")
        fh.write(values.tobytes())


def read_snapshot(path) -> tuple[SpectralField, dict]:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        n = int(header["n"])
        raw = fh.read(n * n * 8)
    values = np.frombuffer(raw, dtype="<f8").reshape(n, n)
    grid = make_grid(n, float(header["L"]))
    return SpectralField.from_values(grid, values), header


def monitor_to_csv(path, record: MonitorRecord) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "grad_u_inf", "bkm_integral", "theta_r", "u_r", "div_residual"])
        for s in record.samples:
            writer.writerow(
                [f"{s.t:.12g}", f"{s.grad_u_inf:.12g}", f"{s.bkm_integral:.12g}",
                 f"{s.theta_r:.12g}", f"{s.u_r:.12g}", f"{s.div_residual:.12g}"]
            )


def iterations_to_csv(path, records: list[IterationRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "cauchy_gap_theta", "cauchy_gap_u", "ratio"])
        for rec in records:
            ratio = "" if rec.ratio is None else f"{rec.ratio:.12g}"
            writer.writerow(
                [rec.n, f"{rec.cauchy_gap_theta:.12g}", f"{rec.cauchy_gap_u:.12g}", ratio]
            )


def trajectory_to_csv(path, rows: list[tuple]) -> None:
    """Rows of (t, sup-norm, Hoelder norm, mean) from a transport run."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "linf", "holder_r", "mean"])
        for row in rows:
            writer.writerow([f"{x:.12g}" for x in row])


def write_json(path, payload) -> None:
    data = payload.to_dict() if hasattr(payload, "to_dict") else payload
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
