"""On-disk formats: measure/sample JSON documents and plot-ready CSV curves."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .model import AtomicMeasure, SampleVector

__all__ = [
    "measure_to_json",
    "measure_from_json",
    "samples_to_json",
    "samples_from_json",
    "write_curve_csv",
]


def measure_to_json(x: AtomicMeasure) -> dict:
    return {
        "dim": x.dim,
        "locations": x.locations.tolist(),
        "amp_re": x.amplitudes.real.tolist(),
        "amp_im": x.amplitudes.imag.tolist(),
    }


def measure_from_json(doc: dict) -> AtomicMeasure:
    amp = np.asarray(doc["amp_re"], dtype=float) + 1j * np.asarray(doc["amp_im"], dtype=float)
    return AtomicMeasure(int(doc["dim"]), np.asarray(doc["locations"], dtype=float), amp)


def samples_to_json(y: SampleVector) -> dict:
    return {
        "dim": y.dim,
        "fc": y.fc,
        "k_min": -y.fc,
        "coeff_re": np.asarray(y.coeffs).real.tolist(),
        "coeff_im": np.asarray(y.coeffs).imag.tolist(),
    }


def samples_from_json(doc: dict) -> SampleVector:
    c = np.asarray(doc["coeff_re"], dtype=float) + 1j * np.asarray(doc["coeff_im"], dtype=float)
    fc = int(doc["fc"])
    if int(doc.get("k_min", -fc)) != -fc:
        raise ValueError("coefficients must start at k = -fc (increasing k)")
    dim = int(doc["dim"])
    if dim == 2:
        c = c.reshape(2 * fc + 1, 2 * fc + 1)
    return SampleVector(dim, fc, c)


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def dump_json(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def write_curve_csv(path, t: np.ndarray, values: np.ndarray) -> None:
    """Write a sampled curve as rows of ``t,re,im``."""
    values = np.asarray(values, dtype=complex)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "re", "im"])
        for ti, vi in zip(np.asarray(t, dtype=float), values):
            writer.writerow([repr(float(ti)), repr(float(vi.real)), repr(float(vi.imag))])
