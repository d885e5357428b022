"""Synthetic multi-class streams with known piecewise-linear class trajectories.

The stream cycles through the classes; each visit (a "run") traces that
class's template trajectory over a jittered duration, plus Gaussian noise
whose standard deviation is a fraction of each feature's noiseless range.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

# knots of each class trajectory, one row per knot, one column per feature
DEFAULT_TEMPLATES = (
    ((2.0, 6.0), (4.0, 9.0), (3.0, 7.0)),
    ((6.0, 7.0), (8.0, 5.0), (7.0, 6.0)),
    ((10.0, 6.0), (11.0, 8.0), (9.0, 9.0)),
)


@dataclass(frozen=True)
class DriftSpec:
    """Feature offset ramping linearly from 0 to ``magnitude`` over a stretch of samples."""

    start_fraction: float = 0.75
    length_fraction: float = 0.1
    magnitude: Tuple[float, ...] = (2.0, 0.0)


@dataclass(frozen=True)
class SyntheticSpec:
    n_points: int = 3000
    run_length: int = 100
    run_jitter: float = 0.2
    dt: float = 1.0
    noise_fraction: float = 0.05
    templates: Tuple = DEFAULT_TEMPLATES
    drift: Optional[DriftSpec] = None
    seed: int = 0


def _trace(knots: np.ndarray, n: int) -> np.ndarray:
    """Piecewise-linear path through ``knots`` sampled at ``n`` evenly spaced phases."""
    phase = np.linspace(0.0, 1.0, n, endpoint=False)
    grid = np.linspace(0.0, 1.0, len(knots))
    return np.column_stack([np.interp(phase, grid, knots[:, j]) for j in range(knots.shape[1])])


def generate(spec: SyntheticSpec = SyntheticSpec()):
    """Return ``(t, X, labels)`` arrays for a synthetic stream."""
    rng = np.random.default_rng(spec.seed)
    templates = [np.asarray(k, dtype=float) for k in spec.templates]
    n_classes = len(templates)
    clean, labels = [], []
    total, cls = 0, 0
    while total < spec.n_points:
        jitter = rng.uniform(1.0 - spec.run_jitter, 1.0 + spec.run_jitter)
        n = max(2, int(round(spec.run_length * jitter)))
        clean.append(_trace(templates[cls], n))
        labels.append(np.full(n, cls))
        total += n
        cls = (cls + 1) % n_classes
    clean = np.vstack(clean)[: spec.n_points]
    labels = np.concatenate(labels)[: spec.n_points]

    span = clean.max(axis=0) - clean.min(axis=0)
    X = clean + rng.normal(size=clean.shape) * (spec.noise_fraction * span)
    if spec.drift is not None:
        d = spec.drift
        start = int(d.start_fraction * spec.n_points)
        length = max(1, int(d.length_fraction * spec.n_points))
        ramp = np.linspace(0.0, 1.0, length)[:, None] * np.asarray(d.magnitude, dtype=float)[None, :]
        stop = min(start + length, spec.n_points)
        X[start:stop] += ramp[: stop - start]
    t = np.arange(spec.n_points, dtype=float) * spec.dt
    return t, X, labels


def write_csv(path, t, X, labels, class_names: Optional[Sequence[str]] = None) -> Path:
    path = Path(path)
    names = class_names or [f"state_{i}" for i in range(int(labels.max()) + 1)]
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["time"] + [f"x{j + 1}" for j in range(X.shape[1])] + ["label"])
        for ti, xi, li in zip(t, X, labels):
            w.writerow([repr(float(ti))] + [repr(float(v)) for v in xi] + [names[int(li)]])
    return path
