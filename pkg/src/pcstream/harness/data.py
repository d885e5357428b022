"""CSV ingestion, sampling-rate simulation and train/test splitting."""
from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ConfigError, MissingColumn, NonMonotoneTime, ParseError
from ..model import TimedSample


@dataclass(frozen=True)
class Fixed:
    """Keep the first of every ``c`` consecutive samples."""

    c: int = 1

    def __post_init__(self):
        if int(self.c) != self.c or self.c < 1:
            raise ConfigError(f"sampling factor must be an integer >= 1, got {self.c}")

    def __str__(self):
        return f"fixed:{self.c}"


@dataclass(frozen=True)
class RandomUniform:
    """Draw a fresh skip length in ``[c_min, c_max]`` after every kept sample."""

    c_min: int = 1
    c_max: int = 1

    def __post_init__(self):
        if self.c_min < 1 or self.c_min > self.c_max:
            raise ConfigError(f"need 1 <= c_min <= c_max, got {self.c_min}, {self.c_max}")

    def __str__(self):
        return f"random:{self.c_min}:{self.c_max}"


RateMode = Union[Fixed, RandomUniform]


def parse_rate(text) -> RateMode:
    """Parse ``"3"``, ``"fixed:3"`` or ``"random:1:10"``."""
    if isinstance(text, (Fixed, RandomUniform)):
        return text
    s = str(text).strip().lower()
    m = re.fullmatch(r"(?:fixed:)?(\d+)", s)
    if m:
        return Fixed(int(m.group(1)))
    m = re.fullmatch(r"random:(\d+):(\d+)", s)
    if m:
        return RandomUniform(int(m.group(1)), int(m.group(2)))
    raise ConfigError(f"unrecognised sampling rate {text!r}; use N, fixed:N or random:MIN:MAX")


@dataclass(frozen=True)
class StreamSpec:
    source: Path
    features: Optional[Tuple[str, ...]] = None  # None: every column except time and label
    time_col: str = "time"
    label_col: str = "label"
    split_fraction: float = 0.6
    rate: RateMode = Fixed(1)

    def __post_init__(self):
        if not 0.0 < self.split_fraction < 1.0:
            raise ConfigError("split_fraction must lie in (0, 1)")


@dataclass
class Stream:
    samples: List[TimedSample]
    class_names: Tuple[str, ...]
    feature_names: Tuple[str, ...]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def class_mapping(self) -> dict:
        return {name: i for i, name in enumerate(self.class_names)}


def ingest_csv(spec: StreamSpec) -> Stream:
    """Read a headered CSV into time-ordered samples.

    Labels become dense ids in order of first appearance.  Row numbers in
    errors count data rows from 0 (the header is not counted).
    """
    path = Path(spec.source)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: file is empty") from None
        features = list(spec.features) if spec.features else [
            h for h in header if h not in (spec.time_col, spec.label_col)
        ]
        for col in [spec.time_col, spec.label_col, *features]:
            if col not in header:
                raise MissingColumn(f"{path}: column {col!r} not found (have {header})")
        if not features:
            raise MissingColumn(f"{path}: no feature columns")
        ti = header.index(spec.time_col)
        li = header.index(spec.label_col)
        fi = [header.index(f) for f in features]

        names: dict = {}
        samples: List[TimedSample] = []
        prev_t = -math.inf
        for row_no, row in enumerate(reader):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                t = float(row[ti])
                x = [float(row[j]) for j in fi]
                raw_label = row[li].strip()
            except (ValueError, IndexError) as exc:
                raise ParseError(f"{path}: row {row_no}: {exc}", row=row_no) from None
            if not (math.isfinite(t) and all(math.isfinite(v) for v in x)):
                raise ParseError(f"{path}: row {row_no}: non-finite value", row=row_no)
            if t <= prev_t:
                raise NonMonotoneTime(f"{path}: row {row_no}: time {t} does not exceed {prev_t}", row=row_no)
            prev_t = t
            label = names.setdefault(raw_label, len(names))
            samples.append(TimedSample(t, x, label))
    return Stream(samples, tuple(names), tuple(features))


def resample(samples: Sequence[TimedSample], mode: RateMode, seed: Optional[int] = None) -> List[TimedSample]:
    """Drop samples to simulate a lower sampling rate; timestamps are untouched."""
    mode = parse_rate(mode)
    if isinstance(mode, Fixed):
        return list(samples[:: mode.c])
    rng = np.random.default_rng(seed)
    kept, i = [], 0
    while i < len(samples):
        kept.append(samples[i])
        i += int(rng.integers(mode.c_min, mode.c_max + 1))
    return kept


def split_chronological(samples: Sequence[TimedSample], fraction: float):
    """First ``fraction`` of the stream for training, the rest for testing."""
    k = int(round(fraction * len(samples)))
    return list(samples[:k]), list(samples[k:])


def standardize(train: Sequence[TimedSample], test: Sequence[TimedSample]):
    """Scale features with the training mean/std (constant features left centred only)."""
    X = np.array([s.x for s in train])
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0

    def apply(seq):
        return [TimedSample(s.t, (s.x - mu) / sd, s.label) for s in seq]

    return apply(train), apply(test)
