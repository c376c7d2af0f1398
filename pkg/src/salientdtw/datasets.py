"""UCR-format datasets and the warped-bump synthetic generator."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, InvalidInputError

_SPLIT = re.compile(r"[,\s]+")


@dataclass(frozen=True, eq=False)
class Dataset:
    name: str
    labels: np.ndarray       # int, one per series
    series: tuple            # float64 arrays

    def __len__(self):
        return len(self.series)

    @property
    def uniform_length(self) -> bool:
        return len({s.size for s in self.series}) <= 1

    @property
    def length(self) -> int | None:
        return self.series[0].size if self.uniform_length and self.series else None

    @property
    def n_classes(self) -> int:
        return int(np.unique(self.labels).size)


def _parse_label(tok, where):
    try:
        v = float(tok)
    except ValueError:
        raise DataError(f"{where}: label {tok!r} is not a number") from None
    if not math.isfinite(v) or v != int(v):
        raise DataError(f"{where}: label {tok!r} is not an integer")
    return int(v)


def load_ucr(*paths, name: str | None = None) -> Dataset:
    """Read one or more UCR text files (label first, then values; comma or space separated).

    Several paths (e.g. the TRAIN and TEST split) are concatenated in order.
    """
    if not paths:
        raise InvalidInputError("no dataset path given")
    labels, series = [], []
    for path in paths:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc}") from exc
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            toks = [t for t in _SPLIT.split(line) if t]
            if len(toks) < 2:
                raise DataError(f"{where}: expected a label and at least one value")
            labels.append(_parse_label(toks[0], where))
            try:
                vals = np.array([float(t) for t in toks[1:]])
            except ValueError:
                raise DataError(f"{where}: unparsable value") from None
            if not np.all(np.isfinite(vals)):
                raise DataError(f"{where}: NaN or Inf value")
            series.append(vals)
    if not series:
        raise DataError(f"no series found in {', '.join(map(str, paths))}")
    name = name or Path(paths[0]).stem.replace("_TRAIN", "").replace("_TEST", "")
    return Dataset(name, np.array(labels, dtype=np.int64), tuple(series))


def save_ucr(dataset: Dataset, path) -> None:
    with open(path, "w") as fh:
        for lab, s in zip(dataset.labels.tolist(), dataset.series):
            fh.write(str(lab) + " " + " ".join(repr(float(v)) for v in s) + "\n")


def _bumps(t, centers, widths, amps):
    return (amps[:, None] * np.exp(-0.5 * ((t[None, :] - centers[:, None])
                                           / widths[:, None]) ** 2)).sum(0)


def random_warp(length: int, strength: float, rng) -> np.ndarray:
    """Monotone map of [0, L-1] onto itself with local slope in [1 - s, 1 + s]."""
    t = np.arange(length, dtype=np.float64)
    if strength == 0:
        return t
    g = np.zeros(length)
    for freq in range(1, 4):
        g += rng.normal() * np.sin(2 * np.pi * freq * t / length + rng.uniform(0, 2 * np.pi))
    # zero-mean slopes keep the endpoints fixed
    g = g[:-1] - g[:-1].mean()
    peak = np.abs(g).max()
    if peak > 0:
        g /= peak
    slope = 1.0 + strength * g
    return np.concatenate([[0.0], np.cumsum(slope)])


def generate_synthetic(classes: int, per_class: int, length: int,
                       warp_strength: float, noise: float, seed: int) -> Dataset:
    """Classes of 2-4 Gaussian bumps; instances are time-warped, noisy copies.

    Instances evaluate the class shape at warped times, so no resampling
    error is introduced.
    """
    if classes < 1 or per_class < 1 or length < 2:
        raise InvalidInputError("classes, per_class must be >= 1 and length >= 2")
    if not 0 <= warp_strength < 1:
        raise InvalidInputError("warp_strength must be in [0, 1)")
    if noise < 0:
        raise InvalidInputError("noise must be >= 0")
    rng = np.random.default_rng(seed)
    shapes = []
    for _ in range(classes):
        k = int(rng.integers(2, 5))
        centers = rng.uniform(0.1, 0.9, k) * (length - 1)
        widths = rng.uniform(0.015, 0.06, k) * length
        amps = rng.uniform(0.5, 1.5, k) * rng.choice([-1.0, 1.0], k)
        shapes.append((centers, widths, amps))
    labels, series = [], []
    for c, (centers, widths, amps) in enumerate(shapes):
        for _ in range(per_class):
            tw = random_warp(length, warp_strength, rng)
            s = _bumps(tw, centers, widths, amps)
            if noise > 0:
                s = s + rng.normal(0.0, noise, length)
            labels.append(c + 1)
            series.append(s)
    return Dataset(f"synthetic-{classes}x{per_class}-L{length}", np.array(labels),
                   tuple(series))
