"""Gradient-histogram descriptors and complete salient-feature records."""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidInputError
from .scale_space import (MIN_SERIES_LENGTH, SalientPoint, ScaleSpacePyramid,
                          as_series, build_pyramid, detect_keypoints,
                          magnitude_floor)


@dataclass(frozen=True)
class FeatureParams:
    num_octaves: int | None = None   # None: floor(log2 N) - 6, at least 1
    levels: int = 2
    epsilon: float = 0.0096
    base_sigma: float = 1.6
    descriptor_bins: int = 64
    normalize: bool = True
    floor_fraction: float = 1e-6

    def __post_init__(self):
        if self.descriptor_bins < 4 or self.descriptor_bins % 4:
            raise InvalidInputError(
                "descriptor_bins must be a positive multiple of 4 (2a cells x 2 bins)")

    @property
    def cells(self) -> int:
        return self.descriptor_bins // 2

    def fingerprint(self) -> str:
        text = ";".join(f"{k}={v!r}" for k, v in sorted(asdict(self).items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class SalientFeature:
    point: SalientPoint
    descriptor: np.ndarray = field(repr=False)
    amplitude: float
    series_id: object = None

    @property
    def position(self) -> float:
        return self.point.position

    @property
    def sigma(self) -> float:
        return self.point.sigma

    def __eq__(self, other):
        if not isinstance(other, SalientFeature):
            return NotImplemented
        return (self.point == other.point and self.amplitude == other.amplitude
                and self.series_id == other.series_id
                and np.array_equal(self.descriptor, other.descriptor))

    __hash__ = None


class FeatureSet:
    """Features of one series with their fields stacked into arrays for matching."""

    __slots__ = ("features", "position", "sigma", "amplitude", "scope_start",
                 "scope_end", "descriptors", "sq_norms")

    def __init__(self, features):
        self.features = tuple(features)
        f = self.features
        self.position = np.array([x.point.position for x in f], dtype=np.float64)
        self.sigma = np.array([x.point.sigma for x in f], dtype=np.float64)
        self.amplitude = np.array([x.amplitude for x in f], dtype=np.float64)
        self.scope_start = np.array([x.point.scope_start for x in f], dtype=np.float64)
        self.scope_end = np.array([x.point.scope_end for x in f], dtype=np.float64)
        width = f[0].descriptor.size if f else 0
        self.descriptors = (np.array([x.descriptor for x in f], dtype=np.float64)
                            if f else np.empty((0, width)))
        self.sq_norms = (self.descriptors * self.descriptors).sum(1)

    def __len__(self):
        return len(self.features)

    def __getitem__(self, k):
        return self.features[k]

    def __iter__(self):
        return iter(self.features)


def as_feature_set(features) -> FeatureSet:
    return features if isinstance(features, FeatureSet) else FeatureSet(features)


def compute_gradients(series) -> np.ndarray:
    """Central differences inside, one-sided differences at both ends."""
    x = as_series(series)
    if x.size < 2:
        raise InvalidInputError("gradient needs at least 2 samples")
    return np.gradient(x)


def build_descriptor(point: SalientPoint, pyramid: ScaleSpacePyramid,
                     cells: int, normalize: bool = True) -> np.ndarray:
    """2-bin gradient histograms over ``cells`` samples around ``point``.

    Sampling is done on the smoothed level the point was detected on, at that
    octave's resolution, one sample per cell. Cell ``c`` covers sample
    ``index - cells/2 + c``. Bin 0 of a cell holds the weighted magnitude of a
    non-negative gradient, bin 1 that of a negative gradient; the weight is a
    Gaussian of std ``cells/2`` around the (sub-sample) keypoint position.
    """
    if cells < 2 or cells % 2:
        raise InvalidInputError("cells must be even and >= 2")
    octv = pyramid.octaves[point.octave]
    level = octv.smoothed[point.level]
    grad = compute_gradients(level)
    a = cells // 2
    center = point.position / octv.step
    idx = point.index - a + np.arange(cells)
    inside = (idx >= 0) & (idx < level.size)
    g = np.zeros(cells)
    g[inside] = grad[idx[inside]]
    w = np.exp(-0.5 * ((idx - center) / a) ** 2)
    mag = w * np.abs(g)
    desc = np.zeros(2 * cells)
    neg = g < 0
    desc[0::2] = np.where(neg, 0.0, mag)
    desc[1::2] = np.where(neg, mag, 0.0)
    if normalize:
        norm = math.sqrt(float(np.dot(desc, desc)))
        if norm > 0:
            desc /= norm
    return desc


def scope_mean(point: SalientPoint, pyramid: ScaleSpacePyramid) -> float:
    """Mean of the detection level over the point's scope (octave sample grid)."""
    octv = pyramid.octaves[point.octave]
    level = octv.smoothed[point.level]
    a = math.ceil(point.scope_start / octv.step - 1e-9)
    b = math.floor(point.scope_end / octv.step + 1e-9)
    a = max(0, min(a, point.index))
    b = min(level.size - 1, max(b, point.index))
    return float(level[a:b + 1].mean())


def extract_features(series, params: FeatureParams | None = None,
                     series_id=None) -> list[SalientFeature]:
    """Detect keypoints and describe them; ordered by position, then sigma."""
    params = params or FeatureParams()
    x = as_series(series)
    if x.size < MIN_SERIES_LENGTH:
        raise InvalidInputError(
            f"series length {x.size} < {MIN_SERIES_LENGTH} required for extraction")
    pyr = build_pyramid(x, params.num_octaves, params.levels, params.base_sigma)
    floor = magnitude_floor(pyr, params.floor_fraction)
    points = detect_keypoints(pyr, params.epsilon, floor=floor)
    return [
        SalientFeature(
            point=p,
            descriptor=build_descriptor(p, pyr, params.cells, params.normalize),
            amplitude=scope_mean(p, pyr),
            series_id=series_id,
        )
        for p in points
    ]
