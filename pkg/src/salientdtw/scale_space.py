"""Gaussian / difference-of-Gaussian scale space of a 1D series and keypoint detection."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import InvalidInputError

NOISE_RELATIVE = 1e-12
MIN_OCTAVE_LENGTH = 4
MIN_SERIES_LENGTH = 8


def as_series(values, name="series") -> np.ndarray:
    """Validate ``values`` as a non-empty, finite, 1D float64 array."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1D sequence")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or Inf")
    return np.ascontiguousarray(arr)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled Gaussian truncated at ``ceil(3 sigma)`` and normalized to unit sum."""
    if sigma == 0:
        return np.ones(1)
    radius = max(1, math.ceil(3.0 * sigma))
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (t / sigma) ** 2)
    return k / k.sum()


def gaussian_smooth(series, sigma: float) -> np.ndarray:
    """Convolve ``series`` with the normalized truncated Gaussian of std ``sigma``.

    Edges are handled by reflection (``d c b a | a b c d | d c b a``), so the
    output has the same length as the input. ``sigma == 0`` returns a copy.
    """
    x = as_series(series)
    if not math.isfinite(sigma) or sigma < 0:
        raise InvalidInputError(f"sigma must be finite and >= 0, got {sigma!r}")
    if sigma == 0:
        return x.copy()
    return correlate1d(x, gaussian_kernel(sigma), mode="reflect")


@dataclass(frozen=True)
class Octave:
    index: int
    smoothed: tuple   # s + 3 arrays, increasing blur
    dog: tuple        # s + 2 arrays, dog[k] = smoothed[k + 1] - smoothed[k]
    sigmas: tuple     # blur of smoothed[k], in this octave's sample units

    @property
    def length(self) -> int:
        return self.smoothed[0].size

    @property
    def step(self) -> int:
        """Original-series samples per sample of this octave."""
        return 2 ** self.index


@dataclass(frozen=True)
class ScaleSpacePyramid:
    octaves: tuple
    kappa: float
    base_sigma: float
    levels: int
    series_length: int


def default_octaves(n: int) -> int:
    return max(1, int(math.floor(math.log2(n))) - 6)


def build_pyramid(series, num_octaves: int | None = None, s: int = 2,
                  base_sigma: float = 1.6) -> ScaleSpacePyramid:
    """Build ``num_octaves`` octaves of ``s`` scale levels each.

    Each level is computed by a single smoothing of the octave's base series
    with the cumulative relative blur, rather than by chaining small kernels,
    so every level equals ``gaussian_smooth(base, sigma_rel)`` exactly. The
    next octave starts from the level whose blur doubled, keeping every
    second sample. Octaves that would be shorter than 4 samples are dropped
    with a warning.
    """
    x = as_series(series)
    if s < 1:
        raise InvalidInputError("s must be >= 1")
    if x.size < MIN_SERIES_LENGTH:
        raise InvalidInputError(
            f"series length {x.size} < {MIN_SERIES_LENGTH} required for a pyramid")
    if num_octaves is None:
        num_octaves = default_octaves(x.size)
    if num_octaves < 1:
        raise InvalidInputError("num_octaves must be >= 1")
    if base_sigma <= 0:
        raise InvalidInputError("base_sigma must be > 0")

    kappa = 2.0 ** (1.0 / s)
    sigmas = tuple(base_sigma * kappa ** k for k in range(s + 3))

    octaves = []
    base = gaussian_smooth(x, base_sigma)
    for t in range(num_octaves):
        if base.size < MIN_OCTAVE_LENGTH:
            warnings.warn(
                f"octave count truncated to {t}: octave {t} would have "
                f"{base.size} < {MIN_OCTAVE_LENGTH} samples", stacklevel=2)
            break
        smoothed = [base]
        for sig in sigmas[1:]:
            rel = math.sqrt(sig * sig - base_sigma * base_sigma)
            smoothed.append(gaussian_smooth(base, rel))
        dog = [smoothed[k + 1] - smoothed[k] for k in range(s + 2)]
        octaves.append(Octave(t, tuple(smoothed), tuple(dog), sigmas))
        base = smoothed[s][::2].copy()
    return ScaleSpacePyramid(tuple(octaves), kappa, base_sigma, s, x.size)


@dataclass(frozen=True)
class SalientPoint:
    position: float
    sigma: float
    octave: int
    level: int
    dog_value: float
    scope_start: float
    scope_end: float
    index: int = 0   # integer sample index within the octave

    @property
    def scope(self) -> float:
        return self.scope_end - self.scope_start


def _candidates(below, here, above, epsilon, floor):
    """Boolean mask over interior indices of ``here`` passing the relaxed test.

    A positive value must be >= (1 - eps) * each neighbor, a negative one
    <= (1 - eps) * each neighbor; both are ``sign * v >= (1 - eps) * sign * n``.
    """
    c = here[1:-1]
    sgn = np.sign(c)
    lhs = sgn * c
    f = 1.0 - epsilon
    ok = (lhs > floor)
    for arr in (below, here, above):
        for off in (0, 1, 2):
            if arr is here and off == 1:
                continue
            nb = arr[off:off + c.size]
            ok &= lhs >= f * sgn * nb
    return ok


def magnitude_floor(pyramid: ScaleSpacePyramid, fraction: float = 1e-6,
                    amplitude_range: float | None = None) -> float:
    """``fraction * amplitude_range``, never below the rounding noise of smoothing.

    The range defaults to that of the first smoothed level. The noise term
    (``NOISE_RELATIVE`` times the largest magnitude) keeps round-off ripples
    on flat input from passing as extrema.
    """
    first = pyramid.octaves[0].smoothed[0]
    if amplitude_range is None:
        amplitude_range = float(first.max() - first.min())
    return max(fraction * amplitude_range, NOISE_RELATIVE * float(np.abs(first).max()))


def detect_keypoints(pyramid: ScaleSpacePyramid, epsilon: float = 0.0096,
                     floor: float | None = None,
                     amplitude_range: float | None = None) -> list[SalientPoint]:
    """Relaxed scale-space extrema of the DoG levels, in original coordinates.

    ``floor`` is the minimum |D| a keypoint must strictly exceed; by default
    :func:`magnitude_floor` with fraction 1e-6. Result is sorted by
    position, then sigma.
    """
    if not 0 <= epsilon < 1:
        raise InvalidInputError("epsilon must be in [0, 1)")
    if floor is None:
        floor = magnitude_floor(pyramid, 1e-6, amplitude_range)
    n = pyramid.series_length
    points = []
    for octv in pyramid.octaves:
        if octv.length < 3:
            continue
        step = octv.step
        for lev in range(1, pyramid.levels + 1):
            below, here, above = octv.dog[lev - 1], octv.dog[lev], octv.dog[lev + 1]
            mask = _candidates(below, here, above, epsilon, floor)
            for idx in np.flatnonzero(mask) + 1:
                d0, d1, d2 = here[idx - 1], here[idx], here[idx + 1]
                denom = d0 - 2.0 * d1 + d2
                off = 0.5 * (d0 - d2) / denom if denom != 0 else 0.0
                off = min(0.5, max(-0.5, off))
                pos = (idx + off) * step
                sig = octv.sigmas[lev] * step
                points.append(SalientPoint(
                    position=float(pos),
                    sigma=float(sig),
                    octave=octv.index,
                    level=lev,
                    dog_value=float(d1),
                    scope_start=float(max(0.0, pos - 3.0 * sig)),
                    scope_end=float(min(n - 1.0, pos + 3.0 * sig)),
                    index=int(idx),
                ))
    points.sort(key=lambda p: (p.position, p.sigma))
    return points
