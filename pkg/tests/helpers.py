import numpy as np

from salientdtw.descriptor import SalientFeature
from salientdtw.scale_space import SalientPoint


def feature(position, sigma=2.0, amplitude=0.0, descriptor=(0.0, 0.0),
            scope=None, series_id=None):
    """Hand-built feature; the scope defaults to position -/+ 3 sigma."""
    st, en = scope if scope is not None else (position - 3 * sigma, position + 3 * sigma)
    pt = SalientPoint(float(position), float(sigma), 0, 1, 1.0, float(st), float(en),
                      int(round(position)))
    return SalientFeature(pt, np.asarray(descriptor, dtype=float), float(amplitude),
                          series_id)


def bumps(length, centers, sigmas, amps=None):
    t = np.arange(length, dtype=float)
    amps = amps or [1.0] * len(centers)
    return sum(a * np.exp(-0.5 * ((t - c) / s) ** 2)
               for c, s, a in zip(centers, sigmas, amps))


def rich_series(rng, length=256, k=5):
    """Random bump series with well-separated, interior features."""
    centers = np.sort(rng.choice(np.arange(40, length - 40, 24), size=k, replace=False))
    sigmas = rng.uniform(2.0, 5.0, k)
    amps = list(rng.uniform(0.5, 1.5, k) * rng.choice([-1.0, 1.0], k))
    return bumps(length, centers, sigmas, amps)
