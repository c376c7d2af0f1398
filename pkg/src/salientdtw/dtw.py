"""Full and band-constrained DTW, and the salient-feature constrained pipeline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .banding import BandMask, BandSpec, band_from_cuts, partition_cuts, symmetrize
from .errors import BandInvariantError, InvalidInputError
from .matching import boundary_lists
from .scale_space import as_series

_KINDS = {"absolute": 0, "squared": 1}


@dataclass(frozen=True, eq=False)
class WarpResult:
    distance: float
    path: np.ndarray | None   # (K, 2) int array of (i, j); None when not requested
    cells_filled: int

    def path_cost(self, x, y, delta="absolute") -> float:
        d = np.asarray(x)[self.path[:, 0]] - np.asarray(y)[self.path[:, 1]]
        return float(np.abs(d).sum() if delta == "absolute" else (d * d).sum())


def _kind(delta) -> int:
    try:
        return _KINDS[delta]
    except KeyError:
        raise InvalidInputError(f"delta must be one of {sorted(_KINDS)}") from None


def element_distance(a, b, delta="absolute"):
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    return np.abs(d) if _kind(delta) == 0 else d * d


def full_dtw(x, y, delta="absolute", with_path=True) -> WarpResult:
    """DTW over the complete grid; backtracking prefers diagonal, then up, then left."""
    x = as_series(x, "x")
    y = as_series(y, "y")
    dist, pi, pj = _kernels.dtw_full(x, y, _kind(delta), with_path)
    path = np.stack([pi, pj], axis=1) if with_path else None
    return WarpResult(float(dist), path, x.size * y.size)


def banded_dtw(x, y, band: BandMask, delta="absolute", with_path=True) -> WarpResult:
    """DTW restricted to the admissible cells of a valid ``band``."""
    x = as_series(x, "x")
    y = as_series(y, "y")
    if band.shape != (x.size, y.size):
        raise InvalidInputError(f"band shape {band.shape} != grid {(x.size, y.size)}")
    bad = band.violations()
    if bad:
        raise BandInvariantError("invalid band (bridge gaps first): " + "; ".join(bad))
    dist, pi, pj, cells = _kernels.dtw_banded(x, y, band.lo, band.hi, _kind(delta),
                                              with_path)
    path = np.stack([pi, pj], axis=1) if with_path else None
    return WarpResult(float(dist), path, int(cells))


def _one_way(x, y, feats_x, feats_y, spec, match_kw) -> BandMask:
    n, m = len(x), len(y)
    if spec.mode == "fc.fw":
        # fixed core and width ignore the alignment
        return band_from_cuts(np.array([0, n]), np.array([0, m]), spec, n, m)
    b1, b2 = boundary_lists(feats_x, feats_y, amplitude_range=float(np.ptp(x)),
                            **match_kw)
    cx, cy = partition_cuts(b1, b2, n, m)
    return band_from_cuts(cx, cy, spec, n, m)


def constraint_band(x, y, feats_x, feats_y, spec: BandSpec, symmetric=False,
                    tau_a=None, tau_s=4.0, tau_d=1.5, tau_a_fraction=0.25) -> BandMask:
    """Matching -> pruning -> partition -> band (-> symmetrized band)."""
    kw = dict(tau_a=tau_a, tau_s=tau_s, tau_d=tau_d, tau_a_fraction=tau_a_fraction)
    band = _one_way(x, y, feats_x, feats_y, spec, kw)
    if symmetric:
        band = symmetrize(band, _one_way(y, x, feats_y, feats_x, spec, kw))
    return band


def sdtw_distance(x, y, feats_x, feats_y, spec: BandSpec | None, symmetric=False,
                  delta="absolute", with_path=True, **match_kw) -> WarpResult:
    """Constrained DTW of ``x`` and ``y`` using their pre-extracted features.

    ``spec=None`` runs full DTW. ``match_kw`` forwards ``tau_a``, ``tau_s``,
    ``tau_d`` and ``tau_a_fraction`` to the matcher.
    """
    x = as_series(x, "x")
    y = as_series(y, "y")
    if spec is None:
        return full_dtw(x, y, delta, with_path)
    band = constraint_band(x, y, feats_x, feats_y, spec, symmetric, **match_kw)
    return banded_dtw(x, y, band, delta, with_path)
