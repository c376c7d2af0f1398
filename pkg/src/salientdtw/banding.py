"""Interval partitions from consistent alignments, and DTW band masks built on them."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import BandInvariantError, InvalidInputError

MODES = ("fc.fw", "fc.aw", "ac.fw", "ac.aw", "ac2.aw")


def round_half_up(v):
    return np.floor(np.asarray(v, dtype=np.float64) + 0.5).astype(np.intp)


@dataclass(frozen=True, eq=False)
class IntervalPartition:
    """Corresponding cuts ``0 = c0 < ... < cp = N`` and ``0 = d0 < ... < dp = M``.

    Interval ``k`` is ``[c_k, c_{k+1})`` on X and ``[d_k, d_{k+1})`` on Y.
    Hand-built partitions may repeat a cut (an empty interval); the
    partitions produced by :func:`derive_partition` never do.
    """
    cuts_x: np.ndarray
    cuts_y: np.ndarray

    def __post_init__(self):
        cx = np.asarray(self.cuts_x, dtype=np.intp)
        cy = np.asarray(self.cuts_y, dtype=np.intp)
        if cx.ndim != 1 or cx.shape != cy.shape or cx.size < 2:
            raise InvalidInputError("cut lists must be 1D, equal length, >= 2 cuts")
        if cx[0] != 0 or cy[0] != 0:
            raise InvalidInputError("first cut must be 0")
        if np.any(np.diff(cx) < 0) or np.any(np.diff(cy) < 0):
            raise InvalidInputError("cuts must be non-decreasing")
        object.__setattr__(self, "cuts_x", cx)
        object.__setattr__(self, "cuts_y", cy)

    @property
    def n(self) -> int:
        return int(self.cuts_x[-1])

    @property
    def m(self) -> int:
        return int(self.cuts_y[-1])

    def __len__(self):
        return self.cuts_x.size - 1

    def __eq__(self, other):
        return (isinstance(other, IntervalPartition)
                and np.array_equal(self.cuts_x, other.cuts_x)
                and np.array_equal(self.cuts_y, other.cuts_y))


def partition_cuts(boundary_list_1, boundary_list_2, n: int, m: int):
    """Cut arrays ``(cuts_x, cuts_y)`` for two time-ordered boundary lists.

    The k-th boundary of each list pairs up. Boundaries are rounded to the
    nearest sample; a pair that would not strictly advance on both series, or
    that lands on a series end, is dropped on both, so the cut counts stay
    equal and the last cut is always ``(n, m)``.
    """
    b1 = np.floor(np.asarray(boundary_list_1, dtype=np.float64) + 0.5).tolist()
    b2 = np.floor(np.asarray(boundary_list_2, dtype=np.float64) + 0.5).tolist()
    cx, cy = [0], [0]
    px = py = 0
    for u, v in zip(b1, b2):
        if px < u < n and py < v < m:
            px, py = int(u), int(v)
            cx.append(px)
            cy.append(py)
    cx.append(n)
    cy.append(m)
    return np.array(cx, dtype=np.intp), np.array(cy, dtype=np.intp)


def derive_partition(alignment, n: int, m: int) -> IntervalPartition:
    """Cut both series at the committed scope boundaries (see :func:`partition_cuts`)."""
    return IntervalPartition(*partition_cuts(alignment.boundary_list_1,
                                             alignment.boundary_list_2, n, m))


def interval_of(cuts, v):
    """Index k of the interval [cuts[k], cuts[k+1]) holding ``v``; empty intervals skipped."""
    k = np.searchsorted(cuts, v, side="right") - 1
    return np.clip(k, 0, cuts.size - 2)


def candidate_points(rows, partition: IntervalPartition, m: int | None = None) -> np.ndarray:
    """Vectorized :func:`candidate_point` for an array of X indices.

    The last interval is mapped end-inclusive, ``[c, N-1] -> [d, M-1]``, so
    the final row lands on the corner and a single-interval partition gives
    exactly the stretched diagonal.
    """
    m = partition.m if m is None else m
    n = partition.n
    i = np.asarray(rows, dtype=np.intp)
    cx, cy = partition.cuts_x, partition.cuts_y
    k = interval_of(cx, i)
    last = k == cx.size - 2
    sx, sy = cx[k], cy[k]
    span_x = np.where(last, n - 1 - sx, cx[k + 1] - sx)
    span_y = np.where(last, m - 1 - sy, cy[k + 1] - sy)
    safe = np.where(span_x > 0, span_x, 1)
    j = sy + round_half_up((i - sx) * span_y / safe)
    # empty X interval: the lone X point goes to the midpoint of its Y interval
    j = np.where(span_x > 0, j, sy + round_half_up(span_y / 2.0))
    j = np.where(span_y > 0, j, sy)
    return np.minimum(np.maximum(j, 0), m - 1)


def candidate_point(i: int, partition: IntervalPartition) -> int:
    """Y index proportionally matched to X index ``i`` within its interval."""
    if not 0 <= i < partition.n:
        raise InvalidInputError(f"row {i} outside [0, {partition.n - 1}]")
    return int(candidate_points([i], partition)[0])


def diagonal_core(n: int, m: int) -> np.ndarray:
    i = np.arange(n)
    if n == 1:
        return np.zeros(1, dtype=np.intp)
    return round_half_up(i * (m - 1) / (n - 1))


@dataclass(frozen=True)
class BandSpec:
    mode: str
    width_fraction: float | None = None
    width_lower_bound_fraction: float = 0.20
    neighbor_radius: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInputError(f"unknown band mode {self.mode!r}")
        if self.mode.endswith(".fw"):
            if self.width_fraction is None or not 0 < self.width_fraction <= 1:
                raise InvalidInputError("fixed-width modes need width_fraction in (0, 1]")
        if not 0 <= self.width_lower_bound_fraction <= 1:
            raise InvalidInputError("width_lower_bound_fraction must be in [0, 1]")
        if self.neighbor_radius < 0:
            raise InvalidInputError("neighbor_radius must be >= 0")

    @property
    def adaptive_core(self) -> bool:
        return self.mode.startswith("ac")

    @property
    def name(self) -> str:
        if self.mode.endswith(".fw"):
            return f"{self.mode}@{self.width_fraction * 100:g}%"
        return self.mode


_APPROACH = re.compile(r"^(fc\.fw|ac\.fw|fc\.aw|ac\.aw|ac2\.aw)(?:@([0-9.]+)%?)?$")


def parse_approach(name: str, width_lower_bound_fraction: float = 0.20,
                   neighbor_radius: int = 1):
    """``"dtw"`` -> None; ``"ac.fw@10%"`` -> BandSpec; widths are percentages."""
    name = name.strip()
    if name == "dtw":
        return None
    mt = _APPROACH.match(name)
    if not mt:
        raise InvalidInputError(f"unknown approach {name!r}")
    mode, width = mt.groups()
    if mode.endswith(".fw"):
        if width is None:
            raise InvalidInputError(f"{mode} needs a width, e.g. {mode}@10%")
        return BandSpec(mode, float(width) / 100.0)
    if width is not None:
        raise InvalidInputError(f"{mode} takes no width")
    return BandSpec(mode, None, width_lower_bound_fraction, neighbor_radius)


@dataclass(frozen=True, eq=False)
class BandMask:
    """Per-row inclusive column ranges ``[lo[i], hi[i]]`` of an N x M DTW grid."""
    lo: np.ndarray
    hi: np.ndarray
    n_cols: int

    def __post_init__(self):
        lo = np.ascontiguousarray(self.lo, dtype=np.intp)
        hi = np.ascontiguousarray(self.hi, dtype=np.intp)
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size == 0:
            raise InvalidInputError("lo/hi must be equal-length, non-empty 1D arrays")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def n_rows(self) -> int:
        return self.lo.size

    @property
    def shape(self):
        return self.n_rows, self.n_cols

    @property
    def cells(self) -> int:
        return int((self.hi - self.lo + 1).sum())

    @classmethod
    def full(cls, n, m):
        return cls(np.zeros(n), np.full(n, m - 1), m)

    def violations(self) -> list[str]:
        lo, hi, m = self.lo, self.hi, self.n_cols
        out = []
        if np.any(lo < 0) or np.any(hi > m - 1):
            out.append("column bounds outside [0, M-1]")
        if np.any(lo > hi):
            out.append("empty row (lo > hi)")
        if np.any(np.diff(lo) < 0) or np.any(np.diff(hi) < 0):
            out.append("lo/hi not non-decreasing")
        if lo[0] != 0 or hi[-1] != m - 1:
            out.append("corner cell not admissible")
        if np.any(lo[1:] > hi[:-1] + 1):
            out.append("rows not connected (lo[i+1] > hi[i] + 1)")
        return out

    def is_valid(self) -> bool:
        return not self.violations()

    def validate(self):
        bad = self.violations()
        if bad:
            raise BandInvariantError("invalid band: " + "; ".join(bad))
        return self

    def contains(self, other: "BandMask") -> bool:
        return (self.shape == other.shape and bool(np.all(self.lo <= other.lo))
                and bool(np.all(self.hi >= other.hi)))

    def to_dense(self) -> np.ndarray:
        j = np.arange(self.n_cols)
        return (j[None, :] >= self.lo[:, None]) & (j[None, :] <= self.hi[:, None])

    def transpose(self) -> "BandMask":
        """Column view of a valid band, as a band of the M x N grid."""
        self.validate()
        j = np.arange(self.n_cols)
        lo_t = np.searchsorted(self.hi, j, side="left")
        hi_t = np.searchsorted(self.lo, j, side="right") - 1
        return BandMask(lo_t, hi_t, self.n_rows)

    def dump(self) -> str:
        return "".join(f"{i} {a} {b}\n" for i, (a, b) in
                       enumerate(zip(self.lo.tolist(), self.hi.tolist())))

    def __eq__(self, other):
        return (isinstance(other, BandMask) and self.n_cols == other.n_cols
                and np.array_equal(self.lo, other.lo)
                and np.array_equal(self.hi, other.hi))


def bridge_gaps(band: BandMask) -> BandMask:
    """Smallest enlargement (under a fixed tie-break) that makes ``band`` valid.

    Corners are added, ``lo`` is lowered to its suffix minimum and ``hi``
    raised to its prefix maximum, then a row that starts past the end of the
    previous row is widened back to ``hi[i-1] + 1``.
    """
    m = band.n_cols
    lo = np.clip(band.lo, 0, m - 1)
    hi = np.clip(band.hi, 0, m - 1)
    lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
    lo[0] = 0
    hi[-1] = m - 1
    lo = np.minimum.accumulate(lo[::-1])[::-1]
    hi = np.maximum.accumulate(hi)
    lo[1:] = np.minimum(lo[1:], hi[:-1] + 1)
    return BandMask(lo, hi, m)


def _width_mode(spec: BandSpec) -> int:
    return 0 if spec.mode.endswith(".fw") else (2 if spec.mode == "ac2.aw" else 1)


def band_from_cuts(cuts_x, cuts_y, spec: BandSpec, n: int, m: int) -> BandMask:
    """:func:`build_band` on raw, already valid cut arrays."""
    lo, hi = _kernels.band_rows(n, m, cuts_x, cuts_y, spec.adaptive_core,
                                _width_mode(spec), float(spec.width_fraction or 0.0),
                                float(spec.width_lower_bound_fraction),
                                int(spec.neighbor_radius))
    return BandMask(lo, hi, m)


def build_band(partition: IntervalPartition | None, spec: BandSpec, n: int,
               m: int) -> BandMask:
    """Band of ``spec`` around the diagonal or the partition-driven core.

    Fixed-width rows hold ``W = round(width_fraction * M)`` columns centered
    on the core (slid to stay inside the grid), stretched on the right to
    cover the run of columns up to the next row's core, so the band is
    connected before any bridging and grows monotonically with ``W``. Adaptive-width rows span
    ``core +/- ceil(w / 2)``, clipped, with ``w`` taken from the Y interval
    holding the core. A missing partition means the single interval
    ``[0, N) <-> [0, M)``.
    """
    if partition is None:
        partition = IntervalPartition(np.array([0, n]), np.array([0, m]))
    if partition.n != n or partition.m != m:
        raise InvalidInputError("partition does not match the grid size")
    return band_from_cuts(partition.cuts_x, partition.cuts_y, spec, n, m)


def symmetrize(band_xy: BandMask, band_yx: BandMask) -> BandMask:
    """Union of ``band_xy`` with the transpose of the role-swapped band.

    For valid inputs the row-wise hull of the two is already valid and is
    also column-convex, so swapping the roles yields exactly the transpose.
    """
    if band_yx.shape != (band_xy.n_cols, band_xy.n_rows):
        raise InvalidInputError(
            f"role-swapped band has shape {band_yx.shape}, expected "
            f"{(band_xy.n_cols, band_xy.n_rows)}")
    a = bridge_gaps(band_xy)
    b = bridge_gaps(band_yx).transpose()
    return bridge_gaps(BandMask(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi),
                                a.n_cols))
