"""Cross-series feature matching, pair scoring, and rank-consistency pruning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .descriptor import FeatureSet, as_feature_set
from .errors import InvalidInputError

EPS_DIV = 1e-12


@dataclass(frozen=True, eq=False)
class MatchPair:
    f1: object
    f2: object
    desc_distance: float
    mu_align: float = 0.0
    mu_sim: float = 0.0
    mu_comb: float = 0.0
    ns_align: float = 0.0
    ns_sim: float = 0.0

    def key(self):
        return (self.f1.position, self.f2.position, self.desc_distance,
                self.mu_align, self.mu_sim, self.mu_comb)


@dataclass(frozen=True, eq=False)
class ConsistentAlignment:
    pairs: tuple
    boundary_list_1: np.ndarray
    boundary_list_2: np.ndarray

    @classmethod
    def empty(cls):
        return cls((), np.empty(0), np.empty(0))

    def __len__(self):
        return len(self.pairs)


def _check_thresholds(tau_a, tau_s, tau_d):
    if not tau_a > 0:
        raise InvalidInputError("tau_a must be > 0")
    if tau_s < 1:
        raise InvalidInputError("tau_s must be >= 1")
    if not tau_d > 1:
        raise InvalidInputError("tau_d must be > 1")


def dominant_indices(fx: FeatureSet, fy: FeatureSet, tau_a, tau_s, tau_d):
    """Array form of :func:`find_dominant_pairs`: ``(ix, iy, distance)``.

    Ties for the nearest candidate go to the lower index.
    """
    _check_thresholds(tau_a, tau_s, tau_d)
    if not len(fx) or not len(fy):
        return np.empty(0, np.intp), np.empty(0, np.intp), np.empty(0)
    return _kernels.dominant_pairs(fx.amplitude, fx.sigma, fx.descriptors,
                                   fy.amplitude, fy.sigma, fy.descriptors,
                                   float(tau_a), float(tau_s), float(tau_d))


def find_dominant_pairs(feats_x, feats_y, tau_a: float, tau_s: float = 4.0,
                        tau_d: float = 1.5) -> list[MatchPair]:
    """Ratio-test nearest neighbors among amplitude/scale-compatible candidates.

    For each feature of ``feats_x`` the candidates in ``feats_y`` are those
    with ``|amp diff| <= tau_a`` and scale ratio ``<= tau_s``. The nearest
    candidate by Euclidean descriptor distance ``d*`` is kept only when every
    other candidate lies at distance ``>= tau_d * d*``.
    """
    fx, fy = as_feature_set(feats_x), as_feature_set(feats_y)
    ix, iy, dist = dominant_indices(fx, fy, tau_a, tau_s, tau_d)
    return [MatchPair(fx[i], fy[j], d)
            for i, j, d in zip(ix.tolist(), iy.tolist(), dist.tolist())]


def pair_scores(st1, en1, st2, en2, c1, c2, a1, a2, dist):
    """Score arrays ``(mu_align, mu_sim, mu_comb, ns_align, ns_sim)`` for a pair set."""
    mu_align = ((en1 - st1) + (en2 - st2)) / 2.0 / (1.0 + np.abs(c1 - c2))
    mu_desc = 1.0 / (1.0 + dist)
    d_amp = np.abs(a1 - a2) / np.maximum(np.maximum(np.abs(a1), np.abs(a2)), EPS_DIV)
    d_amp = np.minimum(d_amp, 1.0)
    mu_sim = mu_desc / mu_desc.min() * (1.0 - d_amp)
    ns_align = _normalize(mu_align)
    ns_sim = _normalize(mu_sim)
    return mu_align, mu_sim, f_measure(ns_align, ns_sim), ns_align, ns_sim


def score_pairs(pairs) -> list[MatchPair]:
    """Fill alignment, similarity and combined (F-measure) scores."""
    if not pairs:
        return []
    cols = [np.array([getattr(p.f1.point, a) for p in pairs])
            for a in ("scope_start", "scope_end")]
    cols += [np.array([getattr(p.f2.point, a) for p in pairs])
             for a in ("scope_start", "scope_end")]
    cols += [np.array([p.f1.point.position for p in pairs]),
             np.array([p.f2.point.position for p in pairs]),
             np.array([p.f1.amplitude for p in pairs]),
             np.array([p.f2.amplitude for p in pairs]),
             np.array([p.desc_distance for p in pairs])]
    scores = pair_scores(*cols)
    return [
        MatchPair(p.f1, p.f2, p.desc_distance, *vals)
        for p, vals in zip(pairs, zip(*(a.tolist() for a in scores)))
    ]


def _normalize(v):
    top = v.max()
    return v / top if top > 0 else np.zeros_like(v)


def f_measure(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    s = a + b
    pos = s > 0
    return np.where(pos, 2.0 * a * b / np.where(pos, s, 1.0), 0.0)


def processing_order(pairs):
    """Descending mu_comb; ties by f1 position then f2 position."""
    return sorted(range(len(pairs)),
                  key=lambda k: (-pairs[k].mu_comb, pairs[k].f1.point.position,
                                 pairs[k].f2.point.position))


def prune_inconsistent(pairs) -> ConsistentAlignment:
    """Greedily commit pairs whose scope boundaries keep equal ranks on both series.

    Pairs are visited in :func:`processing_order`. A pair's start (then end)
    boundaries are tentatively inserted into the time-ordered boundary lists
    of both series; the insertion is kept only if some insertion rank is
    valid in both lists at once (equal time values may take any rank among
    their ties). A rejected pair leaves the lists untouched.
    """
    if not pairs:
        return ConsistentAlignment.empty()
    ordered = [pairs[k] for k in processing_order(pairs)]
    st1 = np.array([p.f1.point.scope_start for p in ordered])
    en1 = np.array([p.f1.point.scope_end for p in ordered])
    st2 = np.array([p.f2.point.scope_start for p in ordered])
    en2 = np.array([p.f2.point.scope_end for p in ordered])
    keep, b1, b2 = _kernels.prune_ranked(st1, en1, st2, en2)
    kept = tuple(p for p, k in zip(ordered, keep.tolist()) if k)
    return ConsistentAlignment(kept, b1, b2)


def _resolve_tau_a(tau_a, tau_a_fraction, amplitude_range):
    if tau_a is not None:
        return tau_a
    if amplitude_range is None:
        raise InvalidInputError("give tau_a or the query amplitude_range")
    return max(tau_a_fraction * amplitude_range, EPS_DIV)


def _ranked(fx, fy, tau_a, tau_s, tau_d):
    """Dominant pairs, their scores, processing order and the pruning outcome."""
    ix, iy, dist = dominant_indices(fx, fy, tau_a, tau_s, tau_d)
    if ix.size == 0:
        return None
    st1, en1 = fx.scope_start[ix], fx.scope_end[ix]
    st2, en2 = fy.scope_start[iy], fy.scope_end[iy]
    c1, c2 = fx.position[ix], fy.position[iy]
    scores = pair_scores(st1, en1, st2, en2, c1, c2, fx.amplitude[ix],
                         fy.amplitude[iy], dist)
    order = np.lexsort((c2, c1, -scores[2]))
    keep, b1, b2 = _kernels.prune_ranked(st1[order], en1[order], st2[order], en2[order])
    return ix, iy, dist, scores, order[keep], b1, b2


def boundary_lists(feats_x, feats_y, tau_a=None, tau_s=4.0, tau_d=1.5,
                   tau_a_fraction=0.25, amplitude_range=None):
    """Only the two time-ordered boundary lists of :func:`align`."""
    tau_a = _resolve_tau_a(tau_a, tau_a_fraction, amplitude_range)
    r = _ranked(as_feature_set(feats_x), as_feature_set(feats_y), tau_a, tau_s, tau_d)
    if r is None:
        return np.empty(0), np.empty(0)
    return r[5], r[6]


def align(feats_x, feats_y, tau_a=None, tau_s=4.0, tau_d=1.5,
          tau_a_fraction=0.25, amplitude_range=None) -> ConsistentAlignment:
    """Match, score and prune in one call, on stacked arrays.

    When ``tau_a`` is None it defaults to ``tau_a_fraction`` times the
    amplitude range of the query series (``amplitude_range``).
    """
    tau_a = _resolve_tau_a(tau_a, tau_a_fraction, amplitude_range)
    fx, fy = as_feature_set(feats_x), as_feature_set(feats_y)
    r = _ranked(fx, fy, tau_a, tau_s, tau_d)
    if r is None:
        return ConsistentAlignment.empty()
    ix, iy, dist, scores, sel, b1, b2 = r
    pairs = tuple(
        MatchPair(fx[i], fy[j], d, *vals)
        for i, j, d, vals in zip(ix[sel].tolist(), iy[sel].tolist(), dist[sel].tolist(),
                                 zip(*(a[sel].tolist() for a in scores)))
    )
    return ConsistentAlignment(pairs, b1, b2)
