"""Pure-Python kernels, used when the compiled ``_core`` extension is unavailable.

Same signatures and results as ``_core.pyx``; only speed differs.
"""

from bisect import bisect_left, bisect_right
from math import inf

import numpy as np

_DIAG, _UP, _LEFT = 1, 2, 3


def _delta_fn(kind):
    if kind == 0:
        return lambda a, b: abs(a - b)
    return lambda a, b: (a - b) * (a - b)


def _pick(c_diag, c_up, c_left):
    if c_diag <= c_up and c_diag <= c_left:
        return c_diag, _DIAG
    if c_up <= c_left:
        return c_up, _UP
    return c_left, _LEFT


def _trace(step_at, n, m):
    i, j = n - 1, m - 1
    pi, pj = [i], [j]
    while i or j:
        s = step_at(i, j)
        if s == _DIAG:
            i -= 1
            j -= 1
        elif s == _UP:
            i -= 1
        else:
            j -= 1
        pi.append(i)
        pj.append(j)
    return np.array(pi[::-1], dtype=np.intp), np.array(pj[::-1], dtype=np.intp)


def dtw_full(x, y, kind, with_path):
    xs, ys = x.tolist(), y.tolist()
    n, m = len(xs), len(ys)
    delta = _delta_fn(kind)
    cost = [[0.0] * m for _ in range(n)]
    steps = [[0] * m for _ in range(n)]
    for i in range(n):
        xi = xs[i]
        row = cost[i]
        prev = cost[i - 1] if i else None
        for j in range(m):
            if i == 0 and j == 0:
                row[0] = delta(xi, ys[0])
                continue
            c_diag = prev[j - 1] if (i and j) else inf
            c_up = prev[j] if i else inf
            c_left = row[j - 1] if j else inf
            best, step = _pick(c_diag, c_up, c_left)
            row[j] = best + delta(xi, ys[j])
            steps[i][j] = step
    distance = cost[n - 1][m - 1]
    if not with_path:
        return distance, None, None
    pi, pj = _trace(lambda i, j: steps[i][j], n, m)
    return distance, pi, pj


def dtw_banded(x, y, lo, hi, kind, with_path):
    xs, ys = x.tolist(), y.tolist()
    lo, hi = lo.tolist(), hi.tolist()
    n, m = len(xs), len(ys)
    delta = _delta_fn(kind)
    rows = []
    steps = []
    for i in range(n):
        a, b = lo[i], hi[i]
        row = [0.0] * (b - a + 1)
        srow = [0] * (b - a + 1)
        if i:
            prev, pa, pb = rows[i - 1], lo[i - 1], hi[i - 1]
        for j in range(a, b + 1):
            if i == 0 and j == 0:
                row[0] = delta(xs[0], ys[0])
                continue
            c_diag = c_up = c_left = inf
            if i:
                if pa <= j - 1 <= pb:
                    c_diag = prev[j - 1 - pa]
                if pa <= j <= pb:
                    c_up = prev[j - pa]
            if j > a:
                c_left = row[j - 1 - a]
            best, step = _pick(c_diag, c_up, c_left)
            row[j - a] = best + delta(xs[i], ys[j])
            srow[j - a] = step
        rows.append(row)
        steps.append(srow)
    cells = sum(h - l + 1 for l, h in zip(lo, hi))
    distance = rows[n - 1][-1]
    if not with_path:
        return distance, None, None, cells
    pi, pj = _trace(lambda i, j: steps[i][j - lo[i]], n, m)
    return distance, pi, pj, cells


def _slot(xs, ys, vx, vy):
    lo = max(bisect_left(xs, vx), bisect_left(ys, vy))
    hi = min(bisect_right(xs, vx), bisect_right(ys, vy))
    return lo if lo <= hi else -1


def prune_ranked(st1, end1, st2, end2):
    xs, ys = [], []
    keep = np.zeros(len(st1), dtype=bool)
    for k, (a1, b1, a2, b2) in enumerate(zip(st1.tolist(), end1.tolist(),
                                             st2.tolist(), end2.tolist())):
        r = _slot(xs, ys, a1, a2)
        if r < 0:
            continue
        xs.insert(r, a1)
        ys.insert(r, a2)
        r2 = _slot(xs, ys, b1, b2)
        if r2 < 0:
            del xs[r], ys[r]
            continue
        xs.insert(r2, b1)
        ys.insert(r2, b2)
        keep[k] = True
    return keep, np.array(xs, dtype=np.float64), np.array(ys, dtype=np.float64)


def dominant_pairs(amp_x, sig_x, desc_x, amp_y, sig_y, desc_y, tau_a, tau_s, tau_d):
    nx, ny = amp_x.size, amp_y.size
    ok = np.abs(amp_x[:, None] - amp_y[None, :]) <= tau_a
    ratio = sig_x[:, None] / sig_y[None, :]
    ok &= np.maximum(ratio, 1.0 / ratio) <= tau_s
    diff = desc_x[:, None, :] - desc_y[None, :, :]
    sq = np.where(ok, (diff * diff).sum(2), np.inf)
    n_ok = ok.sum(1)
    rows = np.arange(nx)
    best = np.argmin(sq, axis=1)   # first index among ties
    d1 = sq[rows, best]
    rest = sq.copy()
    rest[rows, best] = np.inf
    d2 = rest.min(1) if ny > 1 else np.full(nx, np.inf)
    d1, d2 = np.sqrt(d1), np.sqrt(d2)
    emit = (n_ok >= 1) & (d1 * tau_d <= d2)
    return rows[emit], best[emit].astype(np.intp), d1[emit]


def band_rows(n, m, cuts_x, cuts_y, adaptive_core, width_mode, width_fraction,
              lower_bound_fraction, radius):
    from .banding import (BandMask, bridge_gaps, candidate_points, diagonal_core,
                          interval_of, round_half_up)

    rows = np.arange(n)
    if adaptive_core:
        from .banding import IntervalPartition
        core = candidate_points(rows, IntervalPartition(cuts_x, cuts_y), m)
    else:
        core = diagonal_core(n, m)
    if width_mode == 0:
        w = min(max(1, int(round_half_up(width_fraction * m))), m)
        # window of w columns around the core's run up to the next core
        seg_hi = np.maximum(core, np.append(core[1:] - 1, core[-1]))
        lo = np.maximum(np.minimum(core - (w - 1) // 2, m - w), 0)
        hi = np.minimum(np.maximum(seg_hi + w // 2, lo + w - 1), m - 1)
    else:
        widths = np.diff(cuts_y).astype(np.float64)
        k = interval_of(cuts_y, core)
        if width_mode == 2:
            csum = np.concatenate([[0.0], np.cumsum(widths)])
            a = np.maximum(k - radius, 0)
            b = np.minimum(k + radius + 1, widths.size)
            wf = (csum[b] - csum[a]) / (b - a)
        else:
            wf = np.maximum(widths[k], lower_bound_fraction * m)
        h = np.ceil(wf / 2.0 - 1e-9).astype(np.intp)
        lo = np.maximum(core - h, 0)
        hi = np.minimum(core + h, m - 1)
    band = bridge_gaps(BandMask(lo, hi, m))
    return band.lo, band.hi
