# cython: language_level=3
"""Compiled kernels: DTW grid fills with backtracking, and rank-consistent pruning.

The signatures mirror :mod:`salientdtw._kernels_py` exactly; callers go through
:mod:`salientdtw._kernels`, which selects one of the two at import.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, floor, ceil, INFINITY

cnp.import_array()

# step codes stored per cell; 0 marks the origin
DEF STEP_NONE = 0
DEF STEP_DIAG = 1
DEF STEP_UP = 2     # from (i-1, j)
DEF STEP_LEFT = 3   # from (i, j-1)


cdef inline double _delta(double a, double b, int kind) nogil:
    cdef double d = a - b
    if kind == 0:
        return fabs(d)
    return d * d


def dtw_full(const double[::1] x, const double[::1] y, int kind, bint with_path):
    cdef Py_ssize_t n = x.shape[0], m = y.shape[0]
    cdef Py_ssize_t i, j
    cdef double best, c_diag, c_up, c_left
    cdef signed char step
    cdef cnp.ndarray[double, ndim=2] cost_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] cost = cost_arr
    cdef cnp.ndarray[signed char, ndim=2] steps_arr = np.zeros(
        (n if with_path else 1, m if with_path else 1), dtype=np.int8)
    cdef signed char[:, ::1] steps = steps_arr

    with nogil:
        for i in range(n):
            for j in range(m):
                if i == 0 and j == 0:
                    cost[0, 0] = _delta(x[0], y[0], kind)
                    continue
                c_diag = cost[i - 1, j - 1] if (i > 0 and j > 0) else INFINITY
                c_up = cost[i - 1, j] if i > 0 else INFINITY
                c_left = cost[i, j - 1] if j > 0 else INFINITY
                if c_diag <= c_up and c_diag <= c_left:
                    best = c_diag
                    step = STEP_DIAG
                elif c_up <= c_left:
                    best = c_up
                    step = STEP_UP
                else:
                    best = c_left
                    step = STEP_LEFT
                cost[i, j] = best + _delta(x[i], y[j], kind)
                if with_path:
                    steps[i, j] = step

    distance = cost[n - 1, m - 1]
    if not with_path:
        return distance, None, None
    return distance, *_trace_full(steps, n, m)


cdef tuple _trace_full(signed char[:, ::1] steps, Py_ssize_t n, Py_ssize_t m):
    cdef Py_ssize_t cap = n + m, k = 0
    cdef cnp.ndarray[cnp.intp_t, ndim=1] pi = np.empty(cap, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] pj = np.empty(cap, dtype=np.intp)
    cdef Py_ssize_t i = n - 1, j = m - 1
    cdef signed char s
    while True:
        pi[k] = i
        pj[k] = j
        k += 1
        if i == 0 and j == 0:
            break
        s = steps[i, j]
        if s == STEP_DIAG:
            i -= 1
            j -= 1
        elif s == STEP_UP:
            i -= 1
        else:
            j -= 1
    return pi[:k][::-1].copy(), pj[:k][::-1].copy()


def dtw_banded(const double[::1] x, const double[::1] y,
               const cnp.intp_t[::1] lo, const cnp.intp_t[::1] hi,
               int kind, bint with_path):
    cdef Py_ssize_t n = x.shape[0], m = y.shape[0]
    cdef Py_ssize_t i, j, base, pbase, plo, phi, total
    cdef double best, c_diag, c_up, c_left
    cdef signed char step
    cdef cnp.ndarray[cnp.intp_t, ndim=1] off_arr = np.empty(n + 1, dtype=np.intp)
    cdef cnp.intp_t[::1] off = off_arr

    off[0] = 0
    for i in range(n):
        off[i + 1] = off[i] + (hi[i] - lo[i] + 1)
    total = off[n]

    cdef cnp.ndarray[double, ndim=1] cost_arr = np.empty(total, dtype=np.float64)
    cdef double[::1] cost = cost_arr
    cdef cnp.ndarray[signed char, ndim=1] steps_arr = np.zeros(
        total if with_path else 1, dtype=np.int8)
    cdef signed char[::1] steps = steps_arr

    with nogil:
        for i in range(n):
            base = off[i] - lo[i]
            if i > 0:
                pbase = off[i - 1] - lo[i - 1]
                plo = lo[i - 1]
                phi = hi[i - 1]
            for j in range(lo[i], hi[i] + 1):
                if i == 0 and j == 0:
                    cost[base] = _delta(x[0], y[0], kind)
                    continue
                c_diag = INFINITY
                c_up = INFINITY
                c_left = INFINITY
                if i > 0:
                    if j - 1 >= plo and j - 1 <= phi:
                        c_diag = cost[pbase + j - 1]
                    if j >= plo and j <= phi:
                        c_up = cost[pbase + j]
                if j > lo[i]:
                    c_left = cost[base + j - 1]
                if c_diag <= c_up and c_diag <= c_left:
                    best = c_diag
                    step = STEP_DIAG
                elif c_up <= c_left:
                    best = c_up
                    step = STEP_UP
                else:
                    best = c_left
                    step = STEP_LEFT
                cost[base + j] = best + _delta(x[i], y[j], kind)
                if with_path:
                    steps[base + j] = step

    distance = cost[total - 1]
    if not with_path:
        return distance, None, None, total
    pi, pj = _trace_banded(steps, off, lo, n, m)
    return distance, pi, pj, total


cdef tuple _trace_banded(signed char[::1] steps, cnp.intp_t[::1] off,
                         const cnp.intp_t[::1] lo, Py_ssize_t n, Py_ssize_t m):
    cdef Py_ssize_t cap = n + m, k = 0
    cdef cnp.ndarray[cnp.intp_t, ndim=1] pi = np.empty(cap, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] pj = np.empty(cap, dtype=np.intp)
    cdef Py_ssize_t i = n - 1, j = m - 1
    cdef signed char s
    while True:
        pi[k] = i
        pj[k] = j
        k += 1
        if i == 0 and j == 0:
            break
        s = steps[off[i] - lo[i] + j]
        if s == STEP_DIAG:
            i -= 1
            j -= 1
        elif s == STEP_UP:
            i -= 1
        else:
            j -= 1
    return pi[:k][::-1].copy(), pj[:k][::-1].copy()


cdef Py_ssize_t _bisect_left(double[::1] a, Py_ssize_t n, double v) nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef Py_ssize_t _bisect_right(double[::1] a, Py_ssize_t n, double v) nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if v < a[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


cdef void _insert(double[::1] a, Py_ssize_t n, Py_ssize_t pos, double v) nogil:
    cdef Py_ssize_t t = n
    while t > pos:
        a[t] = a[t - 1]
        t -= 1
    a[pos] = v


cdef void _remove(double[::1] a, Py_ssize_t n, Py_ssize_t pos) nogil:
    cdef Py_ssize_t t = pos
    while t < n - 1:
        a[t] = a[t + 1]
        t += 1


cdef Py_ssize_t _slot(double[::1] xs, double[::1] ys, Py_ssize_t n,
                      double vx, double vy) nogil:
    # first position valid in both orders, or -1
    cdef Py_ssize_t l1 = _bisect_left(xs, n, vx), r1 = _bisect_right(xs, n, vx)
    cdef Py_ssize_t l2 = _bisect_left(ys, n, vy), r2 = _bisect_right(ys, n, vy)
    cdef Py_ssize_t lo = l1 if l1 > l2 else l2
    cdef Py_ssize_t hi = r1 if r1 < r2 else r2
    if lo > hi:
        return -1
    return lo


def prune_ranked(const double[::1] st1, const double[::1] end1,
                 const double[::1] st2, const double[::1] end2):
    cdef Py_ssize_t p = st1.shape[0], k, n = 0, r, r2
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] keep = np.zeros(p, dtype=np.uint8)
    cdef cnp.ndarray[double, ndim=1] xs_arr = np.empty(2 * p, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] ys_arr = np.empty(2 * p, dtype=np.float64)
    cdef double[::1] xs = xs_arr, ys = ys_arr
    cdef cnp.uint8_t[::1] kv = keep

    with nogil:
        for k in range(p):
            r = _slot(xs, ys, n, st1[k], st2[k])
            if r < 0:
                continue
            _insert(xs, n, r, st1[k])
            _insert(ys, n, r, st2[k])
            r2 = _slot(xs, ys, n + 1, end1[k], end2[k])
            if r2 < 0:
                _remove(xs, n + 1, r)
                _remove(ys, n + 1, r)
                continue
            _insert(xs, n + 1, r2, end1[k])
            _insert(ys, n + 1, r2, end2[k])
            n += 2
            kv[k] = 1
    return keep.astype(bool), xs_arr[:n].copy(), ys_arr[:n].copy()


def dominant_pairs(const double[::1] amp_x, const double[::1] sig_x,
                   const double[:, ::1] desc_x,
                   const double[::1] amp_y, const double[::1] sig_y,
                   const double[:, ::1] desc_y,
                   double tau_a, double tau_s, double tau_d):
    cdef Py_ssize_t nx = amp_x.shape[0], ny = amp_y.shape[0], dim = desc_x.shape[1]
    cdef Py_ssize_t i, j, t, bj, cnt = 0
    cdef double r, d, diff, d1, d2
    cdef cnp.ndarray[cnp.intp_t, ndim=1] ix = np.empty(nx, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] iy = np.empty(nx, dtype=np.intp)
    cdef cnp.ndarray[double, ndim=1] dist = np.empty(nx, dtype=np.float64)
    cdef cnp.intp_t[::1] ixv = ix, iyv = iy
    cdef double[::1] dv = dist

    with nogil:
        for i in range(nx):
            d1 = INFINITY
            d2 = INFINITY
            bj = -1
            for j in range(ny):
                if fabs(amp_x[i] - amp_y[j]) > tau_a:
                    continue
                r = sig_x[i] / sig_y[j]
                if r < 1.0:
                    r = 1.0 / r
                if r > tau_s:
                    continue
                d = 0.0
                for t in range(dim):
                    diff = desc_x[i, t] - desc_y[j, t]
                    d += diff * diff
                if d < d1:
                    d2 = d1
                    d1 = d
                    bj = j
                elif d < d2:
                    d2 = d
            if bj < 0:
                continue
            d1 = d1 ** 0.5
            d2 = d2 ** 0.5
            if d1 * tau_d <= d2:
                ixv[cnt] = i
                iyv[cnt] = bj
                dv[cnt] = d1
                cnt += 1
    return ix[:cnt].copy(), iy[:cnt].copy(), dist[:cnt].copy()


cdef inline Py_ssize_t _interval(const cnp.intp_t[::1] cuts, Py_ssize_t v) nogil:
    # k with cuts[k] <= v < cuts[k+1], clamped to [0, len - 2]
    cdef Py_ssize_t lo = 0, hi = cuts.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if v < cuts[mid]:
            hi = mid
        else:
            lo = mid + 1
    lo -= 1
    if lo < 0:
        lo = 0
    if lo > cuts.shape[0] - 2:
        lo = cuts.shape[0] - 2
    return lo


cdef inline Py_ssize_t _round_half_up(double v) nogil:
    return <Py_ssize_t>floor(v + 0.5)


def band_rows(Py_ssize_t n, Py_ssize_t m,
              const cnp.intp_t[::1] cuts_x, const cnp.intp_t[::1] cuts_y,
              bint adaptive_core, int width_mode, double width_fraction,
              double lower_bound_fraction, Py_ssize_t radius):
    """Band rows (bridged). width_mode: 0 fixed, 1 interval width with floor,
    2 mean width of the 2r+1 surrounding intervals."""
    cdef cnp.ndarray[cnp.intp_t, ndim=1] lo_arr = np.empty(n, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] hi_arr = np.empty(n, dtype=np.intp)
    cdef cnp.intp_t[::1] lo = lo_arr, hi = hi_arr
    cdef Py_ssize_t p = cuts_x.shape[0] - 1
    cdef Py_ssize_t i, k, sx, sy, spx, spy, core, h, w, a, b, t
    cdef double wf, acc

    cdef cnp.ndarray[cnp.intp_t, ndim=1] core_arr = np.empty(n, dtype=np.intp)
    cdef cnp.intp_t[::1] cores = core_arr
    cdef Py_ssize_t seg_hi

    with nogil:
        w = _round_half_up(width_fraction * m)
        if w < 1:
            w = 1
        if w > m:
            w = m
        for i in range(n):
            if adaptive_core:
                k = _interval(cuts_x, i)
                sx = cuts_x[k]
                sy = cuts_y[k]
                spx = cuts_x[k + 1] - sx
                spy = cuts_y[k + 1] - sy
                if k == p - 1:
                    # last interval is mapped end-inclusive onto the corner
                    spx = n - 1 - sx
                    spy = m - 1 - sy
                if spy <= 0:
                    core = sy
                elif spx <= 0:
                    core = sy + _round_half_up(spy / 2.0)
                else:
                    core = sy + _round_half_up(<double>((i - sx) * spy) / spx)
            elif n == 1:
                core = 0
            else:
                core = _round_half_up(<double>(i * (m - 1)) / (n - 1))
            if core > m - 1:
                core = m - 1
            if core < 0:
                core = 0
            cores[i] = core

        for i in range(n):
            core = cores[i]
            if width_mode == 0:
                # window of w columns around the core's run up to the next core
                seg_hi = core
                if i + 1 < n and cores[i + 1] - 1 > seg_hi:
                    seg_hi = cores[i + 1] - 1
                a = core - (w - 1) // 2
                if a > m - w:
                    a = m - w
                if a < 0:
                    a = 0
                b = seg_hi + w // 2
                if b < a + w - 1:
                    b = a + w - 1
                if b > m - 1:
                    b = m - 1
                lo[i] = a
                hi[i] = b
                continue
            k = _interval(cuts_y, core)
            if width_mode == 1:
                wf = <double>(cuts_y[k + 1] - cuts_y[k])
                if wf < lower_bound_fraction * m:
                    wf = lower_bound_fraction * m
            else:
                a = k - radius
                b = k + radius + 1
                if a < 0:
                    a = 0
                if b > p:
                    b = p
                acc = 0.0
                for t in range(a, b):
                    acc += cuts_y[t + 1] - cuts_y[t]
                wf = acc / (b - a)
            h = <Py_ssize_t>ceil(wf / 2.0 - 1e-9)
            a = core - h
            b = core + h
            lo[i] = a if a > 0 else 0
            hi[i] = b if b < m - 1 else m - 1
    _bridge(lo, hi, n, m)
    return lo_arr, hi_arr


cdef void _bridge(cnp.intp_t[::1] lo, cnp.intp_t[::1] hi, Py_ssize_t n, Py_ssize_t m) nogil:
    cdef Py_ssize_t i
    lo[0] = 0
    hi[n - 1] = m - 1
    for i in range(n - 2, -1, -1):
        if lo[i + 1] < lo[i]:
            lo[i] = lo[i + 1]
    for i in range(1, n):
        if hi[i - 1] > hi[i]:
            hi[i] = hi[i - 1]
    for i in range(1, n):
        if lo[i] > hi[i - 1] + 1:
            lo[i] = hi[i - 1] + 1
