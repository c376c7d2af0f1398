"""The compiled and pure-Python kernels must agree."""

import numpy as np
import pytest

from salientdtw import _kernels
from salientdtw.descriptor import FeatureSet, extract_features

from helpers import rich_series
from oracles import random_valid_band

py = _kernels.backend_module("python")
try:
    cc = _kernels.backend_module("compiled")
except ImportError:  # extension not built
    cc = None

needs_ext = pytest.mark.skipif(cc is None, reason="compiled extension not built")


def test_backend_reported():
    assert _kernels.BACKEND in ("compiled", "python")


@needs_ext
@pytest.mark.parametrize("kind", [0, 1])
def test_dtw_full_agrees(rng, kind):
    for _ in range(30):
        n, m = rng.integers(1, 40, 2)
        x, y = rng.normal(size=n), rng.normal(size=m)
        a, b = cc.dtw_full(x, y, kind, True), py.dtw_full(x, y, kind, True)
        assert a[0] == b[0]
        np.testing.assert_array_equal(a[1], b[1])
        np.testing.assert_array_equal(a[2], b[2])


@needs_ext
def test_dtw_banded_agrees(rng):
    for _ in range(30):
        n, m = rng.integers(1, 40, 2)
        x, y = rng.normal(size=n), rng.normal(size=m)
        lo, hi = (v.astype(np.intp) for v in random_valid_band(n, m, rng))
        a, b = cc.dtw_banded(x, y, lo, hi, 0, True), py.dtw_banded(x, y, lo, hi, 0, True)
        assert a[0] == b[0] and a[3] == b[3]
        np.testing.assert_array_equal(a[1], b[1])


@needs_ext
def test_prune_agrees(rng):
    for _ in range(200):
        k = int(rng.integers(0, 15))
        st1 = rng.integers(0, 20, k).astype(float)
        st2 = rng.integers(0, 20, k).astype(float)
        en1 = st1 + rng.integers(1, 8, k)
        en2 = st2 + rng.integers(1, 8, k)
        a, b = cc.prune_ranked(st1, en1, st2, en2), py.prune_ranked(st1, en1, st2, en2)
        for u, v in zip(a, b):
            np.testing.assert_array_equal(u, v)


@needs_ext
def test_dominant_pairs_agree(rng):
    for _ in range(10):
        fx = FeatureSet(extract_features(rich_series(rng, 512)))
        fy = FeatureSet(extract_features(rich_series(rng, 512)))
        args = (fx.amplitude, fx.sigma, fx.descriptors, fy.amplitude, fy.sigma,
                fy.descriptors, 0.5, 4.0, 1.5)
        a, b = cc.dominant_pairs(*args), py.dominant_pairs(*args)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])
        np.testing.assert_allclose(a[2], b[2], rtol=1e-12)


@needs_ext
def test_band_rows_agree(rng):
    for _ in range(100):
        n, m = (int(v) for v in rng.integers(2, 60, 2))
        k = int(rng.integers(0, 5))
        cx = np.unique(np.concatenate([[0], rng.integers(1, n, k), [n]])).astype(np.intp)
        cy = np.sort(rng.integers(1, m, cx.size - 2))
        cy = np.concatenate([[0], cy, [m]]).astype(np.intp)
        for adaptive in (False, True):
            for mode in (0, 1, 2):
                args = (n, m, cx, cy, adaptive, mode, float(rng.uniform(0.01, 1.0)),
                        0.2, 1)
                a, b = cc.band_rows(*args), py.band_rows(*args)
                np.testing.assert_array_equal(a[0], b[0])
                np.testing.assert_array_equal(a[1], b[1])
