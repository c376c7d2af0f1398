import numpy as np
import pytest

from salientdtw.banding import BandMask, BandSpec, build_band, parse_approach
from salientdtw.descriptor import extract_features
from salientdtw.dtw import banded_dtw, constraint_band, full_dtw, sdtw_distance
from salientdtw.errors import BandInvariantError, InvalidInputError

from helpers import rich_series
from oracles import band_is_valid, brute_dtw, delta, enumerate_paths, random_valid_band

ADAPTIVE = ["fc.aw", "ac.fw@6%", "ac.fw@10%", "ac.aw", "ac2.aw"]


def _check_path(path, n, m, band=None):
    assert tuple(path[0]) == (0, 0) and tuple(path[-1]) == (n - 1, m - 1)
    steps = np.diff(path, axis=0)
    assert set(map(tuple, steps)) <= {(1, 0), (0, 1), (1, 1)}
    assert max(n, m) <= len(path) <= n + m
    if band is not None:
        i, j = path[:, 0], path[:, 1]
        assert ((band.lo[i] <= j) & (j <= band.hi[i])).all()


def test_identical_series():
    x = np.array([3.0, 1.0, 4.0, 1.0, 5.0])
    r = full_dtw(x, x)
    assert r.distance == 0.0
    assert r.path.tolist() == [[i, i] for i in range(5)]
    assert r.cells_filled == 25


def test_repeated_element_costs_nothing():
    assert full_dtw([1, 2, 3], [1, 2, 2, 3]).distance == 0.0


def test_path_enumeration_counts():
    # Delannoy numbers
    assert [len(enumerate_paths(k, k)) for k in (1, 2, 3, 4)] == [1, 3, 13, 63]


def test_full_matches_exhaustive_enumeration_small():
    rng = np.random.default_rng(1)
    for _ in range(40):
        n, m = rng.integers(1, 6, 2)
        x, y = rng.normal(size=n), rng.normal(size=m)
        want = min(sum(delta(x[i], y[j]) for i, j in p) for p in enumerate_paths(n, m))
        assert full_dtw(x, y).distance == pytest.approx(want, abs=1e-9)


@pytest.mark.parametrize("kind", ["absolute", "squared"])
def test_full_matches_brute_force(kind):
    rng = np.random.default_rng(2)
    for _ in range(60):
        n, m = rng.integers(1, 11, 2)
        x, y = rng.normal(size=n), rng.normal(size=m)
        r = full_dtw(x, y, kind)
        assert r.distance == pytest.approx(brute_dtw(x, y, kind), abs=1e-9)
        _check_path(r.path, n, m)
        assert r.path_cost(x, y, kind) == pytest.approx(r.distance, abs=1e-9)


def test_banded_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(60):
        n, m = rng.integers(1, 11, 2)
        x, y = rng.normal(size=n), rng.normal(size=m)
        lo, hi = random_valid_band(n, m, rng)
        band = BandMask(lo, hi, m)
        r = banded_dtw(x, y, band)
        want = brute_dtw(x, y, allowed=lambda i, j: lo[i] <= j <= hi[i])
        assert r.distance == pytest.approx(want, abs=1e-9)
        assert r.cells_filled == int((hi - lo + 1).sum())
        _check_path(r.path, n, m, band)


def test_full_band_is_full_dtw(rng):
    for _ in range(20):
        n, m = rng.integers(1, 30, 2)
        x, y = rng.normal(size=n), rng.normal(size=m)
        a, b = full_dtw(x, y), banded_dtw(x, y, BandMask.full(n, m))
        assert a.distance == b.distance and a.cells_filled == b.cells_filled == n * m
        np.testing.assert_array_equal(a.path, b.path)


def test_diagonal_band_sums_elementwise(rng):
    x, y = rng.normal(size=9), rng.normal(size=9)
    band = BandMask(np.arange(9), np.arange(9), 9)
    r = banded_dtw(x, y, band)
    assert r.distance == pytest.approx(np.abs(x - y).sum())
    assert r.cells_filled == 9


def test_tie_break_prefers_diagonal_then_up():
    # every cell costs zero, so every predecessor ties
    r = full_dtw(np.zeros(3), np.zeros(5))
    assert r.path.tolist() == [[0, 0], [0, 1], [0, 2], [1, 3], [2, 4]]
    r = full_dtw(np.zeros(5), np.zeros(3))
    assert r.path.tolist() == [[0, 0], [1, 0], [2, 0], [3, 1], [4, 2]]


def test_distance_only_mode(rng):
    x, y = rng.normal(size=20), rng.normal(size=25)
    a, b = full_dtw(x, y), full_dtw(x, y, with_path=False)
    assert a.distance == b.distance and b.path is None


def test_invalid_band_rejected(rng):
    x, y = rng.normal(size=4), rng.normal(size=4)
    with pytest.raises(BandInvariantError):
        banded_dtw(x, y, BandMask(np.array([0, 0, 3, 3]), np.array([1, 1, 3, 3]), 4))
    with pytest.raises(InvalidInputError):
        banded_dtw(x, y, BandMask.full(4, 5))


def test_input_validation():
    with pytest.raises(InvalidInputError):
        full_dtw([], [1.0])
    with pytest.raises(InvalidInputError):
        full_dtw([1.0], [float("nan")])
    with pytest.raises(InvalidInputError):
        full_dtw([1.0], [1.0], delta="cosine")


def test_band_dominance(rng):
    for _ in range(30):
        n, m = rng.integers(2, 25, 2)
        x, y = rng.normal(size=n), rng.normal(size=m)
        full = full_dtw(x, y).distance
        prev = None
        for w in (0.06, 0.1, 0.2, 0.5, 1.0):
            d = banded_dtw(x, y, build_band(None, BandSpec("fc.fw", w), n, m)).distance
            assert d >= full - 1e-12
            if prev is not None:
                assert d <= prev + 1e-12
            prev = d


def test_full_dtw_symmetric(rng):
    for _ in range(20):
        x, y = rng.normal(size=rng.integers(1, 20)), rng.normal(size=rng.integers(1, 20))
        assert full_dtw(x, y).distance == pytest.approx(full_dtw(y, x).distance, abs=1e-12)


def test_self_distance_zero_for_all_specs(rng):
    x = rich_series(rng, 256)
    f = extract_features(x)
    for name in ADAPTIVE + ["fc.fw@6%"]:
        r = sdtw_distance(x, x, f, f, parse_approach(name))
        assert r.distance == 0.0


def test_featureless_pair_uses_fallback_partition():
    x, y = np.full(64, 1.0), np.full(80, 2.0)
    for mode in ("ac.aw", "ac.fw@10%"):
        spec = parse_approach(mode)
        band = constraint_band(x, y, [], [], spec)
        fc = build_band(None, parse_approach(mode.replace("ac", "fc", 1)), 64, 80)
        assert band == fc


def test_constrained_never_below_full(rng):
    for _ in range(10):
        x, y = rich_series(rng, 200), rich_series(rng, 230)
        fx, fy = extract_features(x), extract_features(y)
        full = full_dtw(x, y).distance
        for name in ADAPTIVE:
            for sym in (False, True):
                r = sdtw_distance(x, y, fx, fy, parse_approach(name), sym)
                assert r.distance >= full
                assert r.cells_filled <= 200 * 230
                band = constraint_band(x, y, fx, fy, parse_approach(name), sym)
                assert band_is_valid(band.lo, band.hi, 230)
                _check_path(r.path, 200, 230, band)


def test_symmetric_flag_gives_symmetric_distance(rng):
    for _ in range(10):
        x, y = rich_series(rng, 200), rich_series(rng, 180)
        fx, fy = extract_features(x), extract_features(y)
        for name in ADAPTIVE + ["fc.fw@10%"]:
            spec = parse_approach(name)
            a = sdtw_distance(x, y, fx, fy, spec, symmetric=True)
            b = sdtw_distance(y, x, fy, fx, spec, symmetric=True)
            assert a.distance == pytest.approx(b.distance, rel=1e-12, abs=1e-12)
            assert a.cells_filled == b.cells_filled


def test_cells_filled_equals_grid_only_for_full_band(rng):
    x, y = rng.normal(size=12), rng.normal(size=10)
    lo, hi = random_valid_band(12, 10, rng)
    band = BandMask(lo, hi, 10)
    cells = banded_dtw(x, y, band).cells_filled
    assert (cells == 120) == (band == BandMask.full(12, 10))
