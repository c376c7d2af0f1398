import numpy as np
import pytest

from salientdtw.banding import (BandMask, BandSpec, IntervalPartition, bridge_gaps,
                                build_band, candidate_point, candidate_points,
                                derive_partition, diagonal_core, parse_approach, partition_cuts,
                                symmetrize)
from salientdtw.descriptor import extract_features
from salientdtw.errors import BandInvariantError, InvalidInputError
from salientdtw.matching import ConsistentAlignment, align

from helpers import feature, rich_series
from oracles import band_is_valid, dense, random_valid_band

MODES = ["fc.fw@6", "fc.fw@20", "fc.aw", "ac.fw@10", "ac.aw", "ac2.aw"]


def _alignment(b1, b2):
    return ConsistentAlignment((object(),) * (len(b1) // 2), np.array(b1, float),
                               np.array(b2, float))


def test_partition_from_empty_alignment():
    p = derive_partition(ConsistentAlignment.empty(), 10, 20)
    assert p.cuts_x.tolist() == [0, 10] and p.cuts_y.tolist() == [0, 20]


def test_partition_from_one_pair():
    p = derive_partition(_alignment([3, 6], [5, 9]), 10, 12)
    assert p.cuts_x.tolist() == [0, 3, 6, 10]
    assert p.cuts_y.tolist() == [0, 5, 9, 12]


def test_partition_rounds_and_drops_collisions():
    # 0.4 rounds to 0 (collides with the first cut), 6.5 rounds up to 7
    p = derive_partition(_alignment([0.4, 6.5, 6.6, 8.0], [2.0, 3.0, 4.0, 4.2]), 10, 10)
    # (0, 2) and (7, 4) do not advance on X and are dropped on both series
    assert p.cuts_x.tolist() == [0, 7, 8, 10]
    assert p.cuts_y.tolist() == [0, 3, 4, 10]


def test_self_partition_is_symmetric(rng):
    x = rich_series(rng, 256)
    f = extract_features(x)
    p = derive_partition(align(f, f, amplitude_range=float(np.ptp(x))), 256, 256)
    np.testing.assert_array_equal(p.cuts_x, p.cuts_y)
    assert len(p) > 1


def test_partition_validation():
    with pytest.raises(InvalidInputError):
        IntervalPartition(np.array([1, 5]), np.array([0, 5]))
    with pytest.raises(InvalidInputError):
        IntervalPartition(np.array([0, 5, 3]), np.array([0, 2, 5]))
    with pytest.raises(InvalidInputError):
        IntervalPartition(np.array([0, 5]), np.array([0, 2, 5]))


def test_candidate_point_examples():
    p = IntervalPartition(np.array([0, 10, 15]), np.array([0, 20, 25]))
    assert candidate_point(5, p) == 10
    q = IntervalPartition(np.array([0, 3, 6, 10]), np.array([0, 5, 9, 12]))
    for st_x, st_y in ((0, 0), (3, 5), (6, 9)):
        assert candidate_point(st_x, q) == st_y
    assert candidate_point(4, q) == 6   # 5 + round(1 * 4 / 3)
    deg = IntervalPartition(np.array([0, 4, 10, 12]), np.array([0, 7, 7, 12]))
    for i in range(4, 10):
        assert candidate_point(i, deg) == 7
    with pytest.raises(InvalidInputError):
        candidate_point(10, q)


def test_candidate_point_skips_empty_x_interval():
    p = IntervalPartition(np.array([0, 4, 4, 10, 12]), np.array([0, 2, 8, 12, 14]))
    # row 4 skips the empty X interval [4, 4) and lies in [4, 10) <-> Y [8, 12)
    assert candidate_point(4, p) == 8
    assert candidate_points([3], p).tolist() == [2]  # 3 * 2 / 4 = 1.5 -> 2


def test_round_half_up_in_core():
    p = IntervalPartition(np.array([0, 4, 8]), np.array([0, 6, 9]))
    # i = 1 -> 1.5 -> 2 ; i = 3 -> 4.5 -> 5
    assert candidate_points([0, 1, 2, 3], p).tolist() == [0, 2, 3, 5]


def test_last_interval_reaches_corner():
    p = IntervalPartition(np.array([0, 10]), np.array([0, 20]))
    assert candidate_point(9, p) == 19
    np.testing.assert_array_equal(candidate_points(np.arange(10), p), diagonal_core(10, 20))


def test_diagonal_core():
    assert diagonal_core(5, 9).tolist() == [0, 2, 4, 6, 8]
    assert diagonal_core(1, 7).tolist() == [0]


def test_full_width_band_is_full_grid():
    b = build_band(None, BandSpec("fc.fw", 1.0), 17, 23)
    assert b.lo.tolist() == [0] * 17 and b.hi.tolist() == [22] * 17


def test_width_one_band_is_diagonal():
    n = 20
    b = build_band(None, BandSpec("fc.fw", 1.0 / n), n, n)
    assert b.lo.tolist() == list(range(n)) and b.hi.tolist() == list(range(n))


def test_ac_fw_core_example():
    p = IntervalPartition(np.array([0, 3, 6, 10]), np.array([0, 5, 9, 12]))
    assert candidate_point(4, p) == 6
    b = build_band(p, BandSpec("ac.fw", 1.0 / 12), 10, 12)
    # a one-column window on core 6, run on to just before row 5's core (8)
    assert candidate_point(5, p) == 8
    assert (b.lo[4], b.hi[4]) == (6, 7)


def test_adaptive_width_uses_interval_width():
    p = IntervalPartition(np.array([0, 50, 100]), np.array([0, 20, 100]))
    b = build_band(p, BandSpec("ac.aw", None, 0.0), 100, 100)
    # row 70 -> core 20 + round(20 * 80 / 50) = 52, interval width 80 -> h = 40
    assert (b.lo[70], b.hi[70]) == (12, 92)
    lb = build_band(p, BandSpec("ac.aw", None, 0.5), 100, 100)
    # row 10 -> core 4, width 20 floored at 50 -> h = 25
    assert (lb.lo[10], lb.hi[10]) == (0, 29)


def test_ac2_width_averages_neighbor_intervals():
    p = IntervalPartition(np.array([0, 10, 20, 30, 40]), np.array([0, 10, 40, 50, 60]))
    b = build_band(p, BandSpec("ac2.aw", None, 0.2, 1), 40, 60)
    # row 25 -> interval 2 (Y [40, 50)); mean of widths 30, 10, 10 -> h = ceil(25 / 3) = 9
    core = 40 + 5
    assert (b.lo[25], b.hi[25]) == (core - 9, core + 9)
    # first interval averages itself and its right neighbor: (10 + 30) / 2 -> h = 10
    assert (b.lo[5], b.hi[5]) == (0, 5 + 10)


def test_all_modes_produce_valid_bands(rng):
    for _ in range(20):
        x, y = rich_series(rng, 200), rich_series(rng, 180)
        al = align(extract_features(x), extract_features(y), amplitude_range=float(np.ptp(x)))
        part = derive_partition(al, 200, 180)
        for name in MODES:
            b = build_band(part, parse_approach(name), 200, 180)
            assert band_is_valid(b.lo, b.hi, 180), name


def test_empty_alignment_cores_fall_back_to_diagonal():
    part = derive_partition(ConsistentAlignment.empty(), 40, 70)
    for w in (0.06, 0.2):
        a = build_band(part, BandSpec("ac.fw", w), 40, 70)
        f = build_band(None, BandSpec("fc.fw", w), 40, 70)
        assert a == f
    assert build_band(part, BandSpec("ac.aw"), 40, 70) == build_band(None, BandSpec("fc.aw"), 40, 70)


def test_fixed_width_inclusion_monotone():
    bands = [build_band(None, BandSpec("fc.fw", w), 64, 80) for w in (0.06, 0.10, 0.20, 1.0)]
    for small, big in zip(bands, bands[1:]):
        assert big.contains(small)


def test_band_mask_invariants_checked():
    with pytest.raises(BandInvariantError):
        BandMask(np.array([0, 3]), np.array([1, 3]), 4).validate()   # gap between rows
    with pytest.raises(BandInvariantError):
        BandMask(np.array([1, 1]), np.array([1, 3]), 4).validate()   # corner missing
    assert BandMask.full(3, 4).is_valid()


def test_band_dump_format():
    b = BandMask(np.array([0, 0, 1]), np.array([1, 2, 2]), 3)
    assert b.dump() == "0 0 1\n1 0 2\n2 1 2\n"


def test_bridge_gaps_valid_band_unchanged(rng):
    for _ in range(50):
        n, m = rng.integers(1, 15, 2)
        lo, hi = random_valid_band(n, m, rng)
        b = BandMask(lo, hi, m)
        assert bridge_gaps(b) == b


def test_bridge_gaps_joins_disjoint_blocks():
    lo = np.array([0] * 5 + [10] * 5)
    hi = np.array([4] * 5 + [14] * 5)
    out = bridge_gaps(BandMask(lo, hi, 15))
    assert band_is_valid(out.lo, out.hi, 15)
    assert out.lo[5] <= out.hi[4] + 1
    assert out.contains(BandMask(lo, hi, 15))


def test_bridge_gaps_adds_corners():
    out = bridge_gaps(BandMask(np.array([2, 3, 4]), np.array([2, 3, 4]), 7))
    assert out.lo[0] == 0 and out.hi[-1] == 6


def test_bridge_gaps_idempotent_and_inflationary(rng):
    for _ in range(200):
        n, m = rng.integers(1, 20, 2)
        a = rng.integers(0, m, n)
        b = rng.integers(0, m, n)
        raw = BandMask(np.minimum(a, b), np.maximum(a, b), m)
        out = bridge_gaps(raw)
        assert band_is_valid(out.lo, out.hi, m)
        assert out.contains(raw)
        assert bridge_gaps(out) == out


def test_transpose_matches_dense(rng):
    for _ in range(100):
        n, m = rng.integers(1, 14, 2)
        lo, hi = random_valid_band(n, m, rng)
        t = BandMask(lo, hi, m).transpose()
        np.testing.assert_array_equal(dense(t.lo, t.hi, n), dense(lo, hi, m).T)


def test_symmetrize_examples(rng):
    n = 12
    lo, hi = random_valid_band(n, n, rng)
    b = BandMask(lo, hi, n)
    assert symmetrize(BandMask.full(n, n), b.transpose()) == BandMask.full(n, n)
    # a band combined with its own transposed swap gives back a superset that is
    # stable under a second pass
    s = symmetrize(b, b.transpose())
    assert s.contains(b) and symmetrize(s, s.transpose()) == s
    with pytest.raises(InvalidInputError):
        symmetrize(BandMask.full(3, 4), BandMask.full(3, 4))


def test_symmetrize_equals_dense_union_oracle(rng):
    for _ in range(200):
        n, m = rng.integers(1, 13, 2)
        a = BandMask(*random_valid_band(n, m, rng), m)
        b = BandMask(*random_valid_band(m, n, rng), n)
        union = dense(a.lo, a.hi, m) | dense(b.lo, b.hi, n).T
        rows = [np.flatnonzero(r) for r in union]
        hull = BandMask(np.array([r[0] for r in rows]), np.array([r[-1] for r in rows]), m)
        got = symmetrize(a, b)
        assert got == bridge_gaps(hull)
        assert got.contains(a)
        assert (dense(got.lo, got.hi, m) >= union).all()
        # swapping roles gives exactly the transpose
        assert symmetrize(b, a) == got.transpose()


def test_parse_approach():
    assert parse_approach("dtw") is None
    s = parse_approach("ac.fw@10%")
    assert s.mode == "ac.fw" and s.width_fraction == pytest.approx(0.10)
    assert parse_approach("fc.fw@6").name == "fc.fw@6%"
    assert parse_approach("ac2.aw").neighbor_radius == 1
    for bad in ("xx", "fc.fw", "ac.aw@10%", "fc.fw@0%", "fc.fw@150%"):
        with pytest.raises(InvalidInputError):
            parse_approach(bad)


def test_partition_cuts_boundary_rounding_onto_series_end():
    cx, cy = partition_cuts([9.6], [3], 10, 20)
    assert cx.tolist() == [0, 10] and cy.tolist() == [0, 20]
    cx, cy = partition_cuts([3, 5], [19.7, 19.9], 10, 20)
    assert cx.tolist() == [0, 10] and cy.tolist() == [0, 20]
