import numpy as np
import pytest

from isacsim.region import RateRegion, check_containment, dominates


def make_region(label, pts):
    r = RateRegion(label)
    for i, (s, c) in enumerate(pts):
        r.add(s, c, label, float(i))
    return r


class TestFrontier:
    def test_dominated_points_dropped(self):
        r = make_region("a", [(3, 1), (2, 2), (2.5, 0.5), (1, 3), (0.5, 2.9)])
        f = r.frontier()
        coords = [(q.sensing_rate, q.comm_rate) for q in f]
        assert coords == [(3, 1), (2, 2), (1, 3)]

    def test_sorted_by_sensing(self):
        r = make_region("a", [(1, 3), (3, 1), (2, 2)])
        srs, crs = r.frontier_arrays()
        assert np.all(np.diff(srs) < 0)
        assert np.all(np.diff(crs) > 0)


class TestDominance:
    def test_direct_and_time_share(self):
        fsr = np.array([3.0, 1.0])
        fcr = np.array([1.0, 3.0])
        assert dominates((2.9, 0.9), fsr, fcr)
        assert dominates((2.0, 2.0), fsr, fcr)  # on the time-share segment
        assert not dominates((2.0, 2.1), fsr, fcr)
        assert not dominates((3.1, 0.5), fsr, fcr)


class TestContainment:
    def test_shrunk_copy_contained(self):
        outer = make_region("outer", [(3, 1), (2, 2), (1, 3)])
        inner = make_region("inner", [(s * 0.9, c * 0.9) for s, c in
                                      [(3, 1), (2, 2), (1, 3)]])
        ok, margin = check_containment(inner, outer)
        assert ok
        assert margin < 0

    def test_inflated_copy_not_contained(self):
        outer = make_region("outer", [(3, 1), (2, 2), (1, 3)])
        inner = make_region("inner", [(2.0, 2.5)])
        ok, margin = check_containment(inner, outer)
        assert not ok
        assert margin > 0

    def test_equal_region_contained(self):
        outer = make_region("outer", [(3, 1), (2, 2), (1, 3)])
        ok, margin = check_containment(outer, outer)
        assert ok
        assert margin <= 1e-9
