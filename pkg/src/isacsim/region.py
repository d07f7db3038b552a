"""Sensing-rate / communication-rate region handling.

A region is a set of achievable (SR, CR) points; its Pareto frontier is the
staircase of mutually non-dominated points.  Containment checks compare an
inner region's points against an outer frontier, time-sharing included.
"""

import numpy as np
from dataclasses import dataclass, field


@dataclass(frozen=True)
class RegionPoint:
    sensing_rate: float
    comm_rate: float
    design_tag: str
    sweep_param: float


@dataclass
class RateRegion:
    label: str
    points: list = field(default_factory=list)

    def add(self, sensing_rate, comm_rate, design_tag, sweep_param):
        self.points.append(
            RegionPoint(float(sensing_rate), float(comm_rate), design_tag, float(sweep_param))
        )

    def frontier(self):
        """Non-dominated points sorted by decreasing sensing rate."""
        pts = sorted(self.points, key=lambda q: (-q.sensing_rate, -q.comm_rate))
        out = []
        best_cr = -np.inf
        for q in pts:
            if q.comm_rate > best_cr + 1e-12:
                out.append(q)
                best_cr = q.comm_rate
        return out

    def frontier_arrays(self):
        f = self.frontier()
        return (
            np.array([q.sensing_rate for q in f]),
            np.array([q.comm_rate for q in f]),
        )


def dominates(point, frontier_sr, frontier_cr, rel_tol=1e-6):
    """True when a frontier point (or a time-share of two) weakly dominates
    the given (sr, cr) point."""
    sr, cr = point
    scale_s = max(1.0, np.max(frontier_sr, initial=0.0))
    scale_c = max(1.0, np.max(frontier_cr, initial=0.0))
    tol_s, tol_c = rel_tol * scale_s, rel_tol * scale_c
    for i in range(frontier_sr.size):
        if frontier_sr[i] >= sr - tol_s and frontier_cr[i] >= cr - tol_c:
            return True
    # time sharing between consecutive frontier points (sr decreasing)
    for i in range(frontier_sr.size - 1):
        s1, c1 = frontier_sr[i], frontier_cr[i]
        s2, c2 = frontier_sr[i + 1], frontier_cr[i + 1]
        lo, hi = min(s1, s2), max(s1, s2)
        if lo - tol_s <= sr <= hi + tol_s and abs(s1 - s2) > 0:
            t = np.clip((sr - s2) / (s1 - s2), 0.0, 1.0)
            if t * c1 + (1 - t) * c2 >= cr - tol_c:
                return True
    return False


def check_containment(inner, outer, rel_tol=1e-6):
    """Verify every point of `inner` is dominated by `outer`'s frontier.

    Returns (contained, worst_margin) where the margin is the largest
    relative excess of an inner point beyond the outer frontier (negative
    when strictly inside).
    """
    fsr, fcr = outer.frontier_arrays()
    worst = -np.inf
    contained = True
    scale_c = max(1.0, np.max(fcr, initial=0.0))
    for q in inner.points:
        ok = dominates((q.sensing_rate, q.comm_rate), fsr, fcr, rel_tol)
        if not ok:
            contained = False
        # margin: how far above the frontier's comm rate at this SR
        idx = fsr >= q.sensing_rate - rel_tol * max(1.0, np.max(fsr, initial=0.0))
        best_cr = np.max(fcr[idx], initial=0.0) if np.any(idx) else 0.0
        if fsr.size >= 2:
            best_cr = max(best_cr, float(np.interp(
                q.sensing_rate, fsr[::-1], fcr[::-1], left=fcr[-1], right=0.0
            )))
        worst = max(worst, (q.comm_rate - best_cr) / scale_c)
    return contained, worst
