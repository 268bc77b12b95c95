"""Tracing the invariant Herman quasicircle and measuring its geometry.

The curve is represented purely by orbit samples of the critical point:
vertex k is (k, {k*theta}, f^k(c)), and for irrational theta sorting by
the conjugacy angle {k*theta} lays the samples out in their cyclic order
along the curve.  No interpolating spline is ever fitted; estimators are
sample-based.
"""

import cmath
import math
import os
from dataclasses import dataclass

import mpmath
import numpy as np

from . import _kernels
from .cfrac import ContinuedFraction, convergents
from .rotation import _resolve_theta


@dataclass
class HermanCurve:
    """Traced invariant quasicircle: combinatorially ordered critical orbit."""

    ks: np.ndarray          # orbit indices, sorted by angle
    angles: np.ndarray      # {k*theta}
    points: np.ndarray      # f^k(critical_point)
    theta: ContinuedFraction
    critical_point: complex
    d0: int | None
    dinf: int | None
    depth: int              # trace depth n (q_n vertices)
    map: object = None

    def __len__(self):
        return len(self.ks)

    def point_at_orbit_index(self, k):
        """f^k(c) for an orbit index present in the trace."""
        i = self._index().get(int(k))
        if i is None:
            raise KeyError("orbit index %d not in trace" % k)
        return complex(self.points[i])

    def _index(self):
        if not hasattr(self, "_idx"):
            self._idx = {int(k): i for i, k in enumerate(self.ks)}
        return self._idx

    def closest_returns(self, upto=None):
        """c_{q_k} = f^{q_k}(c) - c for all convergent indices in the trace."""
        conv = convergents(self.theta, self.depth)
        out = {}
        for k in range(1, self.depth):
            if conv.q[k] < len(self.ks) + 1:
                try:
                    out[k] = self.point_at_orbit_index(conv.q[k]) - self.critical_point
                except KeyError:
                    pass
            if upto is not None and k >= upto:
                break
        return out

    def winding_number(self, z0=0.0):
        args = np.angle(self.points - z0)
        inc = (np.diff(np.concatenate([args, args[:1]])) + math.pi) % (2 * math.pi) - math.pi
        return int(round(inc.sum() / (2 * math.pi)))


class OrbitEscapeError(RuntimeError):
    pass


def trace(map_, theta, n, critical_point=1.0, check=True, sort_by_arg=False):
    """Trace the Herman curve to depth n: the q_n first orbit points of c.

    Vertices are sorted by conjugacy angle {k*theta}; for Blaschke members
    (curve = unit circle) sort_by_arg=True orders by the actual circle
    argument instead, which stays exact at depths beyond the parameter's
    tuning level.
    """
    theta = _resolve_theta(theta)
    conv = convergents(theta, n)
    qn = conv.q[n]
    prec = os.environ.get("HERMANLAB_PRECISION", "double")
    ks = np.arange(1, qn, dtype=np.int64)
    if prec == "extended":
        pts, nok = _kernels.orbit_samples_extended(map_.num, map_.den,
                                                  complex(critical_point), ks)
    else:
        pts, nok = _kernels.orbit_samples(map_.num, map_.den, complex(critical_point),
                                          ks, 1e-8, 1e8)
    if nok != len(ks):
        raise OrbitEscapeError("orbit escaped after %d iterates (depth q_%d = %d)"
                               % (nok, n, qn))
    ks = np.concatenate([[0], ks])
    pts = np.concatenate([[complex(critical_point)], pts])
    th = theta.value_float()
    angles = (ks * th) % 1.0
    if sort_by_arg:
        order = np.argsort(np.angle(pts / complex(critical_point)) % (2 * math.pi),
                           kind="stable")
    else:
        order = np.argsort(angles, kind="stable")
    curve = HermanCurve(ks=ks[order], angles=angles[order], points=pts[order],
                        theta=theta, critical_point=complex(critical_point),
                        d0=map_.d0, dinf=map_.dinf, depth=n, map=map_)
    if check:
        scale = float(np.max(np.abs(curve.points - np.mean(curve.points))))
        # vertex-dynamics spot check on a subsample
        step = max(1, qn // 257)
        for k in range(0, qn - 1, step):
            fw = map_.eval(pts[k])
            if abs(fw - pts[k + 1]) > 1e-9 * max(scale, 1.0):
                raise OrbitEscapeError("vertex dynamics check failed at k=%d" % k)
    return curve


def _aitken(seq):
    """One Aitken delta-squared acceleration pass."""
    out = []
    for i in range(len(seq) - 2):
        d2 = seq[i + 2] - 2 * seq[i + 1] + seq[i]
        if d2 == 0:
            out.append(seq[i + 2])
        else:
            out.append(seq[i + 2] - (seq[i + 2] - seq[i + 1]) ** 2 / d2)
    return out


def _clean_prefix(phis, tol=0.12):
    """Truncate a one-sided phase sequence where round-off breaks its

    geometric convergence (successive-difference ratios drift off the
    median of the clean regime).  The deepest closest returns are
    O(1e-11) from the critical point, so their phases carry relative
    noise that would dominate the extrapolation.
    """
    if len(phis) < 4:
        return phis
    d = np.diff(phis)
    if np.any(d == 0):
        return phis
    r = d[1:] / d[:-1]
    med = float(np.median(r[: max(3, len(r) // 2)]))
    keep = len(d)
    for i in range(1, len(r)):
        if abs(r[i] - med) > tol:
            keep = i + 1
            break
    return phis[: keep + 1]


def _accelerate(phis):
    """Two Aitken passes (Shanks order 2) on a phase sequence."""
    out = _aitken(phis)
    if len(out) >= 3:
        out = _aitken(out)
    return out if out else phis


def critical_angle(curve, inward_direction=None):
    """Interior angle of the curve at the critical point, in radians.

    The closest returns c_{q_k} approach the critical point along two
    limiting directions (even k on one side, odd k on the other); each
    one-sided phase sequence is accelerated with Aitken's delta-squared,
    and the angle is the width of the sector between the two limits that
    contains the inward direction (towards 0, the d0 side).  Expected
    value: pi*(2*d0 - 1)/(d0 + dinf - 1).
    """
    n = curve.depth
    if n < 9:
        raise ValueError("need trace depth >= 9 (q_8 vertices) for the angle estimate")
    cq = curve.closest_returns()
    ks = sorted(cq)
    lo = min(10, max(6, n - 12))
    even = [cmath.phase(cq[k]) for k in ks if k >= lo and k % 2 == 0]
    odd = [cmath.phase(cq[k]) for k in ks if k >= lo and k % 2 == 1]
    if len(even) < 3 or len(odd) < 3:
        raise ValueError("too few near-critical closest returns for the angle fit")
    even = _clean_prefix(np.unwrap(even).tolist())
    odd = _clean_prefix(np.unwrap(odd).tolist())
    ae, ao = _accelerate(even), _accelerate(odd)
    phi_e, phi_o = ae[-1], ao[-1]
    disp = abs(ae[-1] - ae[-2]) + abs(ao[-1] - ao[-2]) if len(ae) > 1 and len(ao) > 1 \
        else float("nan")
    # two complementary sectors; pick the one containing the inward direction
    if inward_direction is None:
        inward_direction = cmath.phase(-curve.critical_point)  # towards 0
    width = (phi_e - phi_o) % (2 * math.pi)
    inw = (inward_direction - phi_o) % (2 * math.pi)
    angle = width if inw <= width else 2 * math.pi - width
    return angle, disp


def bounded_turning(curve, pair_samples=4000, rng_seed=7):
    """Max over sampled vertex pairs of diam(shorter arc) / |a - b|.

    The bounded-turning (Ahlfors) constant of the traced curve; finite
    for quasicircles.  Returns (constant, (i, j)) with the maximizing
    sorted-order index pair.
    """
    pts = curve.points
    m = len(pts)
    rng = np.random.default_rng(rng_seed)
    ii = rng.integers(0, m, size=pair_samples)
    jj = rng.integers(0, m, size=pair_samples)
    best = 0.0
    best_pair = (0, 0)
    for i, j in zip(ii, jj):
        i, j = int(i), int(j)
        if i == j:
            continue
        a, b = pts[i], pts[j]
        chord = abs(a - b)
        if chord == 0:
            continue
        lo, hi = min(i, j), max(i, j)
        inner = hi - lo
        outer = m - inner
        if inner <= outer:
            arc = pts[lo:hi + 1]
        else:
            arc = np.concatenate([pts[hi:], pts[:lo + 1]])
        # diameter of the arc, coarsened for long arcs
        if len(arc) > 512:
            arc = arc[:: len(arc) // 512]
        d = _diameter(arc)
        r = d / chord
        if r > best:
            best = r
            best_pair = (i, j)
    return best, best_pair


def _diameter(pts):
    if len(pts) > 2048:
        pts = pts[:: len(pts) // 2048]
    xs = pts.real
    ys = pts.imag
    # cheap convex-hull-free bound refined by pairwise max over extremes
    cand = np.concatenate([pts[np.argsort(xs)[:8]], pts[np.argsort(xs)[-8:]],
                           pts[np.argsort(ys)[:8]], pts[np.argsort(ys)[-8:]]])
    d = 0.0
    for i in range(len(cand)):
        d = max(d, float(np.max(np.abs(cand - cand[i]))))
    # also test all points against the two extremal candidates
    for c in cand:
        d = max(d, float(np.max(np.abs(pts - c))))
    return d


def beta_number(curve, x, r, refine_steps=41):
    """Jones beta number: (1/r) * min over lines of max sample distance.

    Samples are the curve vertices inside D(x, r); the line search uses
    the principal axis through the centroid plus a 1-D sweep over
    parallel offsets and small angle perturbations.
    """
    x = complex(x)
    pts = curve.points[np.abs(curve.points - x) <= r]
    if len(pts) < 20:
        raise ValueError("need >= 20 curve samples in the disk (have %d)" % len(pts))
    xy = np.column_stack([pts.real, pts.imag])
    ctr = xy.mean(axis=0)
    u, s, vt = np.linalg.svd(xy - ctr, full_matrices=False)
    axis = vt[0]
    theta0 = math.atan2(axis[1], axis[0])
    best = math.inf
    for dth in np.linspace(-0.2, 0.2, refine_steps):
        th = theta0 + dth
        nvec = np.array([-math.sin(th), math.cos(th)])
        proj = (xy - ctr) @ nvec
        # optimal offset for min-max distance is the midrange
        half_spread = 0.5 * (proj.max() - proj.min())
        best = min(best, half_spread)
    return best / r
