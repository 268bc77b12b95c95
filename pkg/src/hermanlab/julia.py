"""Basin classification grids, box-counting dimension, porosity, rendering.

The sphere splits into the basin of 0, the basin of infinity, and the
rest; for the tuned families the Julia set (which contains the Herman
curve) is approximated from outside by the UNDECIDED label.  The module
also houses the generic box-counting dimension estimator used on traced
curves and the porosity/deep-point profile built on an exact Euclidean
distance transform.
"""

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

BASIN0, BASIN_INF, UNDECIDED = 0, 1, 2

GRID_MAGIC = b"HLGRID1"


@dataclass
class GridClassification:
    window: tuple               # (x0, y0, x1, y1)
    labels: np.ndarray          # uint8 (h, w)
    escape_iters: np.ndarray    # uint32 (h, w)
    maxiter: int
    r0: float
    rinf: float

    @property
    def resolution(self):
        h, w = self.labels.shape
        return (w, h)

    def pixel_of(self, z):
        x0, y0, x1, y1 = self.window
        h, w = self.labels.shape
        ix = int((z.real - x0) / (x1 - x0) * w)
        iy = int((z.imag - y0) / (y1 - y0) * h)
        if not (0 <= ix < w and 0 <= iy < h):
            raise ValueError("point outside window")
        return ix, iy

    def pixel_size(self):
        x0, y0, x1, y1 = self.window
        h, w = self.labels.shape
        return (x1 - x0) / w


def classify(map_, window, resolution, maxiter=1000, r0=1e-6, rinf=1e6):
    """Classify each pixel center by escape to the traps at 0 / infinity.

    Labels: BASIN0 (|orbit| < r0), BASIN_INF (|orbit| > rinf), UNDECIDED
    (still wandering at maxiter) -- an outer approximation of J(f).
    """
    x0, y0, x1, y1 = window
    if isinstance(resolution, int):
        w = h = resolution
    else:
        w, h = resolution
    dx = (x1 - x0) / w
    dy = (y1 - y0) / h
    labels, iters = _kernels.classify_kernel(
        map_.num, map_.den, float(x0), float(y0), dx, dy, w, h,
        int(maxiter), float(r0), float(rinf))
    return GridClassification(window=(x0, y0, x1, y1), labels=labels,
                              escape_iters=iters, maxiter=maxiter, r0=r0, rinf=rinf)


def preimage_layers(map_, curve_points, depth, max_points=200000):
    """Iterated preimage point sets of the Herman curve (Fig. 1 green sets).

    Layer k+1 is the full preimage of layer k under the map; each layer's
    size grows by a factor of at most the total degree, so layers are
    decimated deterministically to max_points.
    """
    from .maps import preimages

    if depth < 1:
        raise ValueError("depth >= 1 required")
    layers = []
    current = np.asarray(curve_points, dtype=np.complex128)
    for _ in range(depth):
        if len(current) > max_points // map_.total_degree:
            current = current[:: len(current) // (max_points // map_.total_degree) + 1]
        nxt = []
        for w in current:
            nxt.extend(preimages(map_, complex(w)))
        current = np.asarray(nxt, dtype=np.complex128)
        layers.append(current)
    return layers


# ---------------------------------------------------------------------------
# box-counting dimension
# ---------------------------------------------------------------------------

@dataclass
class DimensionReport:
    scales: list                # dyadic epsilon values
    counts: list                # N(epsilon)
    slope: float
    slope_err: float
    point_spacing: float
    diameter: float
    meta: dict = field(default_factory=dict)


class InsufficientScalesError(ValueError):
    pass


def _adjacent_spacing(points, quantile=0.95):
    """Resolution floor of an ordered sample: a high quantile of adjacent gaps.

    The invariant measure on a Herman curve is singular, so the max gap
    is dominated by a few starved arcs; the 95th-percentile gap is the
    scale below which box counts are systematically starved.
    """
    gaps = np.abs(np.diff(points))
    wrap = abs(points[0] - points[-1])
    gaps = np.append(gaps, wrap)
    return float(np.quantile(gaps, quantile))


def _dyadic_counts(points, levels, origin, diam, connect):
    """Occupied-box counts at dyadic scales eps = diam / 2^level.

    With connect=True, consecutive points are joined and every box the
    polyline passes through is counted (supercover), which removes the
    sampling-measure bias; points must then be in curve order.
    """
    x = points.real
    y = points.imag
    x0, y0 = origin
    out = []
    x2 = np.roll(x, -1)
    y2 = np.roll(y, -1)
    for lev in levels:
        eps = diam / 2 ** lev
        if connect:
            step = 0.25 * eps
            L = np.hypot(x2 - x, y2 - y)
            m = np.maximum(1, np.ceil(L / step)).astype(np.int64)
            keys = []
            seg_chunk = 400000
            n = len(x)
            for s0 in range(0, n, seg_chunk):
                s1 = min(n, s0 + seg_chunk)
                mm = m[s0:s1]
                reps = np.repeat(np.arange(s0, s1), mm)
                cc = np.cumsum(mm)
                offs = (np.arange(cc[-1]) - np.repeat(cc - mm, mm)).astype(np.float64)
                u = offs / mm[reps - s0]
                xs = x[reps] + u * (x2 - x)[reps]
                ys = y[reps] + u * (y2 - y)[reps]
                k = (np.floor((xs - x0) / eps).astype(np.int64) * (2 ** lev + 7)
                     + np.floor((ys - y0) / eps).astype(np.int64))
                keys.append(np.unique(k))
            count = len(np.unique(np.concatenate(keys)))
        else:
            k = (np.floor((x - x0) / eps).astype(np.int64) * (2 ** lev + 7)
                 + np.floor((y - y0) / eps).astype(np.int64))
            count = len(np.unique(k))
        out.append((eps, count))
    return out


def box_dimension(points, eps_range=None, connect=False, spacing_quantile=0.95,
                  min_levels=4):
    """Box-counting dimension of a point set by least squares over dyadic scales.

    The scale range spans the dyadic levels inside
    [8 * point-spacing, diameter / 8] (point-spacing: 95th-percentile
    adjacent gap of the ordered samples), with a fixed grid origin at the
    lower-left corner of the bounding box.  connect=True counts boxes
    crossed by the closed polyline through the ordered samples instead of
    sample points only.
    """
    points = np.asarray(points, dtype=np.complex128)
    if len(points) < 10 ** 4:
        raise ValueError("need at least 1e4 points (have %d)" % len(points))
    x = points.real
    y = points.imag
    origin = (float(x.min()) - 1e-12, float(y.min()) - 1e-12)
    diam = max(float(x.max()) - origin[0], float(y.max()) - origin[1])
    spacing = _adjacent_spacing(points, spacing_quantile)
    if eps_range is None:
        # with connected counting the polyline interpolates through the
        # sampling gaps, so the floor can sit below the spacing scale
        lo_eps = (4.0 if connect else 8.0) * spacing
        hi_eps = diam / 16.0
    else:
        lo_eps, hi_eps = min(eps_range), max(eps_range)
    levels = [lev for lev in range(1, 40)
              if lo_eps <= diam / 2 ** lev <= hi_eps]
    if len(levels) < min_levels:
        raise InsufficientScalesError(
            "only %d usable dyadic scales in [%.3g, %.3g]" % (len(levels), lo_eps, hi_eps))
    counts = _dyadic_counts(points, levels, origin, diam, connect)
    le = np.log([c[0] for c in counts])
    lN = np.log([c[1] for c in counts])
    A = np.vstack([-le, np.ones(len(le))]).T
    sol, _, _, _ = np.linalg.lstsq(A, lN, rcond=None)
    resid = lN - A @ sol
    dof = len(le) - 2
    s2 = float(resid @ resid) / dof if dof > 0 else 0.0
    cov = s2 * np.linalg.pinv(A.T @ A)
    return DimensionReport(
        scales=[c[0] for c in counts], counts=[c[1] for c in counts],
        slope=float(sol[0]), slope_err=float(math.sqrt(abs(cov[0, 0]))),
        point_spacing=spacing, diameter=diam,
        meta={"connect": connect, "levels": levels, "origin": origin})


# ---------------------------------------------------------------------------
# porosity / deep points
# ---------------------------------------------------------------------------

@dataclass
class PorosityProfile:
    center: complex
    radii: list
    ratios: list                # largest hole radius / r
    delta: float | None         # fitted exponent of log(ratio) vs log(r)
    skipped: list = field(default_factory=list)


def porosity_profile(grid, center, radii):
    """Largest Fatou-disk-to-radius ratios around a point of the Julia set.

    For each radius r, finds the largest disk inside D(center, r)
    containing no UNDECIDED pixel, via an exact Euclidean distance
    transform; at a deep point the ratios decay as r -> 0.
    """
    from scipy.ndimage import distance_transform_edt

    center = complex(center)
    px = grid.pixel_size()
    cx, cy = grid.pixel_of(center)
    h, w = grid.labels.shape
    # distance (in pixels) from each pixel to the nearest UNDECIDED pixel
    dist = distance_transform_edt(grid.labels != UNDECIDED)
    yy, xx = np.mgrid[0:h, 0:w]
    rad_to_center = np.hypot(xx - cx, yy - cy)
    ratios = []
    used = []
    skipped = []
    for r in sorted(radii, reverse=True):
        rpix = r / px
        if rpix < 8:
            skipped.append(r)
            continue
        inside = rad_to_center <= rpix
        if not inside.any():
            skipped.append(r)
            continue
        hole = np.minimum(dist[inside], rpix - rad_to_center[inside])
        best = float(hole.max())
        ratios.append(max(0.0, best) / rpix)
        used.append(r)
    delta = None
    pos = [(r, q) for r, q in zip(used, ratios) if q > 0]
    if len(pos) >= 3:
        lr = np.log([p[0] for p in pos])
        lq = np.log([p[1] for p in pos])
        delta = float(np.polyfit(lr, lq, 1)[0])
    prof = PorosityProfile(center=center, radii=used, ratios=ratios,
                           delta=delta, skipped=skipped)
    return prof


# ---------------------------------------------------------------------------
# I/O: grid binary format and PPM rendering
# ---------------------------------------------------------------------------

def save_grid(grid, path):
    """Binary format: magic, window doubles, u32 w/h, u8 labels, u32 iters."""
    h, w = grid.labels.shape
    with open(path, "wb") as fh:
        fh.write(GRID_MAGIC)
        fh.write(struct.pack("<4d", *grid.window))
        fh.write(struct.pack("<2I", w, h))
        fh.write(struct.pack("<Idd", grid.maxiter, grid.r0, grid.rinf))
        fh.write(grid.labels.astype("<u1").tobytes())
        fh.write(grid.escape_iters.astype("<u4").tobytes())


def load_grid(path):
    with open(path, "rb") as fh:
        magic = fh.read(len(GRID_MAGIC))
        if magic != GRID_MAGIC:
            raise ValueError("not a grid file (bad magic)")
        window = struct.unpack("<4d", fh.read(32))
        w, h = struct.unpack("<2I", fh.read(8))
        maxiter, r0, rinf = struct.unpack("<Idd", fh.read(20))
        labels = np.frombuffer(fh.read(w * h), dtype="<u1").reshape(h, w).copy()
        iters = np.frombuffer(fh.read(4 * w * h), dtype="<u4").reshape(h, w).copy()
    return GridClassification(window=window, labels=labels, escape_iters=iters,
                              maxiter=maxiter, r0=r0, rinf=rinf)


# palette per the figure convention: basin of 0 shaded, basin of infinity
# light, Julia approximation dark; overlays: curve red, preimages green
_PALETTE = {
    BASIN0: (64, 78, 130),
    BASIN_INF: (235, 235, 225),
    UNDECIDED: (20, 20, 20),
}
_CURVE_RGB = (220, 30, 30)
_PREIMAGE_RGB = (40, 170, 60)


def render(grid, path, curve_overlay=None, preimage_overlays=(), palette=None,
           shade_iters=True):
    """Write a deterministic 8-bit P6 PPM image of the classification.

    Basins are shaded by escape iteration count; the traced curve is
    overlaid in red and preimage layers in green.
    """
    pal = dict(_PALETTE)
    if palette:
        pal.update(palette)
    h, w = grid.labels.shape
    img = np.zeros((h, w, 3), dtype=np.uint8)
    for lab, rgb in pal.items():
        img[grid.labels == lab] = rgb
    if shade_iters:
        it = grid.escape_iters.astype(np.float64)
        shade = 0.55 + 0.45 * np.cos(0.35 * it)
        for lab in (BASIN0, BASIN_INF):
            m = grid.labels == lab
            img[m] = np.clip(img[m] * shade[m][:, None], 0, 255).astype(np.uint8)

    def put_points(pts, rgb):
        x0, y0, x1, y1 = grid.window
        xs = ((np.real(pts) - x0) / (x1 - x0) * w).astype(np.int64)
        ys = ((np.imag(pts) - y0) / (y1 - y0) * h).astype(np.int64)
        ok = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
        img[ys[ok], xs[ok]] = rgb

    for layer in preimage_overlays:
        put_points(np.asarray(layer), _PREIMAGE_RGB)
    if curve_overlay is not None:
        put_points(np.asarray(curve_overlay), _CURVE_RGB)

    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (w, h))
        # PPM rows run top to bottom; our rows run bottom (y0) to top
        fh.write(img[::-1].tobytes())
    return path
