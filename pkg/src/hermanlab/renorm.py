"""Log lifts, commuting pairs, renormalization, and scaling diagnostics.

The n-th pre-renormalization of a quasicircle map f is the commuting
pair (T_{-p_n} F^{q_n} on [c_{q_{n-1}}, 0], T_{-p_{n-1}} F^{q_{n-1}} on
[0, c_{q_n}]) in log coordinates, where F is a lift of f with the
critical point at 0 and c_j = T_{-p} F^j(0) are the lifted closest
returns.  Renormalization rescales by the antilinear map
z -> -c_{q_{n-1}} conj(z) (n odd) or the linear map z -> -c_{q_{n-1}} z
(n even), normalizing f_+(0) = -1, and shifts the rotation number by
the Gauss map.

Scaling ratios (Eq. s_n = (f^{q_{n+1}}(c)-c)/(f^{q_n}(c)-c)) and the
self-similarity factor mu (limit of c_{q_{n+s}}/c_{q_n}) are computed in
the plane chart centered at the critical point; limits of ratios are
chart-independent.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .cfrac import convergents, gauss
from .rotation import _resolve_theta


class BranchAmbiguityError(RuntimeError):
    pass


@dataclass
class LogLift:
    """Branch-selected lift F(z) = log(f(e^{2 pi i z}))/(2 pi i) near the curve.

    The chart sends the critical point (z=1 in the plane) to 0, and the
    branch at each point is the integer translate minimizing
    |F(z) - z - theta|.
    """

    map: object
    theta_float: float

    def __call__(self, z):
        return self.power(z, 1, 0)

    def ensure_table(self, K):
        """Lift table x_k = h({k theta}) for the first K critical-orbit points.

        The fractional lift of orbit point k is obtained by continuous
        continuation of arg along the traced curve in its combinatorial
        order (the curve winds once around 0, so the accumulated angle is
        the conjugacy h up to normalization h(0) = 0).  This pins log
        branches exactly; nearest-branch selection alone fails when the
        conjugacy distortion over one renormalization interval exceeds
        1/2, which happens at shallow levels for wilder curves.
        """
        K = max(K, 1500)   # coarse polygons break the arg continuation
        if getattr(self, "_table", None) is not None and len(self._table) >= K:
            return
        ks = np.arange(1, K, dtype=np.int64)
        pts, nok = _kernels.orbit_samples(self.map.num, self.map.den, 1.0 + 0.0j,
                                          ks, 1e-8, 1e8)
        if nok != len(ks):
            raise BranchAmbiguityError("critical orbit escaped before index %d" % K)
        pts = np.concatenate([[1.0 + 0.0j], pts])
        pos = (np.arange(K) * self.theta_float) % 1.0
        order = np.argsort(pos, kind="stable")
        w = pts[order]
        inc = np.angle(w / np.concatenate([[1.0 + 0.0j], w[:-1]]))
        if np.max(np.abs(inc)) > 3.0:
            raise BranchAmbiguityError("curve continuation step too large")
        psi = np.cumsum(inc)
        x = np.empty(K)
        x[order] = psi / (2 * math.pi)
        self._table = x - 1j * np.log(np.abs(pts)) / (2 * math.pi)

    def _match(self, z, tol=1e-6):
        """Index k and integer shift m with z = x_k - m, or (None, None)."""
        tab = getattr(self, "_table", None)
        if tab is None:
            return None, None
        zr = z.real - math.floor(z.real)
        for cand in (zr, zr - 1.0, zr + 1.0):
            d = np.abs(tab - (cand + 1j * z.imag))
            k = int(np.argmin(d))
            if d[k] < tol:
                return k, round(tab[k].real - z.real)
        return None, None

    def power(self, z, q, p):
        """T_{-p} F^q (z): analytic plane orbit, branch pinned by the table.

        For a tabulated orbit point z = x_k - m the exact branch comes
        from the lift identity F^q(x_k + floor(k theta)) =
        x_{k+q} + floor((k+q) theta); otherwise the branch nearest to
        z + q theta - p is used, valid while the distortion over the
        interval stays below 1/2.
        """
        w = cmath.exp(2j * math.pi * z)
        for _ in range(q):
            w = self.map.eval(w)
            if not (1e-8 < abs(w) < 1e8):
                raise BranchAmbiguityError("orbit left the annulus at z=%r" % z)
        base = cmath.log(w) / (2j * math.pi)
        k0, m = self._match(z)
        if k0 is not None and getattr(self, "_table", None) is not None \
                and k0 + q < len(self._table):
            th = self.theta_float
            target = (self._table[k0 + q].real
                      + math.floor((k0 + q) * th) - math.floor(k0 * th) - m - p)
        else:
            target = z.real + q * self.theta_float - p
        k = round(target - base.real)
        res = base + k
        if abs(res.real - target) > 0.45:
            raise BranchAmbiguityError("ambiguous log branch at z=%r" % z)
        return res

    def iterate(self, z, n):
        for _ in range(n):
            z = self(z)
        return z


def log_lift(map_, theta):
    theta = _resolve_theta(theta)
    return LogLift(map=map_, theta_float=theta.value_float())


@dataclass
class CommutingPair:
    """Evaluable commuting pair with base intervals [f_+(0),0] and [0,f_-(0)]."""

    f_minus: object
    f_plus: object
    endpoint_minus: complex     # f_-(0) = c_{q_n} (right end of I_+)
    endpoint_plus: complex      # f_+(0) = c_{q_{n-1}} (left end of I_-)
    level: int
    parity: str                 # "even"/"odd" of the level n
    theta: object = None        # rotation number of the pair (ContinuedFraction)
    normalized: bool = False
    meta: dict = field(default_factory=dict)

    def commutation_residual(self):
        a = self.f_minus(self.f_plus(0.0 + 0.0j))
        b = self.f_plus(self.f_minus(0.0 + 0.0j))
        return abs(a - b)

    def height(self, max_steps=200):
        """chi: first time f_-^{chi+1}(f_+(0)) enters int I_+ = (0, f_-(0))."""
        z = self.f_plus(0.0 + 0.0j)
        for j in range(max_steps):
            z = self.f_minus(z)
            if _in_open_segment(z, 0.0 + 0.0j, self.endpoint_minus):
                return j
        raise RuntimeError("height not found within %d steps" % max_steps)


def _in_open_segment(z, a, b, perp_tol=0.35):
    """Is z strictly inside segment (a, b)?  Tolerant transverse deviation

    (the pair orbits live on a quasi-arc, not the straight chord)."""
    d = b - a
    if d == 0:
        return False
    t = ((z - a) / d).real
    perp = abs(((z - a) / d).imag)
    return 0.0 < t < 1.0 and perp < perp_tol


def commuting_pair(map_, theta, n, lift=None):
    """The n-th pre-renormalization of the tuned map as a CommutingPair."""
    theta = _resolve_theta(theta)
    if n < 2:
        raise ValueError("need n >= 2")
    conv = convergents(theta, n + 2)
    if lift is None:
        lift = log_lift(map_, theta)
    lift.ensure_table(conv.q[n + 1] + conv.q[n] + 2)
    pn, qn = conv.p[n], conv.q[n]
    pn1, qn1 = conv.p[n - 1], conv.q[n - 1]

    def f_minus(z):
        return lift.power(z, qn, pn)

    def f_plus(z):
        return lift.power(z, qn1, pn1)

    em = f_minus(0.0 + 0.0j)
    ep = f_plus(0.0 + 0.0j)
    shifted = theta
    for _ in range(n):
        shifted = gauss(shifted)
    return CommutingPair(f_minus=f_minus, f_plus=f_plus,
                         endpoint_minus=em, endpoint_plus=ep,
                         level=n, parity="odd" if n % 2 else "even",
                         theta=shifted,
                         meta={"map": map_, "lift": lift, "theta0": theta})


def normalize(pair):
    """Rescale so f_+(0) = -1, via z -> -c conj(z) (odd level) or -c z (even)."""
    c = pair.endpoint_plus
    odd = pair.parity == "odd"

    if odd:
        def A(z):
            return -c * np.conj(z)

        def Ainv(z):
            return np.conj(z / (-c))
    else:
        def A(z):
            return -c * z

        def Ainv(z):
            return z / (-c)

    def g_minus(z):
        return Ainv(pair.f_minus(A(z)))

    def g_plus(z):
        return Ainv(pair.f_plus(A(z)))

    return CommutingPair(
        f_minus=g_minus, f_plus=g_plus,
        endpoint_minus=complex(Ainv(pair.endpoint_minus)),
        endpoint_plus=complex(Ainv(pair.endpoint_plus)),
        level=pair.level, parity=pair.parity, theta=pair.theta,
        normalized=True, meta=dict(pair.meta))


def renormalize(pair):
    """One renormalization step: the normalized level n+1 pre-renormalization.

    Criticalities (d0, dinf) swap under one step and are restored after
    two; the rotation number shifts by the Gauss map.
    """
    meta = pair.meta
    if "map" in meta:
        nxt = commuting_pair(meta["map"], meta["theta0"], pair.level + 1,
                             lift=meta.get("lift"))
        return normalize(nxt)
    # generic pair (e.g. translation pair): build the successor directly
    chi = pair.height()
    f_m, f_p = pair.f_minus, pair.f_plus

    def new_minus(z):
        w = f_p(z)
        for _ in range(chi):
            w = f_m(w)
        return w

    new_pair = CommutingPair(
        f_minus=new_minus, f_plus=f_m,
        endpoint_minus=complex(new_minus(0.0 + 0.0j)),
        endpoint_plus=complex(f_m(0.0 + 0.0j)),
        level=pair.level + 1,
        parity="odd" if (pair.level + 1) % 2 else "even",
        theta=gauss(pair.theta) if pair.theta is not None else None,
        meta=dict(pair.meta))
    return normalize(new_pair)


def translation_pair(theta):
    """The combinatorial model T_theta = (T_theta on [-1,0], T_{-1} on [0,theta]).

    Already in normalized form (f_+(0) = -1); renormalizing it yields
    T_{G(theta)} after rescale.
    """
    th = theta.value_float() if hasattr(theta, "value_float") else float(theta)

    def f_minus(z):
        return z + th

    def f_plus(z):
        return z - 1.0

    return CommutingPair(f_minus=f_minus, f_plus=f_plus,
                         endpoint_minus=complex(th),
                         endpoint_plus=complex(-1.0),
                         level=1, parity="odd", normalized=True,
                         theta=theta if hasattr(theta, "value_float") else None)


@dataclass
class ScalingReport:
    s: dict                      # n -> s_n
    cq: dict                     # n -> c_{q_n} (plane chart)
    ratios: dict                 # n -> c_{q_{n+s}}/c_{q_n}
    period: int
    mu: complex | None = None
    mu_err: float | None = None
    cauchy_factors: list = field(default_factory=list)


def closest_return_displacements(f, theta, N, x0=None):
    """c_{q_n} = f^{q_n}(c) - c for n <= N, in the plane chart.

    f may be a RationalMap (critical point z=1) or a circle-map lift with
    a .critical_point attribute (real displacements F^{q_n}(x_c)-x_c-p_n).
    """
    theta = _resolve_theta(theta)
    conv = convergents(theta, N + 1)
    if hasattr(f, "num"):
        ks = np.array([conv.q[n] for n in range(1, N + 1)], dtype=np.int64)
        import os
        if os.environ.get("HERMANLAB_PRECISION") == "extended":
            vals, nok = _kernels.orbit_samples_extended(f.num, f.den, 1.0 + 0.0j, ks)
        else:
            vals, nok = _kernels.orbit_samples(f.num, f.den, 1.0 + 0.0j, ks, 1e-8, 1e8)
        if nok != len(ks):
            raise RuntimeError("orbit escaped before depth q_%d" % N)
        return {n: complex(vals[n - 1]) - 1.0 for n in range(1, N + 1)}
    # circle-map lift path
    xc = x0 if x0 is not None else getattr(f, "critical_point", 0.0)
    out = {}
    x = xc
    k = 0
    for n in range(1, N + 1):
        while k < conv.q[n]:
            x = f(x)
            k += 1
        out[n] = complex(x - xc - conv.p[n])
    return out


def scaling_ratios(f, theta, N, period=2):
    """Scaling ratios s_n and self-similarity ratios c_{q_{n+s}}/c_{q_n}."""
    cq = closest_return_displacements(f, theta, N + period)
    eps = 1e3 * np.finfo(float).eps
    s = {}
    for n in range(1, N + period):
        if n in cq and n + 1 in cq and abs(cq[n]) > eps:
            s[n] = cq[n + 1] / cq[n]
    ratios = {}
    for n in range(1, N + 1):
        if n in cq and n + period in cq and abs(cq[n]) > eps:
            ratios[n] = cq[n + period] / cq[n]
    rep = ScalingReport(s=s, cq=cq, ratios=ratios, period=period)
    # Cauchy contraction along the natural subsequences: ratios with n of
    # the same residue mod `period` converge monotonically to mu, so the
    # successive differences to compare are `period` levels apart.
    diffs = {n: abs(ratios[n] - ratios[n - period])
             for n in ratios if n - period in ratios}
    rep.cauchy_factors = [diffs[n - period] / diffs[n]
                          for n in sorted(diffs)
                          if n - period in diffs and diffs[n] > 0]
    return rep


def _aitken_c(seq):
    out = []
    for i in range(len(seq) - 2):
        d2 = seq[i + 2] - 2 * seq[i + 1] + seq[i]
        if d2 == 0:
            out.append(seq[i + 2])
        else:
            out.append(seq[i + 2] - (seq[i + 2] - seq[i + 1]) ** 2 / d2)
    return out


def self_similarity(f, theta, period=2, N=None):
    """Self-similarity factor mu = lim c_{q_{n+s}}/c_{q_n}, Aitken-accelerated.

    theta must be of eventually-periodic type with even period s; the
    error bar is the magnitude of the last two accelerated differences.
    """
    theta = _resolve_theta(theta)
    if theta.period is None:
        raise ValueError("theta must be eventually periodic (quadratic irrational)")
    if period % 2:
        raise ValueError("period must be even")
    if N is None:
        N = 20
    rep = scaling_ratios(f, theta, N, period=period)
    ns = sorted(rep.ratios)
    seq = [rep.ratios[n] for n in ns]
    if len(seq) < 5:
        raise ValueError("insufficient depth for 3 Cauchy differences")
    acc = _aitken_c(seq)
    mu = acc[-1]
    err = abs(acc[-1] - acc[-2]) + abs(acc[-2] - acc[-3]) if len(acc) >= 3 else math.nan
    rep.mu = mu
    rep.mu_err = err
    if not (0 < abs(mu) < 1):
        raise RuntimeError("self-similarity factor |mu|=%.4f outside (0,1)" % abs(mu))
    return rep


def convergence_report(f1, f2, theta, N, n_range=None):
    """Fit log|s_n(f2)/s_n(f1) - 1| vs n; slope < 0 means universality.

    Returns (slope, r_squared, pairs) where pairs are the (n, log-diff)
    points used.  Identical ratio sequences are flagged degenerate.
    """
    r1 = scaling_ratios(f1, theta, N)
    r2 = scaling_ratios(f2, theta, N)
    ns = sorted(set(r1.s) & set(r2.s))
    if n_range is not None:
        ns = [n for n in ns if n_range[0] <= n <= n_range[1]]
    noise = 1e3 * np.finfo(float).eps
    pairs = []
    for n in ns:
        d = abs(r2.s[n] / r1.s[n] - 1.0)
        if d > noise:
            pairs.append((n, math.log(d)))
    if len(pairs) < 5:
        if all(abs(r2.s[n] / r1.s[n] - 1.0) <= noise for n in ns):
            return float("-inf"), 1.0, []
        raise ValueError("fewer than 5 usable scaling-ratio comparisons")
    xs = np.array([p[0] for p in pairs], dtype=float)
    ys = np.array([p[1] for p in pairs], dtype=float)
    A = np.vstack([xs, np.ones_like(xs)]).T
    sol, res, _, _ = np.linalg.lstsq(A, ys, rcond=None)
    slope = float(sol[0])
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    ss_res = float(np.sum((A @ sol - ys) ** 2))
    r2v = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return slope, r2v, pairs
